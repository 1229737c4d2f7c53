#include "mtp2/ips.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mtp2 {

namespace {

std::vector<state_t> support_states(const SampleCounts& c) {
  std::vector<state_t> out;
  for (state_t s = 0; s < c.counts.size(); ++s)
    if (c.counts[s] > 0) out.push_back(s);
  return out;
}

void check_positive(const PairMargin& q, const char* what) {
  if (!(q.min_entry() > 0.0)) throw std::domain_error(std::string(what) + " has a zero cell");
}

}  // namespace

PreflightResult preflight_existence(const SampleCounts& c, const Graph& g) {
  if (c.dim != g.dim()) throw std::invalid_argument("dimension mismatch between sample and graph");
  const std::vector<state_t> supp = support_states(c);
  PreflightResult out;
  for (auto [i, j] : g.edges()) {
    bool has_pm = false, has_mp = false;
    for (state_t s : supp) {
      const bool bi = (s >> i) & 1u, bj = (s >> j) & 1u;
      has_pm |= (bi && !bj);
      has_mp |= (!bi && bj);
      if (has_pm && has_mp) break;
    }
    if (!(has_pm && has_mp)) {
      out.ok = false;
      out.offending_edges.push_back({i, j});
    }
  }
  return out;
}

double pair_delta(const PairMargin& p_ij, const PairMargin& e) {
  check_positive(p_ij, "pair margin");
  check_positive(e, "target pair distribution");
  return 0.25 * std::log((e.pp / p_ij.pp) * (e.mm / p_ij.mm) * (p_ij.pm / e.pm) * (p_ij.mp / e.mp));
}

double delta_ij(const ProbTable& p, const PairMargin& e, int i, int j) {
  return pair_delta(pair_margin(p, i, j), e);
}

PairMargin shift_margin(const PairMargin& e, double lambda) {
  const double x = lambda / 4.0;
  return PairMargin{e.pp + x, e.pm - x, e.mp - x, e.mm + x};
}

double delta_shifted(const PairMargin& p_ij, const PairMargin& e, double lambda) {
  return pair_delta(p_ij, shift_margin(e, lambda));
}

double solve_lambda_star(const PairMargin& p_ij, const PairMargin& e, double j_ij) {
  check_positive(p_ij, "pair margin");
  check_positive(e, "target pair distribution");
  const double d0 = pair_delta(p_ij, e);
  if (d0 + j_ij > 0.0)
    throw std::domain_error("lambda* requested although the unclamped update stays nonnegative");

  const double r = (p_ij.pp * p_ij.mm) / (p_ij.mp * p_ij.pm) * std::exp(-4.0 * j_ij);
  const double a = 1.0 - r;
  const double b = e.pp + e.mm + r * (e.mp + e.pm);
  const double c = e.pp * e.mm - r * e.mp * e.pm;
  const double disc = std::max(b * b - 4.0 * a * c, 0.0);
  // b > 0 here, so q = -(b + sqrt(disc))/2 avoids cancellation; the root pair
  // is (q/a, c/q).
  const double q = -(b + std::sqrt(disc)) / 2.0;
  const double upper = std::min(e.pm, e.mp);

  double best = std::numeric_limits<double>::quiet_NaN();
  auto consider = [&](double root) {
    if (!std::isfinite(root)) return;
    if (root < -1e-12 || root >= upper) return;
    const double clamped = std::max(root, 0.0);
    if (!std::isfinite(best) || clamped < best) best = clamped;
  };
  if (q != 0.0) consider(c / q);
  if (a != 0.0) consider(q / a);
  if (!std::isfinite(best))
    throw std::runtime_error("no root of the clamped update inside (0, 4 min(e.pm, e.mp))");
  return 4.0 * best;
}

double solve_lambda_star(const ProbTable& p, const PairMargin& e, int i, int j, double j_ij) {
  return solve_lambda_star(pair_margin(p, i, j), e, j_ij);
}

double delta_sym_shifted(const PairMargin& p_ij, double m_ij, double lambda) {
  check_positive(p_ij, "pair margin");
  const double up = 1.0 + m_ij + lambda, dn = 1.0 - m_ij - lambda;
  if (!(up > 0.0 && dn > 0.0)) throw std::domain_error("lambda outside the feasible shift range");
  return 0.5 * std::log(p_ij.mp * up / (p_ij.pp * dn));
}

double solve_lambda_symmetric(const PairMargin& p_ij, double m_ij, double j_ij) {
  check_positive(p_ij, "pair margin");
  if (delta_sym_shifted(p_ij, m_ij, 0.0) + j_ij > 0.0)
    throw std::domain_error("lambda requested although the unclamped update stays nonnegative");
  const double c = (p_ij.pp / p_ij.mp) * std::exp(-2.0 * j_ij);
  const double lambda = (c * (1.0 - m_ij) - (1.0 + m_ij)) / (1.0 + c);
  return std::max(lambda, 0.0);
}

namespace {

void apply_margin_ratio(ProbTable& p, int i, int j, const PairMargin& target,
                        const PairMargin& current) {
  double factor[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) factor[a][b] = target.entry(a, b) / current.entry(a, b);
  for (state_t s = 0; s < p.size(); ++s) p[s] *= factor[(s >> i) & 1u][(s >> j) & 1u];
  p.renormalize();
}

std::vector<Graph::Edge> positive_covariance_edges(const Graph& g, const Moments& m) {
  std::vector<Graph::Edge> out;
  for (auto [i, j] : g.edges())
    if (m.second(i, j) > m.mean[i] * m.mean[j]) out.push_back({i, j});
  return out;
}

}  // namespace

IpsState ips_init(const SampleCounts& c, const Graph& g, double epsilon) {
  if (c.dim != g.dim()) throw std::invalid_argument("dimension mismatch between sample and graph");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  Moments data = moments_from_counts(c);
  ProbTable p = independence_table(data.mean);
  std::vector<Graph::Edge> eplus = positive_covariance_edges(g, data);
  return IpsState{std::move(p), g, std::move(data), std::move(eplus), {}, epsilon, 0, true, false};
}

IpsState ips_init_symmetric(const SampleCounts& c, const Graph& g, double epsilon) {
  if (c.dim != g.dim()) throw std::invalid_argument("dimension mismatch between sample and graph");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  Moments data = moments_from_counts(c);
  std::fill(data.mean.begin(), data.mean.end(), 0.0);  // symmetrized first moments
  ProbTable p = ProbTable::uniform(c.dim);
  std::vector<Graph::Edge> eplus = positive_covariance_edges(g, data);
  return IpsState{std::move(p), g, std::move(data), std::move(eplus), {}, epsilon, 0, true, true};
}

void ips_update_inplace(IpsState& s, int i, int j) {
  if (i > j) std::swap(i, j);
  const PairMargin p_ij = pair_margin(s.p, i, j);
  const PairMargin e = empirical_pair(s.target, i, j);
  if (!s.clamp) {
    apply_margin_ratio(s.p, i, j, e, p_ij);
    s.e_hat.insert({i, j});
    return;
  }
  const double dlt = pair_delta(p_ij, e);
  const double jij = interaction_from_table(s.p, i, j);
  if (dlt + jij > 0.0) {
    apply_margin_ratio(s.p, i, j, e, p_ij);
    s.e_hat.insert({i, j});
  } else {
    const double lambda = s.symmetric ? solve_lambda_symmetric(p_ij, s.target.second(i, j), jij)
                                      : solve_lambda_star(p_ij, e, jij);
    apply_margin_ratio(s.p, i, j, shift_margin(e, lambda), p_ij);
    s.e_hat.erase({i, j});
  }
}

IpsState ips_update(IpsState s, int i, int j) {
  ips_update_inplace(s, i, j);
  return s;
}

namespace {

struct SweepCheck {
  std::vector<double> mu;
  Matrix xi;
  bool converged = false;
};

SweepCheck convergence_check(const IpsState& s) {
  SweepCheck out;
  const Moments fitted = moments_from_table(s.p);
  out.mu = fitted.mean;
  out.xi = fitted.second;
  const double eps = s.epsilon;
  for (int v = 0; v < s.graph.dim(); ++v)
    if (std::abs(fitted.mean[v] - s.target.mean[v]) >= eps) return out;
  if (s.clamp) {
    for (auto [i, j] : s.graph.edges())
      if (fitted.second(i, j) < s.target.second(i, j) - eps) return out;
    for (auto [i, j] : s.e_hat)
      if (std::abs(fitted.second(i, j) - s.target.second(i, j)) >= eps) return out;
  } else {
    for (auto [i, j] : s.graph.edges())
      if (std::abs(fitted.second(i, j) - s.target.second(i, j)) >= eps) return out;
  }
  out.converged = true;
  return out;
}

FitResult finish(IpsState& s, SweepCheck&& chk, bool converged) {
  ParamsExtraction ext = params_from_table(s.p, 1e-7);
  std::vector<Graph::Edge> ehat(s.e_hat.begin(), s.e_hat.end());
  return FitResult{std::move(s.p),       Graph(s.graph.dim(), std::move(ehat)),
                   std::move(ext.params), std::move(chk.mu),
                   std::move(chk.xi),     s.sweeps,
                   converged};
}

FitResult drive(IpsState s, const FitOptions& options) {
  SweepCheck chk = convergence_check(s);
  if (chk.converged) return finish(s, std::move(chk), true);
  std::vector<double> prev;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    prev = s.p.values();
    const std::vector<Graph::Edge> order = s.clamp ? s.e_plus : s.graph.edges();
    for (auto [i, j] : order) ips_update_inplace(s, i, j);
    s.sweeps = sweep;
    chk = convergence_check(s);
    if (chk.converged) return finish(s, std::move(chk), true);
    double move = 0.0;
    for (std::size_t k = 0; k < prev.size(); ++k)
      move = std::max(move, std::abs(prev[k] - s.p[k]));
    // Stalled in floating point: the requested epsilon is unreachable, accept
    // the fixed point.
    if (move < options.stagnation_tol) return finish(s, std::move(chk), true);
  }
  chk = convergence_check(s);
  return finish(s, std::move(chk), chk.converged);
}

void require_interior_means(const Moments& data) {
  std::vector<int> bad;
  for (int v = 0; v < data.dim(); ++v)
    if (std::abs(data.mean[v]) >= 1.0) bad.push_back(v);
  if (!bad.empty())
    throw MleNotExists("a coordinate is constant in the sample; its mean parameter has no interior match",
                       {}, std::move(bad));
}

}  // namespace

FitResult fit(const SampleCounts& c, const Graph& g, double epsilon, const FitOptions& options) {
  PreflightResult pf = preflight_existence(c, g);
  if (!pf.ok)
    throw MleNotExists("an edge margin misses a sign pattern; the estimate has no full support",
                       std::move(pf.offending_edges), {});
  require_interior_means(moments_from_counts(c));
  return drive(ips_init(c, g, epsilon), options);
}

FitResult fit_symmetric(const SampleCounts& c, const Graph& g, double epsilon,
                        const FitOptions& options) {
  // Existence in the sign-flip-invariant family: each edge needs a sample
  // point with disagreeing coordinates.
  std::vector<Graph::Edge> bad;
  const std::vector<state_t> supp = [&] {
    std::vector<state_t> out;
    for (state_t s = 0; s < c.counts.size(); ++s)
      if (c.counts[s] > 0) out.push_back(s);
    return out;
  }();
  for (auto [i, j] : g.edges()) {
    bool disagree = false;
    for (state_t s : supp)
      if (((s >> i) & 1u) != ((s >> j) & 1u)) {
        disagree = true;
        break;
      }
    if (!disagree) bad.push_back({i, j});
  }
  if (!bad.empty())
    throw MleNotExists("an edge has no disagreeing sample point; the symmetric estimate has no full support",
                       std::move(bad), {});
  return drive(ips_init_symmetric(c, g, epsilon), options);
}

FitResult fit_classical(const SampleCounts& c, const Graph& g, double epsilon,
                        const FitOptions& options) {
  const Moments data = moments_from_counts(c);
  require_interior_means(data);
  for (auto [i, j] : g.edges())
    if (!(empirical_pair(data, i, j).min_entry() > 0.0))
      throw MleNotExists("an edge margin has an empty cell; classical proportional fitting would leave the family",
                         {{i, j}}, {});
  IpsState s = ips_init(c, g, epsilon);
  s.clamp = false;
  return drive(std::move(s), options);
}

}  // namespace mtp2

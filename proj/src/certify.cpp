#include "mtp2/certify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtp2 {

int Imset::entry_sum() const {
  int s = 0;
  for (const auto& [state, v] : entries) s += v;
  return s;
}

double Imset::inner(const std::vector<double>& theta_by_state) const {
  double s = 0.0;
  for (const auto& [state, v] : entries) s += v * theta_by_state[state];
  return s;
}

Imset elementary_imset(int d, int i, int j, state_t context) {
  if (i < 0 || j < 0 || i >= d || j >= d || i == j) throw std::invalid_argument("invalid coordinate pair");
  const state_t bi = state_t{1} << i, bj = state_t{1} << j;
  if (context & (bi | bj)) throw std::invalid_argument("context must not assign the pair coordinates");
  if (context > full_mask(d)) throw std::invalid_argument("context out of range");
  Imset u;
  u.dim = d;
  u.entries[context] += 1;
  u.entries[context | bi | bj] += 1;
  u.entries[context | bi] -= 1;
  u.entries[context | bj] -= 1;
  return u;
}

std::vector<Imset> elementary_imsets(int d) {
  std::vector<Imset> out;
  for (const ElementaryPair& ep : elementary_pairs(d))
    out.push_back(elementary_imset(d, ep.i, ep.j, ep.context));
  return out;
}

namespace {

// x covers z within L: nothing of L lies strictly between them. Candidates
// are z plus a nonempty proper submask of x^z.
bool covers_within(const StateSet& l, state_t z, state_t x) {
  const state_t diff = x ^ z;
  for (state_t sub = (diff - 1) & diff; sub != 0; sub = (sub - 1) & diff)
    if (l.contains(z | sub)) return false;
  return true;
}

}  // namespace

std::vector<Imset> cover_pair_imsets(const StateSet& support) {
  const int d = support.dim;
  if (support.members.empty()) throw std::invalid_argument("empty support");
  if (d < 2) return {};  // no incomparable pairs on a chain
  if (support.size() == state_count(d)) return elementary_imsets(d);
  const std::vector<state_t> members(support.members.begin(), support.members.end());
  std::vector<Imset> out;
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const state_t x = members[a], y = members[b];
      const state_t z = x & y;
      if (z == x || z == y) continue;
      if (!support.contains(z) || !support.contains(x | y))
        throw std::invalid_argument("support is not a lattice");
      if (!covers_within(support, z, x) || !covers_within(support, z, y)) continue;
      Imset u;
      u.dim = d;
      u.entries[z] += 1;
      u.entries[x | y] += 1;
      u.entries[x] -= 1;
      u.entries[y] -= 1;
      out.push_back(std::move(u));
    }
  return out;
}

std::vector<double> supermodularity_values(const std::vector<double>& theta_by_state, int d) {
  if (theta_by_state.size() != state_count(d)) throw std::invalid_argument("theta has wrong length");
  std::vector<double> out;
  out.reserve(elementary_pair_count(d));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const state_t bi = state_t{1} << i, bj = state_t{1} << j;
      for (state_t s = 0; s < theta_by_state.size(); ++s) {
        if (s & (bi | bj)) continue;
        out.push_back(theta_by_state[s] + theta_by_state[s | bi | bj] - theta_by_state[s | bi] -
                      theta_by_state[s | bj]);
      }
    }
  return out;
}

std::vector<double> imset_values(const std::vector<double>& theta_by_state,
                                 const std::vector<Imset>& gens) {
  std::vector<double> out;
  out.reserve(gens.size());
  for (const Imset& u : gens) out.push_back(u.inner(theta_by_state));
  return out;
}

namespace {

// Lawson-Hanson active-set nonnegative least squares.
ConeFit nnls(const Eigen::MatrixXd& g, const Eigen::VectorXd& v) {
  const int m = static_cast<int>(g.cols());
  ConeFit out;
  out.coefficients.assign(m, 0.0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd r = v;
  std::vector<int> passive;
  std::vector<char> in_passive(m, 0);
  const double wtol = 1e-12 * std::max(1.0, v.lpNorm<Eigen::Infinity>());
  double rnorm = r.norm();

  auto solve_passive = [&](void) -> Eigen::VectorXd {
    Eigen::MatrixXd gp(g.rows(), passive.size());
    for (std::size_t k = 0; k < passive.size(); ++k) gp.col(k) = g.col(passive[k]);
    return gp.colPivHouseholderQr().solve(v);
  };

  for (int outer = 0; outer < 10 * m + 50; ++outer) {
    const Eigen::VectorXd w = g.transpose() * r;
    int best = -1;
    double bw = wtol;
    for (int jx = 0; jx < m; ++jx)
      if (!in_passive[jx] && w[jx] > bw) {
        bw = w[jx];
        best = jx;
      }
    if (best < 0) break;
    in_passive[best] = 1;
    passive.push_back(best);

    for (int inner = 0; inner < 10 * m + 50; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      double zmin = 1.0;
      for (Eigen::Index k = 0; k < z.size(); ++k) zmin = std::min(zmin, z[k]);
      if (zmin > 0.0) {
        for (std::size_t k = 0; k < passive.size(); ++k) c[passive[k]] = z[k];
        break;
      }
      double alpha = 1.0;
      for (std::size_t k = 0; k < passive.size(); ++k)
        if (z[k] <= 0.0) {
          const double ck = c[passive[k]];
          if (ck - z[k] > 0.0) alpha = std::min(alpha, ck / (ck - z[k]));
        }
      for (std::size_t k = 0; k < passive.size(); ++k)
        c[passive[k]] += alpha * (z[k] - c[passive[k]]);
      std::vector<int> keep;
      for (int idx : passive) {
        if (c[idx] > 1e-14) {
          keep.push_back(idx);
        } else {
          c[idx] = 0.0;
          in_passive[idx] = 0;
        }
      }
      passive = std::move(keep);
      if (passive.empty()) break;
    }

    r = v - g * c;
    const double rn = r.norm();
    if (rnorm - rn < 1e-12) {
      rnorm = std::min(rnorm, rn);
      break;
    }
    rnorm = rn;
  }

  for (int jx = 0; jx < m; ++jx) out.coefficients[jx] = c[jx];
  out.residual = (v - g * c).norm();
  return out;
}

Eigen::MatrixXd generator_matrix(const std::vector<Imset>& gens, int d) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(state_count(d)),
                                            static_cast<Eigen::Index>(gens.size()));
  for (std::size_t k = 0; k < gens.size(); ++k)
    for (const auto& [state, val] : gens[k].entries) g(state, static_cast<Eigen::Index>(k)) = val;
  return g;
}

constexpr int kCertifyDimCap = 10;

}  // namespace

ConeFit cone_membership_over(const std::vector<double>& v, const std::vector<Imset>& gens, int d) {
  if (d > kCertifyDimCap) throw std::invalid_argument("cone membership is limited to d <= 10");
  if (v.size() != state_count(d)) throw std::invalid_argument("vector has wrong length");
  Eigen::VectorXd ev(static_cast<Eigen::Index>(v.size()));
  for (std::size_t s = 0; s < v.size(); ++s) ev[static_cast<Eigen::Index>(s)] = v[s];
  return nnls(generator_matrix(gens, d), ev);
}

ConeFit cone_membership(const std::vector<double>& v, int d) {
  return cone_membership_over(v, elementary_imsets(d), d);
}

KktCertificate certify_general(const ProbTable& p_hat, const SampleCounts& c,
                               const CertifyTolerances& tol) {
  if (p_hat.dim() != c.dim) throw std::invalid_argument("dimension mismatch");
  const int d = p_hat.dim();
  if (d > kCertifyDimCap) throw std::invalid_argument("certify_general is limited to d <= 10");

  KktCertificate cert;
  const StateSet supp = p_hat.support();

  // Candidate support must be the lattice closure of the observed states;
  // otherwise it cannot be the maximizer.
  const StateSet closure = lattice_closure(c.support());
  cert.support_ok = (supp == closure);

  std::vector<Imset> gens;
  try {
    gens = cover_pair_imsets(supp);
  } catch (const std::invalid_argument&) {
    cert.support_ok = false;  // support is not even a lattice
  }

  // sigma - empirical, over all states (zero off the support when support_ok).
  std::vector<double> gap(p_hat.size());
  for (state_t s = 0; s < p_hat.size(); ++s)
    gap[s] = p_hat[s] - static_cast<double>(c.counts[s]) / static_cast<double>(c.n);

  // Mean gap: every generator has vanishing first moments, so means must match.
  double mean_gap = 0.0;
  for (int i = 0; i < d; ++i) {
    double gi = 0.0;
    for (state_t s = 0; s < p_hat.size(); ++s) gi += gap[s] * (((s >> i) & 1u) ? 1.0 : -1.0);
    mean_gap = std::max(mean_gap, std::abs(gi));
  }
  cert.moment_residual = mean_gap;
  cert.moment_ok = cert.moment_residual <= tol.moment;

  if (!cert.support_ok) {
    cert.pass = false;
    return cert;
  }

  // theta = log p normalized to vanish at the support bottom.
  state_t bottom = *supp.members.begin();
  for (state_t s : supp.members) bottom &= s;
  std::vector<double> theta(p_hat.size(), 0.0);
  for (state_t s : supp.members) theta[s] = std::log(p_hat[s]) - std::log(p_hat[bottom]);

  const std::vector<double> vals = imset_values(theta, gens);
  cert.primal_residual = vals.empty() ? 0.0 : *std::min_element(vals.begin(), vals.end());
  cert.primal_ok = cert.primal_residual >= -tol.primal;

  if (gens.empty()) {
    double sq = 0.0;
    for (double x : gap) sq += x * x;
    cert.dual_residual = std::sqrt(sq);
  } else {
    cert.dual_residual = cone_membership_over(gap, gens, d).residual;
  }
  cert.dual_ok = cert.dual_residual <= tol.dual;

  double slack = 0.0;
  for (state_t s : supp.members) slack += theta[s] * gap[s];
  cert.slackness_residual = std::abs(slack);
  cert.slackness_ok = cert.slackness_residual <= tol.slack;

  cert.pass = cert.primal_ok && cert.dual_ok && cert.slackness_ok && cert.moment_ok && cert.support_ok;
  return cert;
}

KktCertificate certify_ising(const FitResult& result, const Moments& data, const Graph& g,
                             const CertifyTolerances& tol) {
  const int d = g.dim();
  if (result.params.dim() != d || data.dim() != d) throw std::invalid_argument("dimension mismatch");

  KktCertificate cert;
  const Matrix sigma_hat = [&] {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = result.xi(i, j) - result.mu[i] * result.mu[j];
    return m;
  }();

  double primal = std::numeric_limits<double>::infinity();
  double dual = std::numeric_limits<double>::infinity();
  double slack = 0.0;
  for (auto [i, j] : g.edges()) {
    const double jij = result.params.j(i, j);
    const double gap = sigma_hat(i, j) - data.covariance(i, j);
    primal = std::min(primal, jij);
    dual = std::min(dual, gap);
    slack = std::max(slack, std::abs(gap * jij));
  }
  double mean_gap = 0.0;
  for (int v = 0; v < d; ++v) mean_gap = std::max(mean_gap, std::abs(result.mu[v] - data.mean[v]));
  dual = std::min(dual, -mean_gap);

  double moment = mean_gap;
  for (auto [i, j] : result.graph_hat.edges())
    moment = std::max(moment, std::abs(result.xi(i, j) - data.second(i, j)));

  if (g.edges().empty()) {
    primal = 0.0;
    dual = -mean_gap;
  }

  cert.primal_residual = primal;
  cert.dual_residual = dual;
  cert.slackness_residual = slack;
  cert.moment_residual = moment;
  cert.primal_ok = primal >= -tol.primal;
  cert.dual_ok = dual >= -tol.dual;
  cert.slackness_ok = slack <= tol.slack;
  cert.moment_ok = moment <= tol.moment;
  cert.pass = cert.primal_ok && cert.dual_ok && cert.slackness_ok && cert.moment_ok;
  return cert;
}

}  // namespace mtp2

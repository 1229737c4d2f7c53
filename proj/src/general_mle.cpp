#include "mtp2/general_mle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace mtp2 {

namespace {

constexpr int kGeneralDimCap = 8;

struct LocalConstraint {
  int idx[4];     // local indices of bottom-like, top-like, x, y (may hit the pinned bottom)
  int coef[4];    // +1, +1, -1, -1
};

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

GeneralSolution solve_general(const SampleCounts& c, const GeneralOptions& options) {
  const int d = c.dim;
  if (d > kGeneralDimCap) throw std::invalid_argument("solve_general is limited to d <= 8");

  const StateSet closure = lattice_closure(c.support());
  const std::vector<state_t> members(closure.members.begin(), closure.members.end());
  const int nl = static_cast<int>(members.size());

  state_t bottom = members.front();
  for (state_t s : members) bottom &= s;

  std::vector<int> local_of(state_count(d), -1);
  for (int k = 0; k < nl; ++k) local_of[members[k]] = k;
  const int bottom_local = local_of[bottom];

  Eigen::VectorXd counts(nl);
  for (int k = 0; k < nl; ++k) counts[k] = static_cast<double>(c.counts[members[k]]);
  const double n = static_cast<double>(c.n);

  const std::vector<Imset> gens = cover_pair_imsets(closure);
  std::vector<LocalConstraint> cons;
  cons.reserve(gens.size());
  for (const Imset& u : gens) {
    LocalConstraint lc{};
    int pos = 0, neg = 2;
    for (const auto& [state, v] : u.entries) {
      const int k = v > 0 ? pos++ : neg++;
      lc.idx[k] = local_of[state];
      lc.coef[k] = v;
    }
    cons.push_back(lc);
  }
  const int m = static_cast<int>(cons.size());

  // Strictly feasible start: tau |x|^2 is strictly supermodular on any
  // sublattice (margin 2 tau per constraint).
  const double tau = 0.05;
  Eigen::VectorXd theta(nl);
  for (int k = 0; k < nl; ++k) {
    const double pc = static_cast<double>(std::popcount(members[k]));
    theta[k] = tau * pc * pc;
  }
  theta.array() -= theta[bottom_local];

  auto constraint_values = [&](const Eigen::VectorXd& th) {
    Eigen::VectorXd g(m);
    for (int u = 0; u < m; ++u) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += cons[u].coef[k] * th[cons[u].idx[k]];
      g[u] = s;
    }
    return g;
  };

  // Free coordinates exclude the pinned bottom.
  const int nf = nl - 1;
  std::vector<int> free_of_local(nl, -1);
  std::vector<int> local_of_free(nf);
  for (int k = 0, f = 0; k < nl; ++k) {
    if (k == bottom_local) continue;
    free_of_local[k] = f;
    local_of_free[f] = k;
    ++f;
  }

  auto objective = [&](const Eigen::VectorXd& th, double t, const Eigen::VectorXd& g) {
    // Minimization form: negative log-likelihood plus barrier.
    double f = -(counts.dot(th) - n * log_sum_exp(th));
    for (int u = 0; u < m; ++u) f -= std::log(g[u]) / t;
    return f;
  };

  GeneralSolution sol{ProbTable::uniform(d), closure, {}, {}, false, 0};
  int steps = 0;

  double t = options.t_initial;
  bool last_stage = m == 0 || static_cast<double>(m) / t <= options.gap;
  while (true) {
    for (int it = 0; it < options.max_newton; ++it) {
      const Eigen::VectorXd g = constraint_values(theta);
      const double lse = log_sum_exp(theta);
      const Eigen::VectorXd p = (theta.array() - lse).exp();

      Eigen::VectorXd grad(nf);
      for (int f = 0; f < nf; ++f) {
        const int k = local_of_free[f];
        grad[f] = -(counts[k] - n * p[k]);
      }
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(nf, nf);
      for (int fa = 0; fa < nf; ++fa) {
        const int ka = local_of_free[fa];
        for (int fb = 0; fb < nf; ++fb) {
          const int kb = local_of_free[fb];
          hess(fa, fb) = -n * p[ka] * p[kb];
        }
        hess(fa, fa) += n * p[ka];
      }
      for (int u = 0; u < m; ++u) {
        const double gu = g[u];
        for (int a = 0; a < 4; ++a) {
          const int fa = free_of_local[cons[u].idx[a]];
          if (fa < 0) continue;
          grad[fa] -= cons[u].coef[a] / (t * gu);
          for (int b = 0; b < 4; ++b) {
            const int fb = free_of_local[cons[u].idx[b]];
            if (fb < 0) continue;
            hess(fa, fb) += cons[u].coef[a] * cons[u].coef[b] / (t * gu * gu);
          }
        }
      }

      Eigen::LLT<Eigen::MatrixXd> llt(hess);
      Eigen::VectorXd step;
      if (llt.info() == Eigen::Success) {
        step = llt.solve(-grad);
      } else {
        hess.diagonal().array() += 1e-10 * (1.0 + hess.diagonal().maxCoeff());
        step = hess.ldlt().solve(-grad);
      }
      const double decrement = -grad.dot(step);
      if (!(decrement > 1e-14)) break;

      Eigen::VectorXd dir = Eigen::VectorXd::Zero(nl);
      for (int f = 0; f < nf; ++f) dir[local_of_free[f]] = step[f];

      // Largest feasible step, then Armijo backtracking.
      double alpha = 1.0;
      for (int u = 0; u < m; ++u) {
        double dg = 0.0;
        for (int k = 0; k < 4; ++k) dg += cons[u].coef[k] * dir[cons[u].idx[k]];
        if (dg < 0.0) alpha = std::min(alpha, -0.99 * g[u] / dg);
      }
      const double f0 = objective(theta, t, g);
      const double slope = grad.dot(step);
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        const Eigen::VectorXd cand = theta + alpha * dir;
        const Eigen::VectorXd gc = constraint_values(cand);
        if (gc.size() == 0 || gc.minCoeff() > 0.0) {
          if (objective(cand, t, gc) <= f0 + 0.25 * alpha * slope) {
            theta = cand;
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      ++steps;
      if (!accepted) break;
    }
    if (last_stage) break;
    t *= options.t_multiplier;
    last_stage = static_cast<double>(m) / t <= options.gap || t >= options.t_max;
  }

  // Assemble the table on the closure.
  const double lse = log_sum_exp(theta);
  std::vector<double> values(state_count(d), 0.0);
  for (int k = 0; k < nl; ++k) values[members[k]] = std::exp(theta[k] - lse);
  sol.p = ProbTable::from_weights(d, std::move(values));
  sol.theta.assign(state_count(d), 0.0);
  for (int k = 0; k < nl; ++k) sol.theta[members[k]] = theta[k] - theta[bottom_local];
  sol.newton_steps = steps;
  sol.certificate = certify_general(sol.p, c, options.cert_tol);
  sol.converged = sol.certificate.pass;
  return sol;
}

namespace {

std::vector<state_t> support_states(const SampleCounts& c) {
  std::vector<state_t> out;
  for (state_t s = 0; s < c.counts.size(); ++s)
    if (c.counts[s] > 0) out.push_back(s);
  return out;
}

constexpr int kClosureCrossCheckDim = 12;

}  // namespace

ExistenceCheck mle_exists_general(const SampleCounts& c) {
  const int d = c.dim;
  const std::vector<state_t> supp = support_states(c);
  ExistenceCheck out;
  if (d == 1) {
    // No pairs to inspect: full support needs both states observed.
    out.exists = supp.size() == 2;
    return out;
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      bool has_pm = false, has_mp = false;
      for (state_t s : supp) {
        const bool bi = (s >> i) & 1u, bj = (s >> j) & 1u;
        has_pm |= (bi && !bj);
        has_mp |= (!bi && bj);
        if (has_pm && has_mp) break;
      }
      if (!(has_pm && has_mp)) {
        out.exists = false;
        out.offending_pairs.push_back({i, j});
      }
    }
  if (d <= kClosureCrossCheckDim) {
    const bool closure_full = lattice_closure(c.support()).size() == state_count(d);
    if (closure_full != out.exists)
      throw std::logic_error("pairwise sign-pattern criterion disagrees with the lattice closure");
  }
  return out;
}

ExistenceCheck mle_exists_symmetric(const SampleCounts& c) {
  const int d = c.dim;
  const std::vector<state_t> supp = support_states(c);
  ExistenceCheck out;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      bool disagree = false;
      for (state_t s : supp)
        if (((s >> i) & 1u) != ((s >> j) & 1u)) {
          disagree = true;
          break;
        }
      if (!disagree) {
        out.exists = false;
        out.offending_pairs.push_back({i, j});
      }
    }
  if (d <= kClosureCrossCheckDim) {
    const bool closure_full = algebra_closure(c.support()).size() == state_count(d);
    if (closure_full != out.exists)
      throw std::logic_error("pairwise disagreement criterion disagrees with the algebra closure");
  }
  return out;
}

}  // namespace mtp2

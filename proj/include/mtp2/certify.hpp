#pragma once

#include <map>
#include <vector>

#include "mtp2/ips.hpp"
#include "mtp2/state.hpp"
#include "mtp2/table.hpp"

namespace mtp2 {

/// Finitely supported integer-valued function on the state space.
struct Imset {
  int dim = 0;
  std::map<state_t, int> entries;

  int entry_sum() const;
  /// <theta, u> for theta indexed by state mask.
  double inner(const std::vector<double>& theta_by_state) const;
};

/// +1 at context and context|{i,j}, -1 at context|{i} and context|{j}.
Imset elementary_imset(int d, int i, int j, state_t context);

/// All d(d-1)/2 * 2^(d-2) elementary imsets, in elementary_pairs order.
std::vector<Imset> elementary_imsets(int d);

/// Supermodularity generators of a sublattice: one imset per incomparable
/// pair x, y in L with both covering x^y inside L. Equals the elementary
/// family when L is the full state space.
std::vector<Imset> cover_pair_imsets(const StateSet& support);

/// Inner products of theta against every elementary imset; the minimum is the
/// primal feasibility residual.
std::vector<double> supermodularity_values(const std::vector<double>& theta_by_state, int d);

std::vector<double> imset_values(const std::vector<double>& theta_by_state,
                                 const std::vector<Imset>& gens);

struct ConeFit {
  std::vector<double> coefficients;  // one nonnegative weight per generator
  double residual = 0.0;             // Euclidean distance to the cone
};

/// Nonnegative least squares of v against the elementary-imset cone.
ConeFit cone_membership(const std::vector<double>& v, int d);
ConeFit cone_membership_over(const std::vector<double>& v, const std::vector<Imset>& gens, int d);

struct CertifyTolerances {
  double primal = 1e-8;
  double dual = 1e-7;
  double slack = 1e-7;
  double moment = 1e-7;
};

struct KktCertificate {
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double slackness_residual = 0.0;
  double moment_residual = 0.0;
  bool primal_ok = false;
  bool dual_ok = false;
  bool slackness_ok = false;
  bool moment_ok = false;
  bool support_ok = true;  // candidate support matches the sample lattice closure
  bool pass = false;
};

/// Optimality certificate for a candidate MLE in the all-distributions
/// family: supermodularity of log p, cone membership of p - empirical, and
/// the vanishing inner product between them. Full-support candidates use the
/// elementary generators; lattice-supported candidates use the cover-pair
/// generators of their support.
KktCertificate certify_general(const ProbTable& p_hat, const SampleCounts& c,
                               const CertifyTolerances& tol = {});

/// Optimality certificate for a fitted quadratic model on g:
///   primal    min_{uv in E} J_uv            (>= -tol)
///   dual      mean match and Sigma_uv >= S_uv on E  (>= -tol)
///   slackness max_{uv in E} |(Sigma_uv - S_uv) J_uv|  (<= tol)
KktCertificate certify_ising(const FitResult& result, const Moments& data, const Graph& g,
                             const CertifyTolerances& tol = {});

}  // namespace mtp2

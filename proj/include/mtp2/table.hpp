#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mtp2/matrix.hpp"
#include "mtp2/state.hpp"

namespace mtp2 {

/// Pairwise-accurate sum (error grows with log n rather than n).
double stable_sum(std::span<const double> xs);

/// Dense probability table over {-1,+1}^d, indexed by state mask.
/// Entries are nonnegative and sum to one within 1e-12.
class ProbTable {
 public:
  ProbTable(int dim, std::vector<double> values);

  static ProbTable uniform(int dim);
  /// Normalizes nonnegative weights (sum must be positive).
  static ProbTable from_weights(int dim, std::vector<double> weights);

  int dim() const { return dim_; }
  std::size_t size() const { return values_.size(); }
  double operator[](state_t s) const { return values_[s]; }
  double& operator[](state_t s) { return values_[s]; }
  const std::vector<double>& values() const { return values_; }

  void renormalize();
  StateSet support() const;   // states with strictly positive mass
  bool full_support() const;
  double max_abs_diff(const ProbTable& other) const;

 private:
  int dim_;
  std::vector<double> values_;
};

/// Integer event counts n(x) over the state space; n = sum of counts >= 1.
struct SampleCounts {
  int dim = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;

  SampleCounts() = default;
  SampleCounts(int dim, std::vector<std::uint64_t> counts);
  static SampleCounts from_observations(int dim, const std::vector<state_t>& rows);

  ProbTable empirical() const;
  StateSet support() const;
};

/// First and second sample/model moments; the second-moment matrix has unit
/// diagonal by construction.
struct Moments {
  std::vector<double> mean;  // in [-1,1]^d
  Matrix second;             // d x d symmetric, diag = 1

  int dim() const { return static_cast<int>(mean.size()); }
  double covariance(int i, int j) const { return second(i, j) - mean[i] * mean[j]; }
  Matrix covariance() const;
};

/// Distribution (or shifted pseudo-distribution) of a coordinate pair.
struct PairMargin {
  double pp = 0;  // q(+1,+1)
  double pm = 0;  // q(+1,-1)
  double mp = 0;  // q(-1,+1)
  double mm = 0;  // q(-1,-1)

  double& entry(bool i_plus, bool j_plus);
  double entry(bool i_plus, bool j_plus) const;
  double sum() const { return pp + pm + mp + mm; }
  double min_entry() const;
};

Moments moments_from_counts(const SampleCounts& c);
Moments moments_from_table(const ProbTable& p);

PairMargin pair_margin(const ProbTable& p, int i, int j);

/// e_ij(1,1) = (1 + mean_i + mean_j + M_ij)/4 and the three companions.
/// Throws std::domain_error if the moments are inconsistent (negative cell).
PairMargin empirical_pair(const Moments& m, int i, int j);

struct Mtp2Violation {
  state_t x = 0, y = 0;
  double deficit = 0;  // p(x)p(y) - p(x^y)p(x|y) > tol
};

struct Mtp2Check {
  bool ok = true;
  std::vector<Mtp2Violation> violations;
};

/// Checks p(x^y) p(x|y) >= p(x) p(y) - tol. Elementary pairs suffice for
/// strictly positive tables; otherwise all support pairs are checked.
Mtp2Check is_mtp2(const ProbTable& p, double tol = 1e-9);

bool support_is_lattice(const ProbTable& p);

/// True iff every pair margin has four positive cells.
bool pair_support_full(const ProbTable& p);

/// Sum of n(x) log p(x); -inf if any observed state has zero mass.
double log_likelihood(const ProbTable& p, const SampleCounts& c);

/// n^s(x) = n(x) + n(-x); the result is sign-flip invariant with total 2n.
SampleCounts symmetrize(const SampleCounts& c);

/// Product distribution p(x) = 2^-d prod_v (1 + x_v mu_v); requires |mu_v| < 1.
ProbTable independence_table(const std::vector<double>& mu);

/// Marginal over the coordinates in `keep` (ascending, nonempty).
ProbTable marginal_table(const ProbTable& p, const std::vector<int>& keep);

/// Conditional given coordinates `given` fixed to the signs encoded in
/// `given_bits` (bit k of given_bits refers to given[k]).
ProbTable conditional_table(const ProbTable& p, const std::vector<int>& given, state_t given_bits);

}  // namespace mtp2

#include "mtp2/table.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mtp2 {

namespace {
constexpr double kSumTol = 1e-12;

double sign_of(state_t s, int i) { return (s >> i) & 1u ? 1.0 : -1.0; }
}  // namespace

double stable_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return stable_sum(xs.first(half)) + stable_sum(xs.subspan(half));
}

ProbTable::ProbTable(int dim, std::vector<double> values) : dim_(dim), values_(std::move(values)) {
  if (values_.size() != state_count(dim)) throw std::invalid_argument("probability table has wrong length");
  for (double v : values_)
    if (!(v >= 0.0)) throw std::invalid_argument("probability table entry negative or NaN");
  const double s = stable_sum(values_);
  if (std::abs(s - 1.0) > kSumTol)
    throw std::invalid_argument("probability table sums to " + std::to_string(s) + ", not 1");
}

ProbTable ProbTable::uniform(int dim) {
  const std::size_t n = state_count(dim);
  return ProbTable(dim, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbTable ProbTable::from_weights(int dim, std::vector<double> weights) {
  if (weights.size() != state_count(dim)) throw std::invalid_argument("weight vector has wrong length");
  for (double w : weights)
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
  const double s = stable_sum(weights);
  if (!(s > 0.0)) throw std::invalid_argument("weights sum to zero");
  for (double& w : weights) w /= s;
  ProbTable p(dim, std::move(weights));
  p.renormalize();
  return p;
}

void ProbTable::renormalize() {
  const double s = stable_sum(values_);
  if (!(s > 0.0)) throw std::runtime_error("cannot renormalize a zero table");
  for (double& v : values_) v /= s;
}

StateSet ProbTable::support() const {
  StateSet out;
  out.dim = dim_;
  for (state_t s = 0; s < values_.size(); ++s)
    if (values_[s] > 0.0) out.members.insert(s);
  return out;
}

bool ProbTable::full_support() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

double ProbTable::max_abs_diff(const ProbTable& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("dimension mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k)
    m = std::max(m, std::abs(values_[k] - other.values_[k]));
  return m;
}

SampleCounts::SampleCounts(int dim_in, std::vector<std::uint64_t> counts_in)
    : dim(dim_in), counts(std::move(counts_in)) {
  if (counts.size() != state_count(dim)) throw std::invalid_argument("count vector has wrong length");
  n = 0;
  for (std::uint64_t c : counts) {
    if (n > std::numeric_limits<std::uint64_t>::max() - c) throw std::overflow_error("sample counts overflow");
    n += c;
  }
  if (n == 0) throw std::invalid_argument("sample is empty");
}

SampleCounts SampleCounts::from_observations(int dim, const std::vector<state_t>& rows) {
  std::vector<std::uint64_t> counts(state_count(dim), 0);
  for (state_t s : rows) {
    if (s > full_mask(dim)) throw std::invalid_argument("observation out of range");
    ++counts[s];
  }
  return SampleCounts(dim, std::move(counts));
}

ProbTable SampleCounts::empirical() const {
  std::vector<double> v(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s)
    v[s] = static_cast<double>(counts[s]) / static_cast<double>(n);
  return ProbTable(dim, std::move(v));
}

StateSet SampleCounts::support() const {
  StateSet out;
  out.dim = dim;
  for (state_t s = 0; s < counts.size(); ++s)
    if (counts[s] > 0) out.members.insert(s);
  return out;
}

Matrix Moments::covariance() const {
  const int d = dim();
  Matrix s(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s(i, j) = covariance(i, j);
  return s;
}

double& PairMargin::entry(bool i_plus, bool j_plus) {
  if (i_plus) return j_plus ? pp : pm;
  return j_plus ? mp : mm;
}

double PairMargin::entry(bool i_plus, bool j_plus) const {
  if (i_plus) return j_plus ? pp : pm;
  return j_plus ? mp : mm;
}

double PairMargin::min_entry() const { return std::min(std::min(pp, pm), std::min(mp, mm)); }

Moments moments_from_counts(const SampleCounts& c) {
  const int d = c.dim;
  Moments m;
  m.mean.assign(d, 0.0);
  m.second = Matrix::identity(d);
  for (state_t s = 0; s < c.counts.size(); ++s) {
    if (c.counts[s] == 0) continue;
    const double w = static_cast<double>(c.counts[s]);
    for (int i = 0; i < d; ++i) {
      const double xi = sign_of(s, i);
      m.mean[i] += w * xi;
      for (int j = i + 1; j < d; ++j) m.second(i, j) += w * xi * sign_of(s, j);
    }
  }
  const double n = static_cast<double>(c.n);
  for (int i = 0; i < d; ++i) {
    m.mean[i] /= n;
    for (int j = i + 1; j < d; ++j) {
      m.second(i, j) /= n;
      m.second(j, i) = m.second(i, j);
    }
  }
  return m;
}

Moments moments_from_table(const ProbTable& p) {
  const int d = p.dim();
  Moments m;
  m.mean.assign(d, 0.0);
  m.second = Matrix::identity(d);
  std::vector<double> acc(d * (d - 1) / 2, 0.0);
  for (state_t s = 0; s < p.size(); ++s) {
    const double w = p[s];
    if (w == 0.0) continue;
    int k = 0;
    for (int i = 0; i < d; ++i) {
      const double xi = sign_of(s, i);
      m.mean[i] += w * xi;
      for (int j = i + 1; j < d; ++j, ++k) acc[k] += w * xi * sign_of(s, j);
    }
  }
  int k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j, ++k) {
      m.second(i, j) = acc[k];
      m.second(j, i) = acc[k];
    }
  return m;
}

namespace {
void check_pair_indices(int d, int i, int j) {
  if (i < 0 || j < 0 || i >= d || j >= d || i == j)
    throw std::invalid_argument("invalid coordinate pair");
}
}  // namespace

PairMargin pair_margin(const ProbTable& p, int i, int j) {
  check_pair_indices(p.dim(), i, j);
  PairMargin q;
  for (state_t s = 0; s < p.size(); ++s)
    q.entry((s >> i) & 1u, (s >> j) & 1u) += p[s];
  return q;
}

PairMargin empirical_pair(const Moments& m, int i, int j) {
  check_pair_indices(m.dim(), i, j);
  const double xi = m.mean[i], xj = m.mean[j], mij = m.second(i, j);
  PairMargin e;
  e.pp = (1.0 + xi + xj + mij) / 4.0;
  e.pm = (1.0 + xi - xj - mij) / 4.0;
  e.mp = (1.0 - xi + xj - mij) / 4.0;
  e.mm = (1.0 - xi - xj + mij) / 4.0;
  for (double* v : {&e.pp, &e.pm, &e.mp, &e.mm}) {
    if (*v < -1e-12) throw std::domain_error("inconsistent moments: empirical pair cell negative");
    if (*v < 0.0) *v = 0.0;
  }
  return e;
}

Mtp2Check is_mtp2(const ProbTable& p, double tol) {
  Mtp2Check out;
  const int d = p.dim();
  if (d < 2) return out;
  auto record = [&](state_t x, state_t y, double deficit) {
    out.ok = false;
    out.violations.push_back({x, y, deficit});
  };
  if (p.full_support()) {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const state_t bi = state_t{1} << i, bj = state_t{1} << j;
        for (state_t s = 0; s < p.size(); ++s) {
          if (s & (bi | bj)) continue;  // s ranges over contexts
          const double lhs = p[s] * p[s | bi | bj];
          const double rhs = p[s | bi] * p[s | bj];
          if (lhs < rhs - tol) record(s | bi, s | bj, rhs - lhs);
        }
      }
  } else {
    std::vector<state_t> supp;
    for (state_t s = 0; s < p.size(); ++s)
      if (p[s] > 0.0) supp.push_back(s);
    // Pairs with a zero-mass member hold trivially, so only support pairs
    // need checking; guard the quadratic loop for huge supports.
    if (supp.size() > (std::size_t{1} << 14))
      throw std::invalid_argument(
          "support too large for the dense pairwise check (only strictly positive "
          "tables admit the elementary-pair shortcut)");
    for (std::size_t a = 0; a < supp.size(); ++a)
      for (std::size_t b = a + 1; b < supp.size(); ++b) {
        const state_t x = supp[a], y = supp[b];
        const state_t lo = x & y, hi = x | y;
        if (lo == x || lo == y) continue;  // comparable pairs are trivial
        const double lhs = p[lo] * p[hi];
        const double rhs = p[x] * p[y];
        if (lhs < rhs - tol) record(x, y, rhs - lhs);
      }
  }
  return out;
}

bool support_is_lattice(const ProbTable& p) {
  std::vector<state_t> supp;
  for (state_t s = 0; s < p.size(); ++s)
    if (p[s] > 0.0) supp.push_back(s);
  for (std::size_t a = 0; a < supp.size(); ++a)
    for (std::size_t b = a + 1; b < supp.size(); ++b) {
      if (!(p[supp[a] & supp[b]] > 0.0)) return false;
      if (!(p[supp[a] | supp[b]] > 0.0)) return false;
    }
  return true;
}

bool pair_support_full(const ProbTable& p) {
  const int d = p.dim();
  if (d < 2) return p.full_support();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (!(pair_margin(p, i, j).min_entry() > 0.0)) return false;
  return true;
}

double log_likelihood(const ProbTable& p, const SampleCounts& c) {
  if (p.dim() != c.dim) throw std::invalid_argument("dimension mismatch");
  double ll = 0.0;
  for (state_t s = 0; s < c.counts.size(); ++s) {
    if (c.counts[s] == 0) continue;
    if (!(p[s] > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += static_cast<double>(c.counts[s]) * std::log(p[s]);
  }
  return ll;
}

SampleCounts symmetrize(const SampleCounts& c) {
  const state_t full = full_mask(c.dim);
  std::vector<std::uint64_t> out(c.counts.size());
  for (state_t s = 0; s < c.counts.size(); ++s) {
    const std::uint64_t a = c.counts[s], b = c.counts[~s & full];
    if (a > std::numeric_limits<std::uint64_t>::max() - b) throw std::overflow_error("symmetrize overflow");
    out[s] = a + b;
  }
  return SampleCounts(c.dim, std::move(out));
}

ProbTable independence_table(const std::vector<double>& mu) {
  const int d = static_cast<int>(mu.size());
  ensure_dim(d);
  for (double m : mu)
    if (!(std::abs(m) < 1.0)) throw std::invalid_argument("independence table needs |mu_v| < 1");
  std::vector<double> v(state_count(d));
  for (state_t s = 0; s < v.size(); ++s) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) w *= (1.0 + sign_of(s, i) * mu[i]) / 2.0;
    v[s] = w;
  }
  ProbTable p(d, std::move(v));
  p.renormalize();
  return p;
}

ProbTable marginal_table(const ProbTable& p, const std::vector<int>& keep) {
  const int d = p.dim();
  if (keep.empty()) throw std::invalid_argument("marginal needs at least one coordinate");
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= d) throw std::invalid_argument("marginal coordinate out of range");
    if (k > 0 && keep[k] <= keep[k - 1]) throw std::invalid_argument("marginal coordinates must be ascending");
  }
  const int dm = static_cast<int>(keep.size());
  std::vector<double> v(state_count(dm), 0.0);
  for (state_t s = 0; s < p.size(); ++s) {
    state_t t = 0;
    for (int k = 0; k < dm; ++k)
      if ((s >> keep[k]) & 1u) t |= state_t{1} << k;
    v[t] += p[s];
  }
  ProbTable out(dm, std::move(v));
  out.renormalize();
  return out;
}

ProbTable conditional_table(const ProbTable& p, const std::vector<int>& given, state_t given_bits) {
  const int d = p.dim();
  if (given.empty()) throw std::invalid_argument("conditional needs at least one coordinate");
  std::vector<int> rest;
  state_t given_mask = 0, value_mask = 0;
  for (std::size_t k = 0; k < given.size(); ++k) {
    if (given[k] < 0 || given[k] >= d) throw std::invalid_argument("conditional coordinate out of range");
    given_mask |= state_t{1} << given[k];
    if ((given_bits >> k) & 1u) value_mask |= state_t{1} << given[k];
  }
  for (int v = 0; v < d; ++v)
    if (!((given_mask >> v) & 1u)) rest.push_back(v);
  if (rest.empty()) throw std::invalid_argument("conditional leaves no free coordinates");
  const int dr = static_cast<int>(rest.size());
  std::vector<double> v(state_count(dr), 0.0);
  double mass = 0.0;
  for (state_t s = 0; s < p.size(); ++s) {
    if ((s & given_mask) != value_mask) continue;
    state_t t = 0;
    for (int k = 0; k < dr; ++k)
      if ((s >> rest[k]) & 1u) t |= state_t{1} << k;
    v[t] += p[s];
    mass += p[s];
  }
  if (!(mass > 0.0)) throw std::domain_error("conditioning event has zero probability");
  for (double& x : v) x /= mass;
  ProbTable out(dr, std::move(v));
  out.renormalize();
  return out;
}

}  // namespace mtp2

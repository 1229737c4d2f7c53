#include "mtp2/ising.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mtp2 {

IsingParams::IsingParams(std::vector<double> h_in, Matrix j_in)
    : h(std::move(h_in)), j(std::move(j_in)) {
  const int d = dim();
  ensure_dim(d);
  if (j.rows() != d || j.cols() != d) throw std::invalid_argument("interaction matrix has wrong shape");
  if (!j.symmetric(0.0)) throw std::invalid_argument("interaction matrix must be symmetric");
  for (int i = 0; i < d; ++i)
    if (j(i, i) != 0.0) throw std::invalid_argument("interaction matrix must have zero diagonal");
}

Graph::Graph(int d, std::vector<Edge> edges) : d_(d) {
  ensure_dim(d);
  std::set<Edge> dedup;
  for (auto [i, j] : edges) {
    if (i == j) throw std::invalid_argument("graph has a self-loop");
    if (i < 0 || j < 0 || i >= d || j >= d) throw std::invalid_argument("graph vertex out of range");
    dedup.insert({std::min(i, j), std::max(i, j)});
  }
  edges_.assign(dedup.begin(), dedup.end());
}

Graph Graph::complete(int d) {
  std::vector<Edge> e;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) e.push_back({i, j});
  return Graph(d, std::move(e));
}

bool Graph::has_edge(int i, int j) const {
  const Edge e{std::min(i, j), std::max(i, j)};
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

namespace {

double sign_of(state_t s, int i) { return (s >> i) & 1u ? 1.0 : -1.0; }

std::vector<double> log_weights(const IsingParams& theta) {
  const int d = theta.dim();
  std::vector<double> lw(state_count(d));
  for (state_t s = 0; s < lw.size(); ++s) {
    double v = 0.0;
    for (int i = 0; i < d; ++i) {
      const double xi = sign_of(s, i);
      v += theta.h[i] * xi;
      for (int j = i + 1; j < d; ++j) v += theta.j(i, j) * xi * sign_of(s, j);
    }
    lw[s] = v;
  }
  return lw;
}

}  // namespace

double log_normalizer(const IsingParams& theta) {
  const std::vector<double> lw = log_weights(theta);
  const double m = *std::max_element(lw.begin(), lw.end());
  std::vector<double> e(lw.size());
  for (std::size_t s = 0; s < lw.size(); ++s) e[s] = std::exp(lw[s] - m);
  return m + std::log(stable_sum(e));
}

ProbTable table_from_params(const IsingParams& theta) {
  const std::vector<double> lw = log_weights(theta);
  const double m = *std::max_element(lw.begin(), lw.end());
  std::vector<double> w(lw.size());
  for (std::size_t s = 0; s < lw.size(); ++s) w[s] = std::exp(lw[s] - m);
  return ProbTable::from_weights(theta.dim(), std::move(w));
}

double interaction_from_table(const ProbTable& p, int i, int j, state_t context) {
  const int d = p.dim();
  if (i < 0 || j < 0 || i >= d || j >= d || i == j) throw std::invalid_argument("invalid coordinate pair");
  const state_t bi = state_t{1} << i, bj = state_t{1} << j;
  if (context & (bi | bj)) throw std::invalid_argument("context must not assign the pair coordinates");
  if (context > full_mask(d)) throw std::invalid_argument("context out of range");
  const double lo = p[context], hi = p[context | bi | bj];
  const double x = p[context | bi], y = p[context | bj];
  if (!(lo > 0.0 && hi > 0.0 && x > 0.0 && y > 0.0))
    throw std::domain_error("zero probability in log-odds context");
  return 0.25 * std::log(hi * lo / (x * y));
}

double field_from_table(const ProbTable& p, int i) {
  const int d = p.dim();
  if (i < 0 || i >= d) throw std::invalid_argument("coordinate out of range");
  const state_t top = full_mask(d);
  const state_t x = top, y = top ^ (state_t{1} << i);
  const state_t nx = 0, ny = state_t{1} << i;
  if (!(p[x] > 0.0 && p[y] > 0.0 && p[nx] > 0.0 && p[ny] > 0.0))
    throw std::domain_error("zero probability in field reference states");
  return 0.25 * std::log(p[x] * p[ny] / (p[nx] * p[y]));
}

ParamsExtraction params_from_table(const ProbTable& p, double tol) {
  if (!p.full_support()) throw std::domain_error("parameter extraction needs full support");
  const int d = p.dim();
  ParamsExtraction out{IsingParams(d), false, 0.0};
  for (int i = 0; i < d; ++i) out.params.h[i] = field_from_table(p, i);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double v = interaction_from_table(p, i, j);
      out.params.j(i, j) = v;
      out.params.j(j, i) = v;
    }
  const ProbTable rebuilt = table_from_params(out.params);
  out.max_dev = p.max_abs_diff(rebuilt);
  out.is_ising = out.max_dev <= tol;
  return out;
}

bool is_mtp2_params(const IsingParams& theta, double tol) {
  const int d = theta.dim();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (theta.j(i, j) < -tol) return false;
  return true;
}

}  // namespace mtp2

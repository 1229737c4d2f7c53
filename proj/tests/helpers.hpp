#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "mtp2/ising.hpp"
#include "mtp2/table.hpp"

namespace testutil {

using mtp2::Graph;
using mtp2::IsingParams;
using mtp2::Matrix;
using mtp2::ProbTable;
using mtp2::SampleCounts;
using mtp2::state_t;

// Moussouris 8-point sample (d = 4): masks under the bit i <=> x_{i+1} = +1
// convention.
inline SampleCounts moussouris_sample() {
  const std::vector<state_t> pts{0b0000, 0b0001, 0b0011, 0b0111, 0b1000, 0b1100, 0b1110, 0b1111};
  return SampleCounts::from_observations(4, pts);
}

// Its constrained MLE: 128 * p over the 16 states in mask order.
inline std::vector<double> moussouris_mle_128() {
  return {27, 9, 3, 9, 3, 1, 3, 9, 9, 3, 1, 3, 9, 3, 9, 27};
}

inline ProbTable moussouris_mle_table() {
  std::vector<double> v = moussouris_mle_128();
  for (double& x : v) x /= 128.0;
  return ProbTable(4, std::move(v));
}

inline Graph four_cycle() { return Graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}); }
inline Graph four_chain() { return Graph(4, {{0, 1}, {1, 2}, {2, 3}}); }

// Counts of the d = 3 worked example: (empty:2, {1}:1, {2}:0, {3}:3,
// {12}:2, {13}:0, {23}:4, {123}:1), n = 13.
inline SampleCounts example23_counts() {
  std::vector<std::uint64_t> c(8, 0);
  c[0b000] = 2;
  c[0b001] = 1;
  c[0b010] = 0;
  c[0b100] = 3;
  c[0b011] = 2;
  c[0b101] = 0;
  c[0b110] = 4;
  c[0b111] = 1;
  return SampleCounts(3, std::move(c));
}

// Its MLE: 182 * p in mask order.
inline std::vector<double> example23_mle_182() {
  std::vector<double> v(8, 0.0);
  v[0b000] = 35;
  v[0b001] = 7;
  v[0b010] = 16;
  v[0b100] = 35;
  v[0b011] = 12;
  v[0b101] = 7;
  v[0b110] = 40;
  v[0b111] = 30;
  return v;
}

inline IsingParams random_params(int d, std::mt19937_64& rng, double scale = 1.0,
                                 bool nonnegative = false) {
  std::uniform_real_distribution<double> u(-scale, scale);
  IsingParams th(d);
  for (int i = 0; i < d; ++i) th.h[i] = nonnegative ? 0.0 : u(rng);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      double v = u(rng);
      if (nonnegative) v = std::abs(v);
      th.j(i, j) = v;
      th.j(j, i) = v;
    }
  if (!nonnegative)
    for (int i = 0; i < d; ++i) th.h[i] = u(rng);
  return th;
}

inline IsingParams random_mtp2_params(int d, std::mt19937_64& rng, double scale = 1.0,
                                      bool with_field = true) {
  std::uniform_real_distribution<double> u(0.0, scale);
  std::uniform_real_distribution<double> uh(-scale, scale);
  IsingParams th(d);
  for (int i = 0; i < d; ++i) th.h[i] = with_field ? uh(rng) : 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double v = u(rng);
      th.j(i, j) = v;
      th.j(j, i) = v;
    }
  return th;
}

inline SampleCounts random_counts(int d, int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<state_t> u(0, static_cast<state_t>((1u << d) - 1));
  std::vector<state_t> rows;
  rows.reserve(n);
  for (int k = 0; k < n; ++k) rows.push_back(u(rng));
  return SampleCounts::from_observations(d, rows);
}

// Rejection-samples counts until every coordinate pair shows both mixed sign
// patterns (so a full-support estimate exists).
inline SampleCounts random_counts_with_mle(int d, int n, std::mt19937_64& rng);

inline bool all_pairs_mixed(const SampleCounts& c) {
  for (int i = 0; i < c.dim; ++i)
    for (int j = i + 1; j < c.dim; ++j) {
      bool pm = false, mp = false;
      for (state_t s = 0; s < c.counts.size(); ++s) {
        if (c.counts[s] == 0) continue;
        const bool bi = (s >> i) & 1u, bj = (s >> j) & 1u;
        pm |= (bi && !bj);
        mp |= (!bi && bj);
      }
      if (!pm || !mp) return false;
    }
  return true;
}

inline SampleCounts random_counts_with_mle(int d, int n, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    SampleCounts c = random_counts(d, n, rng);
    if (all_pairs_mixed(c)) return c;
  }
  throw std::runtime_error("could not draw a sample admitting a full-support estimate");
}

// A model with integer weights: per edge uv the weight multiplies by k_uv
// when x_u = x_v, per vertex v by m_v when x_v = +1. This lies in the
// quadratic family with J_uv = log(k_uv)/2 and h_v = log(m_v)/2, and the
// normalized table is rational, so counts = weights makes the empirical
// distribution an exact family member.
inline SampleCounts integer_ising_counts(int d, const std::vector<std::pair<int, int>>& edges,
                                         const std::vector<std::uint64_t>& edge_weight,
                                         const std::vector<std::uint64_t>& vertex_weight) {
  std::vector<std::uint64_t> counts(std::size_t{1} << d, 0);
  for (state_t s = 0; s < counts.size(); ++s) {
    std::uint64_t w = 1;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto [i, j] = edges[e];
      if (((s >> i) & 1u) == ((s >> j) & 1u)) w *= edge_weight[e];
    }
    for (int v = 0; v < d; ++v)
      if ((s >> v) & 1u) w *= vertex_weight[v];
    counts[s] = w;
  }
  return SampleCounts(d, std::move(counts));
}

}  // namespace testutil

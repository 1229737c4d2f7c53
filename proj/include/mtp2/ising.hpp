#pragma once

#include <utility>
#include <vector>

#include "mtp2/matrix.hpp"
#include "mtp2/table.hpp"

namespace mtp2 {

/// Canonical parameters of the quadratic binary family
/// p(x) = exp(h'x + x'Jx/2 - A(h,J)); J symmetric with zero diagonal.
struct IsingParams {
  std::vector<double> h;
  Matrix j;

  explicit IsingParams(int d) : h(d, 0.0), j(d, d, 0.0) {}
  IsingParams(std::vector<double> h_in, Matrix j_in);
  int dim() const { return static_cast<int>(h.size()); }
};

class Graph {
 public:
  using Edge = std::pair<int, int>;  // 0-indexed, first < second

  Graph(int d, std::vector<Edge> edges);
  static Graph complete(int d);

  int dim() const { return d_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(int i, int j) const;

 private:
  int d_;
  std::vector<Edge> edges_;
};

/// A(h,J) = log sum_x exp(h'x + x'Jx/2), evaluated with a max shift.
double log_normalizer(const IsingParams& theta);

ProbTable table_from_params(const IsingParams& theta);

/// Quarter log-odds (1/4) log[ p(x v y) p(x ^ y) / (p(x) p(y)) ] for the
/// elementary pair over {i,j} in the given context (bits of coordinates
/// other than i and j; default all -1). Equals J_ij whenever p is in the
/// quadratic family.
double interaction_from_table(const ProbTable& p, int i, int j, state_t context = 0);

/// Quarter log-ratio recovering h_i, using the all-plus reference state.
double field_from_table(const ProbTable& p, int i);

struct ParamsExtraction {
  IsingParams params;
  bool is_ising = false;  // reconstruction reproduces p within tolerance
  double max_dev = 0.0;   // max-norm gap between p and its reconstruction
};

/// Extracts (h, J) from a full-support table via the reference contexts and
/// reports whether the table actually lies in the quadratic family.
ParamsExtraction params_from_table(const ProbTable& p, double tol = 1e-7);

/// True iff all off-diagonal interactions are >= -tol.
bool is_mtp2_params(const IsingParams& theta, double tol = 1e-9);

}  // namespace mtp2

#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtp2/ising.hpp"
#include "mtp2/table.hpp"

namespace mtp2 {

/// Raised when the data provably admit no full-support estimate
/// (a pair margin misses a sign pattern, or a mean sits on the boundary).
class MleNotExists : public std::runtime_error {
 public:
  MleNotExists(std::string what, std::vector<Graph::Edge> edges, std::vector<int> vertices)
      : std::runtime_error(std::move(what)),
        offending_edges(std::move(edges)),
        offending_vertices(std::move(vertices)) {}

  std::vector<Graph::Edge> offending_edges;
  std::vector<int> offending_vertices;
};

struct PreflightResult {
  bool ok = true;
  std::vector<Graph::Edge> offending_edges;
};

/// True iff every sample edge margin has both of (+1,-1) and (-1,+1)
/// represented; failures carry the violating edges.
PreflightResult preflight_existence(const SampleCounts& c, const Graph& g);

struct FitOptions {
  int max_sweeps = 10000;
  double stagnation_tol = 1e-14;  // max-norm change of the table per sweep
};

struct FitResult {
  ProbTable p;
  Graph graph_hat;           // (V, E-hat), the fitted edge set
  IsingParams params;
  std::vector<double> mu;    // fitted means
  Matrix xi;                 // fitted second moments (unit diagonal)
  int sweeps = 0;
  bool converged = false;
};

/// Solver state for one fitting run. `target` holds the data-side moments
/// the updates match against (zero mean in the palindromic mode).
struct IpsState {
  ProbTable p;
  Graph graph;
  Moments target;
  std::vector<Graph::Edge> e_plus;   // edges with positive sample covariance
  std::set<Graph::Edge> e_hat;
  double epsilon = 1e-10;
  int sweeps = 0;
  bool clamp = true;       // false: classical proportional fitting
  bool symmetric = false;  // palindromic family (h = 0)
};

IpsState ips_init(const SampleCounts& c, const Graph& g, double epsilon);
IpsState ips_init_symmetric(const SampleCounts& c, const Graph& g, double epsilon);

/// Delta of a margin pair: (1/4) log of the cross ratio of q = e / p_ij.
double pair_delta(const PairMargin& p_ij, const PairMargin& e);
double delta_ij(const ProbTable& p, const PairMargin& e, int i, int j);

/// Delta of the lambda-shifted target e*(lambda); strictly increasing in
/// lambda on [0, 4 min(e.pm, e.mp)).
double delta_shifted(const PairMargin& p_ij, const PairMargin& e, double lambda);

/// Shift of e by +-lambda/4 on the diagonal/off-diagonal cells.
PairMargin shift_margin(const PairMargin& e, double lambda);

/// Solves delta(lambda) = -j_ij in closed form (positive root of the induced
/// quadratic). Requires delta(0) <= -j_ij; the boundary case returns 0.
double solve_lambda_star(const PairMargin& p_ij, const PairMargin& e, double j_ij);
double solve_lambda_star(const ProbTable& p, const PairMargin& e, int i, int j, double j_ij);

/// Palindromic specialization: delta as a function of the second-moment shift.
double delta_sym_shifted(const PairMargin& p_ij, double m_ij, double lambda);
double solve_lambda_symmetric(const PairMargin& p_ij, double m_ij, double j_ij);

/// One edge visit: either the proportional update toward e_ij (adding ij to
/// E-hat) or the clamped update toward e*_ij (removing it).
void ips_update_inplace(IpsState& s, int i, int j);
IpsState ips_update(IpsState s, int i, int j);

/// MLE under the nonnegative-interaction constraint on graph g.
FitResult fit(const SampleCounts& c, const Graph& g, double epsilon = 1e-10,
              const FitOptions& options = {});

/// MLE in the palindromic (h = 0) family under the same constraint.
FitResult fit_symmetric(const SampleCounts& c, const Graph& g, double epsilon = 1e-10,
                        const FitOptions& options = {});

/// Classical proportional fitting on g with no sign constraint; used to check
/// that the constrained solution is the unconstrained MLE on its own face.
FitResult fit_classical(const SampleCounts& c, const Graph& g, double epsilon = 1e-10,
                        const FitOptions& options = {});

}  // namespace mtp2

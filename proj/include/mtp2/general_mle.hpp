#pragma once

#include <vector>

#include "mtp2/certify.hpp"
#include "mtp2/table.hpp"

namespace mtp2 {

struct GeneralOptions {
  double gap = 1e-11;          // stop once (#constraints)/t drops below this
  double t_initial = 1.0;
  double t_multiplier = 4.0;
  double t_max = 1e15;
  int max_newton = 200;        // inner iterations per barrier stage
  CertifyTolerances cert_tol{};
};

struct GeneralSolution {
  ProbTable p;
  StateSet support;            // lattice closure of the observed states
  std::vector<double> theta;   // log p normalized at the support bottom; 0 off support
  KktCertificate certificate;
  bool converged = false;
  int newton_steps = 0;
};

/// MLE over all totally positive distributions: maximizes sum n(x) log p(x)
/// subject to the supermodularity constraints, on the support dictated by the
/// lattice closure of the sample. The returned table carries the optimality
/// certificate that defines success.
GeneralSolution solve_general(const SampleCounts& c, const GeneralOptions& options = {});

struct ExistenceCheck {
  bool exists = true;
  std::vector<std::pair<int, int>> offending_pairs;  // 0-indexed
};

/// Existence of a full-support estimate: every coordinate pair shows both of
/// the sign patterns (+1,-1) and (-1,+1). Cross-checked against the lattice
/// closure for small d.
ExistenceCheck mle_exists_general(const SampleCounts& c);

/// Symmetric-family variant: every pair disagrees somewhere in the sample.
/// Cross-checked against the sign-flip algebra closure for small d.
ExistenceCheck mle_exists_symmetric(const SampleCounts& c);

}  // namespace mtp2

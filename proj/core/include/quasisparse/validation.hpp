#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "quasisparse/fraction_penalty.hpp"

namespace quasisparse {

namespace reference {

// Direct evaluation of (beta - gamma)^2 + lambda * a|beta|/(a|beta| + 1),
// written out locally so this oracle shares no code with the closed-form
// prox path it is used to check.
double objective(double a, double lambda, double beta, double gamma);

struct GridMinimum {
  double argmin;
  double value;
};

// Brute-force minimizer of the scalar objective over a sign-reflected grid
// of the given step. Ties resolve toward the smaller |beta|, matching the
// convention that exact threshold ties shrink to zero.
GridMinimum grid_search_prox(double a, double lambda, double gamma,
                             double step);

// Two-stage refinement: a coarse pass over [0, |gamma|], then fine passes
// in one coarse cell around the coarse argmin and around zero (the two
// basins the prox can land in). Resolves the argmin to ~`fine`.
GridMinimum refined_grid_prox(double a, double lambda, double gamma,
                              double coarse = 1e-3, double fine = 1e-6);

}  // namespace reference

struct ValidationOptions {
  int samples = 1000;              // random (a, lambda, gamma) probes
  std::uint64_t seed = 7151;       // probe-sampling seed
  double grid_step = 1e-4;         // oracle grid resolution
  double objective_slack = 1e-6;   // closed form may beat the grid by this
  double argmin_tol = 1e-3;        // argmin agreement away from the threshold
  double boundary_margin = 1e-3;   // skip argmin check within this of t*
  // Replaces the closed-form prox under test; used for fault injection.
  std::function<double(const PenaltyParams&, double)> prox_override;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  long samples = 0;
  double max_gap = 0.0;               // worst violation measure seen
  std::vector<std::string> failures;  // first few failing probes
};

struct ValidationReport {
  bool passed = false;
  std::vector<CheckResult> checks;
};

// Self-contained correctness audit of the penalty/prox layer and the
// operator adjoints: closed-form prox vs. grid oracle, threshold-regime
// continuity and ordering, arccos domain safety, adjoint identities.
ValidationReport run_validation(const ValidationOptions& opts = {});

std::string validation_report_to_json(const ValidationReport& report);

}  // namespace quasisparse

#pragma once

#include <string>
#include <vector>

#include "nlf/games.hpp"

// Numerical verification suites for the operational equalities on
// two-qubit instances; each runs a batch of seeded checks and aggregates
// pass counts and worst residuals. Instance fan-out across worker threads is
// capped by the NONLOCALITY_FORGE_THREADS environment variable.

namespace nlf::verify {

struct InstanceResult {
  std::string label;
  bool passed = true;
  double residual = 0.0;
  double solver_gap = 0.0;        // worst duality gap among the solves
  double cert_residual = 0.0;     // worst certificate-identity residual
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  bool passed = true;
  int total = 0;
  int failed = 0;
  double max_residual = 0.0;
  double wall_seconds = 0.0;
  std::vector<InstanceResult> instances;
};

/// Result 1 instances: Bell/Bell/phi+, Bell/Bell/isotropic(0.5, 0.8, 1.0),
/// plus `extra_free` seeded free fixtures expecting ratio 1.
SuiteResult run_result1(int extra_free, double tol);

/// Result 2: RoT of the Alice-Bell instrument equals RoBN with Bob = Bell.
SuiteResult run_result2(int seeds, double tol);

/// Result 4: RoBN with Bell/Bell measurements equals RoE, mixed ranks 1-4.
SuiteResult run_result4(int seeds, double tol);

/// Result 6 forward direction on seeded (measurement, subroutine, ensemble)
/// triples: simulation never increases a DSD score.
SuiteResult run_result6(int triples, double tol);

/// Result 7 on the bundled fixture family: min-accessible info equals
/// log2(1 + RoBN), witness attainment within 1e-4.
SuiteResult run_result7(double tol);

/// Faithfulness / convexity / monotonicity battery.
SuiteResult run_properties(int monotonicity, int convexity_pairs, int faithfulness, double tol);

SuiteResult run_suite_by_name(const std::string& name, int seeds, int dims, double tol);

int worker_cap();

}  // namespace nlf::verify

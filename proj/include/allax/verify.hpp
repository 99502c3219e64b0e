#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "allax/mirror.hpp"

namespace allax {

struct CheckResult {
  std::string name;
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
};

struct VerifyOptions {
  std::uint64_t seed = 12345;
  int algebraic_trials = 100;  // spectral points for the exact identities
  int state_trials = 3;        // random states for the finite-difference checks
  bool corrupt_kminus = false; // negative control: perturb one k^- entry
};

/// Runs the full identity battery: exact r-matrix algebra, reflection
/// equation, Poisson structure, zero curvature in all pictures, the folding
/// construction on the reference soliton, and the scattering symmetries.
std::vector<CheckResult> run_identity_battery(const VerifyOptions& opt);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace allax

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ghostoam::verify {

struct CriterionResult {
  std::string suite;
  bool passed = false;
  std::string detail;  ///< measured values against their thresholds
  double seconds = 0.0;
};

struct SuiteOptions {
  std::optional<int> l_max;  ///< restricts the separability suite to one truncation
  std::optional<int> p_max;
  std::uint64_t seed = 0;
};

/// Names accepted by run_suite, in execution order ("all" is also accepted).
const std::vector<std::string>& suite_names();

/// D(rho) sweep at L = P = 60: argmax near sigma_g = sqrt(2) sigma_s, peak 1/64, agreement with the limit.
CriterionResult discord_extremum();
/// Numerical CSD projection against the closed-form selection rules and ratios.
CriterionResult csd_oracle(int grid_points = 128);
/// Truncated and closed-form sums of P, P^2, P^4.
CriterionResult normalization();
/// Reconstruction residual and PSD of the separable decomposition; R = 1 at sigma_g = 2 sigma_s.
CriterionResult separability(const SuiteOptions& options = {});
/// Brute-force basis search against the closed-form discord and the Bell-state value.
CriterionResult discord_oracle(const SuiteOptions& options = {});
/// Ghost-image identities with the built-in clover.
CriterionResult imaging(int grid_points = 512);
/// LG orthonormality and the conjugation identity.
CriterionResult mode_math(const SuiteOptions& options = {});

/// Runs one named suite, or all of them for "all". Throws std::invalid_argument on an unknown name.
std::vector<CriterionResult> run_suite(const std::string& name, const SuiteOptions& options = {});

/// "PASS name  (seconds) detail" / "FAIL ..."
std::string format(const CriterionResult& result);

}  // namespace ghostoam::verify

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ghostoam/thermal_source.hpp"

namespace ghostoam {

/// Dense two-photon operators on |l,p>_A (x) |l',p'>_B.
///
/// Product index is a * d + b, with a and b in ModeTruncation order (A-major).
struct ThermalState {
  SpiralSpectrum spectrum;
  int d = 0;
  Eigen::MatrixXcd rho_c;  ///< diagonal P_a P_b
  Eigen::MatrixXcd rho_q;  ///< |v><v|, v(a, -a) = P_a
  Eigen::MatrixXcd rho;    ///< rho_c + rho_q, unnormalised
  double trace_rho = 0.0;  ///< sum P^2 + (sum P)^2

  Eigen::MatrixXcd normalized() const { return rho / trace_rho; }
};

inline constexpr int kDefaultDensityDimensionCap = 36;

/// Builds rho_C, rho_Q and rho. Refuses when d exceeds max_local_dimension.
ThermalState assemble_density(const SpiralSpectrum& spectrum, int max_local_dimension = kDefaultDensityDimensionCap);

/// (sum P)^2 - 1, floored at zero.
double robustness(const SpiralSpectrum& spectrum);

struct SeparabilityCertificate {
  double robustness = 0.0;
  Eigen::MatrixXcd rho_s_minus;
  Eigen::MatrixXcd rho_s_plus;
  Eigen::MatrixXcd diagonal_part;  ///< sum P^2 |a><a| (x) |a><a|
  double reconstruction_residual = 0.0;
  double min_eigenvalue_minus = 0.0;
  double min_eigenvalue_plus = 0.0;
};

/// rho = (1+R) rho_S+ + sum P^2 |a><a|(x)|a><a| with rho_S- = (rho_C - diag)/R and
/// rho_S+ = (rho_Q + R rho_S-)/(1+R). Throws NumericalError if the PSD check fails.
SeparabilityCertificate separability_decomposition(const ThermalState& state);

/// ((sum P^2)^2 - sum P^4) / (sum P^2 + (sum P)^2)^2
double geometric_discord_thermal(const SpiralSpectrum& spectrum);

/// 1 - sum s^2 with Schmidt probabilities s = P^2 / sum P^2.
double geometric_discord_pure(const SpiralSpectrum& spectrum);

/// 1 / (sigma_g/sigma_s + 2 sigma_s/sigma_g)^4; zero in the coherent limit.
double discord_limit(const SourceGeometry& geometry);

struct BruteForceOptions {
  int restarts = 24;
  int iterations = 400;  ///< coordinate-descent sweeps per restart
  std::uint64_t seed = 0;
};

/// Searches local orthonormal bases on side B for the minimum of
/// tr(rho^2) - sum_k tr(M_k^2), M_k = <eta_k|rho|eta_k>. The result is an upper
/// bound on the true minimum. Input must be Hermitian, PSD and unit trace.
double brute_force_discord(const Eigen::MatrixXcd& rho, int local_dim_b, const BruteForceOptions& options = {});

/// Objective of brute_force_discord for one basis (columns of the unitary).
double discord_objective(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& basis_b);

struct DiscordRow {
  double sigma_g_over_sigma_s = 0.0;
  int l_max = 0;
  int p_max = 0;
  int d = 0;
  double d_rho = 0.0;
  double d_rho_q = 0.0;
  double d_inf = 0.0;
};

/// One row per (sigma_g sample, truncation) pair, samples outermost.
std::vector<DiscordRow> discord_curve(double sigma_s, const std::vector<double>& sigma_g_samples,
                                      const std::vector<std::pair<int, int>>& truncations);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const Eigen::MatrixXcd& m);

}  // namespace ghostoam

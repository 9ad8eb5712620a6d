#include "ghostoam/quantum_correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ghostoam/errors.hpp"

namespace ghostoam {

ThermalState assemble_density(const SpiralSpectrum& spectrum, int max_local_dimension) {
  const int d = spectrum.dimension();
  if (d > max_local_dimension) {
    std::ostringstream msg;
    msg << "assemble_density: local dimension d = " << d << " exceeds the cap of " << max_local_dimension
        << " (operators would be " << d * d << "^2); lower l_max or p_max";
    throw std::invalid_argument(msg.str());
  }
  const ModeTruncation& tr = spectrum.truncation();
  const int n = d * d;
  const std::vector<double>& amp = spectrum.amplitudes();

  ThermalState state{spectrum, d, Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n),
                     Eigen::MatrixXcd::Zero(n, n), 0.0};
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) state.rho_c(a * d + b, a * d + b) = amp[a] * amp[b];

  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  for (int a = 0; a < d; ++a) {
    const ModeIndex m = tr.mode(a);
    v(a * d + tr.index(-m.l, m.p)) = amp[a];
  }
  state.rho_q = v * v.adjoint();
  state.rho = state.rho_c + state.rho_q;
  state.trace_rho = state.rho.trace().real();
  return state;
}

double robustness(const SpiralSpectrum& spectrum) {
  const double s = spectrum.sum();
  return std::max(0.0, s * s - 1.0);
}

double min_eigenvalue(const Eigen::MatrixXcd& m) {
  // Indices whose row has no off-diagonal entries form 1x1 blocks; diagonalise only the rest.
  const int n = static_cast<int>(m.rows());
  std::vector<int> coupled;
  double smallest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    bool isolated = true;
    for (int j = 0; j < n && isolated; ++j)
      if (j != i && (m(i, j) != cdouble{} || m(j, i) != cdouble{})) isolated = false;
    if (isolated)
      smallest = std::min(smallest, m(i, i).real());
    else
      coupled.push_back(i);
  }
  if (!coupled.empty()) {
    const int k = static_cast<int>(coupled.size());
    Eigen::MatrixXcd sub(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub(i, j) = m(coupled[i], coupled[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sub, Eigen::EigenvaluesOnly);
    smallest = std::min(smallest, solver.eigenvalues().minCoeff());
  }
  return smallest;
}

SeparabilityCertificate separability_decomposition(const ThermalState& state) {
  const int d = state.d;
  const int n = d * d;
  const std::vector<double>& amp = state.spectrum.amplitudes();

  SeparabilityCertificate cert;
  cert.robustness = robustness(state.spectrum);
  cert.diagonal_part = Eigen::MatrixXcd::Zero(n, n);
  for (int a = 0; a < d; ++a) cert.diagonal_part(a * d + a, a * d + a) = amp[a] * amp[a];

  const Eigen::MatrixXcd noise = state.rho_c - cert.diagonal_part;
  const double r = cert.robustness;
  if (r > 0.0) {
    cert.rho_s_minus = noise / r;
    cert.rho_s_plus = (state.rho_q + r * cert.rho_s_minus) / (1.0 + r);
  } else {
    // Product-state limit: no mixing needed, keep the identity rho = rho_S+ + diag exact.
    cert.rho_s_minus = noise;
    cert.rho_s_plus = state.rho_q + noise;
  }

  const Eigen::MatrixXcd rebuilt = (1.0 + r) * cert.rho_s_plus + cert.diagonal_part;
  cert.reconstruction_residual = (state.rho - rebuilt).cwiseAbs().maxCoeff();

  auto normalized_min = [](const Eigen::MatrixXcd& m) {
    const double tr = m.trace().real();
    return tr > 0.0 ? min_eigenvalue(m / tr) : min_eigenvalue(m);
  };
  cert.min_eigenvalue_minus = normalized_min(cert.rho_s_minus);
  cert.min_eigenvalue_plus = normalized_min(cert.rho_s_plus);
  constexpr double kPsdTolerance = -1e-10;
  if (cert.min_eigenvalue_minus < kPsdTolerance || cert.min_eigenvalue_plus < kPsdTolerance) {
    std::ostringstream msg;
    msg << "separability_decomposition: PSD check failed (min eigenvalues " << cert.min_eigenvalue_minus << ", "
        << cert.min_eigenvalue_plus << ")";
    throw NumericalError(msg.str());
  }
  return cert;
}

double geometric_discord_thermal(const SpiralSpectrum& spectrum) {
  const double s1 = spectrum.sum();
  const double s2 = spectrum.sum_squares();
  const double s4 = spectrum.sum_fourth();
  if (!(s2 > 0.0)) throw std::invalid_argument("geometric_discord_thermal: spectrum is empty");
  const double denom = s2 + s1 * s1;
  return (s2 * s2 - s4) / (denom * denom);
}

double geometric_discord_pure(const SpiralSpectrum& spectrum) {
  const double s2 = spectrum.sum_squares();
  if (!(s2 > 0.0)) throw std::invalid_argument("geometric_discord_pure: spectrum is empty");
  return 1.0 - spectrum.sum_fourth() / (s2 * s2);
}

double discord_limit(const SourceGeometry& geometry) {
  if (std::isinf(geometry.sigma_g)) return 0.0;
  const double ratio = geometry.sigma_g / geometry.sigma_s;
  return 1.0 / std::pow(ratio + 2.0 / ratio, 4);
}

double discord_objective(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& basis_b) {
  const int db = static_cast<int>(basis_b.rows());
  const int da = static_cast<int>(rho.rows()) / db;
  const double purity = rho.cwiseAbs2().sum();
  double captured = 0.0;
  for (int k = 0; k < db; ++k) {
    const Eigen::VectorXcd eta = basis_b.col(k);
    for (int a = 0; a < da; ++a) {
      for (int ap = 0; ap < da; ++ap) {
        const auto block = rho.block(a * db, ap * db, db, db);
        const cdouble m = eta.dot(block * eta);  // eta^dagger block eta
        captured += std::norm(m);
      }
    }
  }
  return purity - captured;
}

namespace {

void validate_state(const Eigen::MatrixXcd& rho, int local_dim_b) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("brute_force_discord: operator is not square");
  if (local_dim_b < 1 || local_dim_b > 6) throw std::invalid_argument("brute_force_discord: local_dim_b must be in [1, 6]");
  if (rho.rows() % local_dim_b != 0) throw std::invalid_argument("brute_force_discord: dimension not divisible by local_dim_b");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw std::invalid_argument("brute_force_discord: operator is not Hermitian");
  if (std::abs(rho.trace() - cdouble(1.0)) > 1e-9) throw std::invalid_argument("brute_force_discord: operator trace is not 1");
  if (min_eigenvalue(rho) < -1e-9) throw std::invalid_argument("brute_force_discord: operator is not positive semidefinite");
}

Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cdouble(normal(rng), normal(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  return q;
}

// Right-multiplies by exp(i s H) where H couples basis vectors j < k, either
// symmetrically (E_jk + E_kj) or antisymmetrically i(E_jk - E_kj).
void apply_rotation(Eigen::MatrixXcd& u, int j, int k, bool antisymmetric, double s) {
  const double c = std::cos(s);
  const double sn = std::sin(s);
  // exp(i s H) restricted to span{j,k}
  cdouble r_jj = c, r_kk = c, r_jk, r_kj;
  if (antisymmetric) {
    r_jk = -sn;  // column k gets -sin * e_j
    r_kj = sn;
  } else {
    r_jk = cdouble(0.0, sn);
    r_kj = cdouble(0.0, sn);
  }
  const Eigen::VectorXcd cj = u.col(j);
  const Eigen::VectorXcd ck = u.col(k);
  u.col(j) = cj * r_jj + ck * r_kj;
  u.col(k) = cj * r_jk + ck * r_kk;
}

double refine(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd u, int iterations) {
  const int n = static_cast<int>(u.rows());
  double best = discord_objective(rho, u);
  double step = 0.5;
  for (int it = 0; it < iterations && step > 1e-9; ++it) {
    bool improved = false;
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        for (bool anti : {false, true}) {
          for (double sign : {1.0, -1.0}) {
            Eigen::MatrixXcd trial = u;
            apply_rotation(trial, j, k, anti, sign * step);
            const double value = discord_objective(rho, trial);
            if (value < best - 1e-15) {
              best = value;
              u = std::move(trial);
              improved = true;
              break;
            }
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace

double brute_force_discord(const Eigen::MatrixXcd& rho, int local_dim_b, const BruteForceOptions& options) {
  validate_state(rho, local_dim_b);
  if (options.restarts < 1) throw std::invalid_argument("brute_force_discord: restarts must be >= 1");
  std::vector<double> results(options.restarts);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < options.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    results[r] = refine(rho, random_unitary(local_dim_b, rng), options.iterations);
  }
  return std::max(0.0, *std::min_element(results.begin(), results.end()));
}

std::vector<DiscordRow> discord_curve(double sigma_s, const std::vector<double>& sigma_g_samples,
                                      const std::vector<std::pair<int, int>>& truncations) {
  if (sigma_g_samples.empty()) throw std::invalid_argument("discord_curve: no sigma_g samples");
  std::vector<DiscordRow> rows;
  rows.reserve(sigma_g_samples.size() * truncations.size());
  for (double sigma_g : sigma_g_samples) {
    const SourceGeometry geometry = source_geometry(sigma_s, sigma_g);
    const double limit = discord_limit(geometry);
    for (auto [l_max, p_max] : truncations) {
      const SpiralSpectrum spectrum = build_spectrum(geometry, l_max, p_max);
      rows.push_back({sigma_g / sigma_s, l_max, p_max, spectrum.dimension(), geometric_discord_thermal(spectrum),
                      geometric_discord_pure(spectrum), limit});
    }
  }
  return rows;
}

}  // namespace ghostoam

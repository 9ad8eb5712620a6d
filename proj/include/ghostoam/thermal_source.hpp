#pragma once

#include <optional>
#include <vector>

#include "ghostoam/field_grid.hpp"

namespace ghostoam {

/// Gaussian-Schell source parameters with the derived mode-expansion quantities.
struct SourceGeometry {
  double sigma_s = 0.0;        ///< transverse source size [m]
  double sigma_g = 0.0;        ///< transverse coherence width [m], may be +inf
  double beta = 0.0;           ///< tan(beta) = 2 sigma_s / sigma_g
  double t = 0.0;              ///< tan^2(beta / 2), the per-order decay ratio
  double matched_waist = 0.0;  ///< 2 sigma_s sqrt(cos beta) [m]
};

/// Throws std::invalid_argument for nonpositive or NaN inputs.
SourceGeometry source_geometry(double sigma_s, double sigma_g);

/// (1 - t^2) t^{|l| + 2p}
double spectrum_amplitude(ModeIndex mode, const SourceGeometry& geometry);

/// Truncated table of real mode amplitudes P_{l,p}, stored in ModeTruncation order.
class SpiralSpectrum {
 public:
  SpiralSpectrum(ModeTruncation truncation, std::vector<double> amplitudes,
                 std::optional<SourceGeometry> geometry = std::nullopt);

  /// Every amplitude set to the same value.
  static SpiralSpectrum flat(ModeTruncation truncation, double value = 1.0);

  const ModeTruncation& truncation() const { return truncation_; }
  const std::optional<SourceGeometry>& geometry() const { return geometry_; }
  int l_max() const { return truncation_.l_max; }
  int p_max() const { return truncation_.p_max; }
  /// Local dimension d = (2L+1)(P+1).
  int dimension() const { return truncation_.count(); }

  double amplitude(int l, int p) const { return amplitudes_[truncation_.index(l, p)]; }
  double amplitude(ModeIndex m) const { return amplitude(m.l, m.p); }
  const std::vector<double>& amplitudes() const { return amplitudes_; }

  double sum() const;          ///< sum of P
  double sum_squares() const;  ///< sum of P^2
  double sum_fourth() const;   ///< sum of P^4

  /// Pure OAM marginal P_l = sum_p P_{l,p}^2 for l = -L..L.
  std::vector<double> oam_marginal() const;

 private:
  ModeTruncation truncation_;
  std::vector<double> amplitudes_;
  std::optional<SourceGeometry> geometry_;
};

SpiralSpectrum build_spectrum(const SourceGeometry& geometry, int l_max, int p_max);

/// Schmidt number 1 / sum s^2 with s = P^2 / sum P^2.
double schmidt_number(const SpiralSpectrum& spectrum);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Gaussian-Schell cross-spectral density with unit prefactor.
double csd_value(Vec2 rho1, Vec2 rho2, const SourceGeometry& geometry);

/// Mode-expansion coefficients f(l, l', p, p') of the cross-spectral density.
class CsdTensor {
 public:
  explicit CsdTensor(ModeTruncation truncation);

  const ModeTruncation& truncation() const { return truncation_; }
  cdouble& at(int l, int l_prime, int p, int p_prime);
  cdouble at(int l, int l_prime, int p, int p_prime) const;

  /// Largest |f| over coefficients violating l' = -l, p' = p.
  double max_off_target() const;

 private:
  std::size_t offset(int l, int l_prime, int p, int p_prime) const;

  ModeTruncation truncation_;
  std::vector<cdouble> values_;
};

struct CsdOptions {
  /// Refuse when the estimated floating-point work exceeds this.
  double max_operations = 2e11;
};

/// Numerical projection of the cross-spectral density onto LG modes of the
/// matched waist at z = 0: f = integral of W(r1, r2) conj(LG_a(r1)) conj(LG_b(r2)).
///
/// The inner projection over r1 is done per output pixel using the separable
/// Gaussian coherence kernel, then projected over r2.
CsdTensor csd_mode_decompose(const SourceGeometry& geometry, int l_max, int p_max, const GridSpec& spec,
                             const CsdOptions& options = {});

}  // namespace ghostoam

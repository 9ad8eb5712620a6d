#include "ghostoam/thermal_source.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ghostoam/errors.hpp"

namespace ghostoam {

SourceGeometry source_geometry(double sigma_s, double sigma_g) {
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) throw std::invalid_argument("sigma_s must be positive and finite");
  if (!(sigma_g > 0.0)) throw std::invalid_argument("sigma_g must be positive");
  SourceGeometry g;
  g.sigma_s = sigma_s;
  g.sigma_g = sigma_g;
  const double tan_beta = std::isinf(sigma_g) ? 0.0 : 2.0 * sigma_s / sigma_g;
  g.beta = std::atan(tan_beta);
  // tan(beta/2) = tan(beta) / (1 + sqrt(1 + tan^2(beta)))
  const double half = tan_beta / (1.0 + std::hypot(1.0, tan_beta));
  g.t = half * half;
  g.matched_waist = 2.0 * sigma_s * std::sqrt(1.0 / std::hypot(1.0, tan_beta));
  return g;
}

double spectrum_amplitude(ModeIndex mode, const SourceGeometry& geometry) {
  const double t = geometry.t;
  return (1.0 - t * t) * std::pow(t, std::abs(mode.l) + 2 * mode.p);
}

SpiralSpectrum::SpiralSpectrum(ModeTruncation truncation, std::vector<double> amplitudes,
                               std::optional<SourceGeometry> geometry)
    : truncation_(truncation), amplitudes_(std::move(amplitudes)), geometry_(geometry) {
  if (static_cast<int>(amplitudes_.size()) != truncation_.count())
    throw std::invalid_argument("spectrum amplitude count does not match truncation");
  for (double a : amplitudes_)
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("spectrum amplitudes must be finite and >= 0");
}

SpiralSpectrum SpiralSpectrum::flat(ModeTruncation truncation, double value) {
  return SpiralSpectrum(truncation, std::vector<double>(truncation.count(), value));
}

double SpiralSpectrum::sum() const {
  double s = 0.0;
  for (double a : amplitudes_) s += a;
  return s;
}

double SpiralSpectrum::sum_squares() const {
  double s = 0.0;
  for (double a : amplitudes_) s += a * a;
  return s;
}

double SpiralSpectrum::sum_fourth() const {
  double s = 0.0;
  for (double a : amplitudes_) s += a * a * a * a;
  return s;
}

std::vector<double> SpiralSpectrum::oam_marginal() const {
  std::vector<double> marginal(2 * l_max() + 1, 0.0);
  for (int l = -l_max(); l <= l_max(); ++l)
    for (int p = 0; p <= p_max(); ++p) marginal[l + l_max()] += amplitude(l, p) * amplitude(l, p);
  return marginal;
}

SpiralSpectrum build_spectrum(const SourceGeometry& geometry, int l_max, int p_max) {
  const ModeTruncation truncation(l_max, p_max);
  std::vector<double> amplitudes(truncation.count());
  for (int i = 0; i < truncation.count(); ++i) amplitudes[i] = spectrum_amplitude(truncation.mode(i), geometry);
  return SpiralSpectrum(truncation, std::move(amplitudes), geometry);
}

double schmidt_number(const SpiralSpectrum& spectrum) {
  const double s2 = spectrum.sum_squares();
  if (!(s2 > 0.0)) throw std::invalid_argument("schmidt_number: spectrum is empty");
  return s2 * s2 / spectrum.sum_fourth();
}

double csd_value(Vec2 rho1, Vec2 rho2, const SourceGeometry& geometry) {
  const double r1 = rho1.x * rho1.x + rho1.y * rho1.y;
  const double r2 = rho2.x * rho2.x + rho2.y * rho2.y;
  const double dx = rho1.x - rho2.x;
  const double dy = rho1.y - rho2.y;
  const double ss = geometry.sigma_s * geometry.sigma_s;
  const double coherence =
      std::isinf(geometry.sigma_g) ? 1.0 : std::exp(-(dx * dx + dy * dy) / (2.0 * geometry.sigma_g * geometry.sigma_g));
  return std::exp(-(r1 + r2) / (4.0 * ss)) * coherence;
}

CsdTensor::CsdTensor(ModeTruncation truncation)
    : truncation_(truncation),
      values_(static_cast<std::size_t>(truncation.count()) * truncation.count(), cdouble{}) {}

std::size_t CsdTensor::offset(int l, int l_prime, int p, int p_prime) const {
  if (!truncation_.contains({l, p}) || !truncation_.contains({l_prime, p_prime}))
    throw std::out_of_range("CsdTensor index outside truncation");
  return static_cast<std::size_t>(truncation_.index(l, p)) * truncation_.count() + truncation_.index(l_prime, p_prime);
}

cdouble& CsdTensor::at(int l, int l_prime, int p, int p_prime) { return values_[offset(l, l_prime, p, p_prime)]; }
cdouble CsdTensor::at(int l, int l_prime, int p, int p_prime) const { return values_[offset(l, l_prime, p, p_prime)]; }

double CsdTensor::max_off_target() const {
  double worst = 0.0;
  const int count = truncation_.count();
  for (int a = 0; a < count; ++a) {
    for (int b = 0; b < count; ++b) {
      const ModeIndex ma = truncation_.mode(a);
      const ModeIndex mb = truncation_.mode(b);
      if (mb.l == -ma.l && mb.p == ma.p) continue;
      worst = std::max(worst, std::abs(values_[static_cast<std::size_t>(a) * count + b]));
    }
  }
  return worst;
}

CsdTensor csd_mode_decompose(const SourceGeometry& geometry, int l_max, int p_max, const GridSpec& spec,
                             const CsdOptions& options) {
  const ModeTruncation truncation(l_max, p_max);
  const int count = truncation.count();
  const int n = spec.side_points();
  const double nd = n;
  const double estimate = count * (4.0 * nd * nd * nd) + static_cast<double>(count) * count * nd * nd * 8.0;
  if (estimate > options.max_operations) {
    std::ostringstream msg;
    msg << "csd_mode_decompose: truncation |l|<=" << l_max << ", p<=" << p_max << " on a " << n << "^2 grid needs ~"
        << estimate << " operations, above the budget of " << options.max_operations
        << "; lower the truncation or grid size";
    throw NumericalError(msg.str());
  }

  const BeamSpec beam(geometry.matched_waist);
  const LgBasisEvaluator basis(beam, 0.0, truncation);
  const double area = spec.pixel_area();

  // modes[a](row, col) = LG_a at the pixel centre
  std::vector<Eigen::MatrixXcd> modes(count, Eigen::MatrixXcd(n, n));
  Eigen::MatrixXd envelope(n, n);
  std::vector<cdouble> buffer(count);
  const double ss4 = 4.0 * geometry.sigma_s * geometry.sigma_s;
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const double x = spec.x(col), y = spec.y(row);
      basis.evaluate(x, y, buffer);
      for (int a = 0; a < count; ++a) modes[a](row, col) = buffer[a];
      envelope(row, col) = std::exp(-(x * x + y * y) / ss4);
    }
  }

  // Coherence factor exp(-(r1-r2)^2 / 2 sigma_g^2) separates into x and y kernels on a square grid.
  Eigen::MatrixXd kernel(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = (i - j) * spec.pitch();
      kernel(i, j) = std::isinf(geometry.sigma_g) ? 1.0 : std::exp(-d * d / (2.0 * geometry.sigma_g * geometry.sigma_g));
    }
  }

  const Eigen::MatrixXcd kernel_c = kernel.cast<cdouble>();
  const Eigen::MatrixXcd envelope_c = envelope.cast<cdouble>();
  CsdTensor tensor(truncation);
#pragma omp parallel for schedule(dynamic)
  for (int a = 0; a < count; ++a) {
    // g_a(r2) = A(r2) sum_{r1} K(y2,y1) K(x1,x2) A(r1) conj(LG_a(r1)) dA
    const Eigen::MatrixXcd weighted = envelope_c.cwiseProduct(modes[a].conjugate());
    const Eigen::MatrixXcd projected = (kernel_c * weighted * kernel_c).cwiseProduct(envelope_c) * area;
    for (int b = 0; b < count; ++b) {
      const cdouble f = (projected.cwiseProduct(modes[b].conjugate())).sum() * area;
      const ModeIndex ma = truncation.mode(a);
      const ModeIndex mb = truncation.mode(b);
      tensor.at(ma.l, mb.l, ma.p, mb.p) = f;
    }
  }
  return tensor;
}

}  // namespace ghostoam

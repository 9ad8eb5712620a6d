#include "ghostoam/field_grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ghostoam/diagnostics.hpp"

namespace ghostoam {

using std::numbers::pi;

GridSpec::GridSpec(int side_points, double extent) : side_points_(side_points), extent_(extent) {
  if (side_points < 2) throw std::invalid_argument("grid side_points must be >= 2");
  if (!(extent > 0.0) || !std::isfinite(extent)) throw std::invalid_argument("grid extent must be positive");
}

template <class T>
Raster<T>::Raster(GridSpec spec, std::vector<T> samples) : spec_(spec), samples_(std::move(samples)) {
  if (samples_.size() != spec_.size()) throw std::invalid_argument("raster sample count does not match grid");
}

template <class T>
bool Raster<T>::all_finite() const {
  for (const T& v : samples_) {
    if constexpr (std::is_same_v<T, cdouble>) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    } else {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

template class Raster<cdouble>;
template class Raster<double>;

ModeIndex::ModeIndex(int l_, int p_) : l(l_), p(p_) {
  if (p_ < 0) throw std::invalid_argument("radial index p must be nonnegative");
}

ModeTruncation::ModeTruncation(int l_max_, int p_max_) : l_max(l_max_), p_max(p_max_) {
  if (l_max_ < 0 || p_max_ < 0) throw std::invalid_argument("truncation limits must be nonnegative");
}

BeamSpec::BeamSpec(double waist, double wavelength) : waist_(waist), wavelength_(wavelength) {
  if (!(waist > 0.0) || !std::isfinite(waist)) throw std::invalid_argument("beam waist must be positive");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) throw std::invalid_argument("wavelength must be positive");
  const double zr = rayleigh_range();
  if (!(zr > 0.0) || !std::isfinite(zr)) throw std::invalid_argument("Rayleigh range must be finite and positive");
}

double BeamSpec::wavenumber() const { return 2.0 * pi / wavelength_; }
double BeamSpec::rayleigh_range() const { return pi * waist_ * waist_ / wavelength_; }

double BeamSpec::width_at(double z) const {
  const double s = z / rayleigh_range();
  return waist_ * std::sqrt(1.0 + s * s);
}

double BeamSpec::gouy_angle(double z) const { return std::atan(z / rayleigh_range()); }

namespace {

// k r^2 / (2 R(z)) written without dividing by R, so z = 0 is regular.
double curvature_coefficient(const BeamSpec& beam, double z) {
  const double zr = beam.rayleigh_range();
  return beam.wavenumber() * z / (2.0 * (z * z + zr * zr));
}

}  // namespace

cdouble lg_amplitude(ModeIndex mode, const BeamSpec& beam, double radius, double azimuth, double z) {
  if (radius < 0.0) throw std::invalid_argument("radius must be nonnegative");
  const int m = std::abs(mode.l);
  const int p = mode.p;
  const double w = beam.width_at(z);
  const double x = 2.0 * radius * radius / (w * w);

  const double log_norm = 0.5 * (std::log(2.0 / pi) + std::lgamma(p + 1.0) - std::lgamma(p + m + 1.0));
  // (sqrt(2) r / w)^m, defined as 1 for m = 0 including r = 0.
  const double power = m == 0 ? 1.0 : std::pow(std::sqrt(x), m);
  const double laguerre = std::assoc_laguerre(static_cast<unsigned>(p), static_cast<unsigned>(m), x);
  const double magnitude = std::exp(log_norm) / w * power * laguerre * std::exp(-0.5 * x);

  const double phase = curvature_coefficient(beam, z) * radius * radius + mode.l * azimuth -
                       (2 * p + m + 1) * beam.gouy_angle(z);
  return std::polar(magnitude, phase);
}

ComplexField sample_lg(ModeIndex mode, const BeamSpec& beam, const GridSpec& spec, double z) {
  const double ring = beam.width_at(z) * std::sqrt(std::abs(mode.l) / 2.0 + mode.p);
  if (ring > 0.5 * spec.extent()) {
    std::ostringstream msg;
    msg << "LG(l=" << mode.l << ", p=" << mode.p << ") at z=" << z << " m is clipped: ring radius " << ring
        << " m exceeds half-window " << 0.5 * spec.extent() << " m";
    diagnostics::warn(msg.str());
  }
  ComplexField field(spec);
  const int n = spec.side_points();
#pragma omp parallel for schedule(static)
  for (int row = 0; row < n; ++row) {
    const double y = spec.y(row);
    for (int col = 0; col < n; ++col) {
      const double x = spec.x(col);
      field.at(row, col) = lg_amplitude(mode, beam, std::hypot(x, y), std::atan2(y, x), z);
    }
  }
  return field;
}

cdouble inner_product(const ComplexField& a, const ComplexField& b) {
  if (!(a.spec() == b.spec())) throw std::invalid_argument("inner_product: grid specs differ");
  const auto sa = a.samples();
  const auto sb = b.samples();
  double re = 0.0, im = 0.0;
  const long count = static_cast<long>(sa.size());
#pragma omp parallel for reduction(+ : re, im) schedule(static)
  for (long i = 0; i < count; ++i) {
    const cdouble v = std::conj(sa[i]) * sb[i];
    re += v.real();
    im += v.imag();
  }
  return cdouble(re, im) * a.spec().pixel_area();
}

IntensityPhase intensity_and_phase(const ComplexField& f) {
  IntensityPhase out{RealRaster(f.spec()), RealRaster(f.spec())};
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.intensity[i] = std::norm(f[i]);
    double phase = std::arg(f[i]);
    if (phase <= -pi) phase = pi;
    out.phase[i] = phase;
  }
  return out;
}

LgBasisEvaluator::LgBasisEvaluator(const BeamSpec& beam, double z, ModeTruncation truncation)
    : beam_(beam),
      z_(z),
      truncation_(truncation),
      width_(beam.width_at(z)),
      curvature_coeff_(curvature_coefficient(beam, z)) {
  const int max_order = 2 * truncation.p_max + truncation.l_max;
  const double gouy = beam.gouy_angle(z);
  gouy_.resize(max_order + 1);
  for (int n = 0; n <= max_order; ++n) gouy_[n] = std::polar(1.0, -(n + 1) * gouy);
}

// values[m * (p_max+1) + p] = sqrt(2/pi)/w * sqrt(p!/(p+m)!) x^{m/2} L_p^m(x) e^{-x/2}
void LgBasisEvaluator::radial(double radius, std::vector<double>& values) const {
  const int l_max = truncation_.l_max;
  const int p_max = truncation_.p_max;
  const int np = p_max + 1;
  values.assign(static_cast<std::size_t>(l_max + 1) * np, 0.0);
  const double x = 2.0 * radius * radius / (width_ * width_);
  const double prefactor = std::sqrt(2.0 / pi) / width_;

  double seed = std::exp(-0.5 * x);  // x^{m/2} e^{-x/2} / sqrt(m!)
  for (int m = 0; m <= l_max; ++m) {
    if (m > 0) seed *= std::sqrt(x / m);
    double* u = values.data() + static_cast<std::size_t>(m) * np;
    u[0] = seed;
    if (p_max >= 1) u[1] = (1.0 + m - x) * seed / std::sqrt(1.0 + m);
    for (int p = 1; p < p_max; ++p) {
      u[p + 1] = ((2.0 * p + 1.0 + m - x) * u[p] - std::sqrt(p * (p + m + 0.0)) * u[p - 1]) /
                 std::sqrt((p + 1.0) * (p + m + 1.0));
    }
    for (int p = 0; p <= p_max; ++p) u[p] *= prefactor;
  }
}

void LgBasisEvaluator::evaluate(double x, double y, std::span<cdouble> out) const {
  if (static_cast<int>(out.size()) != truncation_.count())
    throw std::invalid_argument("basis output span has the wrong size");
  thread_local std::vector<double> rad;
  const double r2 = x * x + y * y;
  radial(std::sqrt(r2), rad);

  const int l_max = truncation_.l_max;
  const int np = truncation_.p_max + 1;
  const cdouble curvature = std::polar(1.0, curvature_coeff_ * r2);
  const double r = std::sqrt(r2);
  const cdouble unit = r > 0.0 ? cdouble(x / r, y / r) : cdouble(1.0, 0.0);

  cdouble azimuthal = curvature;  // e^{i m phi} times curvature phase
  for (int m = 0; m <= l_max; ++m) {
    if (m > 0) azimuthal *= unit;
    const double* u = rad.data() + static_cast<std::size_t>(m) * np;
    for (int p = 0; p < np; ++p) {
      const cdouble common = u[p] * gouy_[2 * p + m];
      const cdouble plus = common * azimuthal;
      out[truncation_.index(m, p)] = plus;
      if (m > 0) {
        // e^{-i m phi} curvature = conj(e^{i m phi}) * curvature^2
        out[truncation_.index(-m, p)] = common * std::conj(azimuthal) * curvature * curvature;
      }
    }
  }
}

void LgBasisEvaluator::evaluate_intensity(double radius, std::span<double> out) const {
  if (static_cast<int>(out.size()) != truncation_.count())
    throw std::invalid_argument("basis output span has the wrong size");
  thread_local std::vector<double> rad;
  radial(radius, rad);
  const int np = truncation_.p_max + 1;
  for (int l = -truncation_.l_max; l <= truncation_.l_max; ++l) {
    const double* u = rad.data() + static_cast<std::size_t>(std::abs(l)) * np;
    for (int p = 0; p < np; ++p) out[truncation_.index(l, p)] = u[p] * u[p];
  }
}

Eigen::MatrixXcd gram_matrix(const ModeTruncation& truncation, const BeamSpec& beam, const GridSpec& spec,
                             double z) {
  const LgBasisEvaluator basis(beam, z, truncation);
  const int count = truncation.count();
  const int n = spec.side_points();
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(count, count);
#pragma omp parallel
  {
    Eigen::MatrixXcd local = Eigen::MatrixXcd::Zero(count, count);
    Eigen::MatrixXcd block(count, n);
#pragma omp for schedule(static)
    for (int row = 0; row < n; ++row) {
      for (int col = 0; col < n; ++col)
        basis.evaluate(spec.x(col), spec.y(row), std::span<cdouble>(block.col(col).data(), count));
      local.noalias() += block.conjugate() * block.transpose();
    }
#pragma omp critical
    gram += local;
  }
  return gram * spec.pixel_area();
}

GridSpec default_grid(double waist, double object_size, int side_points) {
  return GridSpec(side_points, 8.0 * std::max(waist, object_size));
}

}  // namespace ghostoam

#include "ghostoam/spiral_imaging.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ghostoam {

using std::numbers::pi;

ModeCoefficients::ModeCoefficients(ModeTruncation truncation_, BeamSpec beam_, std::optional<double> plane_)
    : truncation(truncation_), values(truncation_.count(), cdouble{}), plane(plane_), beam(beam_) {}

double ModeCoefficients::norm_squared() const {
  double s = 0.0;
  for (const cdouble& v : values) s += std::norm(v);
  return s;
}

namespace {

void check_image(const GrayImage& img, const GridSpec& spec, const char* what) {
  if (img.width != spec.side_points() || img.height != spec.side_points())
    throw std::invalid_argument(std::string(what) + " raster dimensions do not match the grid");
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
    throw std::invalid_argument(std::string(what) + " raster has the wrong pixel count");
  if (img.max_value <= 0) throw std::invalid_argument(std::string(what) + " raster has a nonpositive max value");
}

}  // namespace

ComplexField load_object(const GrayImage& intensity, const std::optional<GrayImage>& phase, const GridSpec& spec) {
  check_image(intensity, spec, "intensity");
  if (phase) check_image(*phase, spec, "phase");
  bool any = false;
  for (int v : intensity.pixels) any = any || v > 0;
  if (!any) throw std::invalid_argument("intensity raster is all zero: nothing to image");

  ComplexField field(spec);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double magnitude = std::sqrt(static_cast<double>(intensity.pixels[i]) / intensity.max_value);
    const double angle = phase ? -pi + 2.0 * pi * phase->pixels[i] / (phase->max_value + 1.0) : 0.0;
    field[i] = std::polar(magnitude, angle);
  }
  return field;
}

ComplexField clover_object(const GridSpec& spec, double r0) {
  if (!(r0 > 0.0)) throw std::invalid_argument("clover radius must be positive");
  ComplexField field(spec);
  const int n = spec.side_points();
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const double x = spec.x(col), y = spec.y(row);
      const double u = (x * x + y * y) / (r0 * r0);
      const double phi = std::atan2(y, x);
      const double amplitude = u * std::exp(-u) * std::abs(std::cos(2.0 * phi));
      field.at(row, col) = std::polar(amplitude, 0.5 * pi * std::sin(4.0 * phi));
    }
  }
  return field;
}

double default_clover_radius(const BeamSpec& beam, double z1) { return beam.width_at(-z1); }

double clover_extent(double r0) {
  // Solve u exp(-u) = 1e-6 exp(-1) for u > 1 by bisection; r = r0 sqrt(u).
  const double target = 1e-6 * std::exp(-1.0);
  double lo = 1.0, hi = 60.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::exp(-mid) > target ? lo : hi) = mid;
  }
  return r0 * std::sqrt(0.5 * (lo + hi));
}

ModeCoefficients object_spectrum(const ComplexField& object, const BeamSpec& beam, double z1, int l_max, int p_max) {
  const ModeTruncation truncation(l_max, p_max);
  const LgBasisEvaluator basis(beam, -z1, truncation);
  const GridSpec& spec = object.spec();
  const int n = spec.side_points();
  const int count = truncation.count();

  ModeCoefficients result(truncation, beam, -z1);
#pragma omp parallel
  {
    std::vector<cdouble> local(count, cdouble{});
    std::vector<cdouble> modes(count);
#pragma omp for schedule(static)
    for (int row = 0; row < n; ++row) {
      for (int col = 0; col < n; ++col) {
        const cdouble o = object.at(row, col);
        if (o == cdouble{}) continue;
        basis.evaluate(spec.x(col), spec.y(row), modes);
        for (int i = 0; i < count; ++i) local[i] += std::conj(modes[i]) * o;
      }
    }
#pragma omp critical
    for (int i = 0; i < count; ++i) result.values[i] += local[i];
  }
  for (cdouble& v : result.values) v *= spec.pixel_area();
  return result;
}

ModeCoefficients image_spectrum(const ModeCoefficients& object_coefficients, const SpiralSpectrum& spectrum) {
  if (!(object_coefficients.truncation == spectrum.truncation()))
    throw std::invalid_argument("image_spectrum: object and thermal truncations differ");
  const ModeTruncation& truncation = object_coefficients.truncation;
  ModeCoefficients out(truncation, object_coefficients.beam);
  for (int l = -truncation.l_max; l <= truncation.l_max; ++l)
    for (int p = 0; p <= truncation.p_max; ++p)
      out.at(-l, p) = spectrum.amplitude(l, p) * std::conj(object_coefficients.at(l, p));
  return out;
}

ComplexField synthesize(const ModeCoefficients& coefficients, const GridSpec& spec, double z) {
  const LgBasisEvaluator basis(coefficients.beam, z, coefficients.truncation);
  const int n = spec.side_points();
  const int count = coefficients.truncation.count();
  ComplexField field(spec);
#pragma omp parallel
  {
    std::vector<cdouble> modes(count);
#pragma omp for schedule(static)
    for (int row = 0; row < n; ++row) {
      for (int col = 0; col < n; ++col) {
        basis.evaluate(spec.x(col), spec.y(row), modes);
        cdouble acc{};
        for (int i = 0; i < count; ++i) acc += coefficients.values[i] * modes[i];
        field.at(row, col) = acc;
      }
    }
  }
  return field;
}

ComplexField render_pure_image(const ModeCoefficients& image_coefficients, const GridSpec& spec, double z2) {
  return synthesize(image_coefficients, spec, z2);
}

Background render_background(const ModeCoefficients& object_coefficients, const SpiralSpectrum& spectrum,
                             const GridSpec& spec, double z2) {
  if (!(object_coefficients.truncation == spectrum.truncation()))
    throw std::invalid_argument("render_background: object and thermal truncations differ");
  const ModeTruncation& truncation = spectrum.truncation();
  const int count = truncation.count();

  Background out{RealRaster(spec), 0.0};
  for (int i = 0; i < count; ++i) out.weight += spectrum.amplitudes()[i] * std::norm(object_coefficients.values[i]);

  const LgBasisEvaluator basis(object_coefficients.beam, z2, truncation);
  const int n = spec.side_points();
#pragma omp parallel
  {
    std::vector<double> intensity(count);
#pragma omp for schedule(static)
    for (int row = 0; row < n; ++row) {
      for (int col = 0; col < n; ++col) {
        basis.evaluate_intensity(std::hypot(spec.x(col), spec.y(row)), intensity);
        double acc = 0.0;
        for (int i = 0; i < count; ++i) acc += spectrum.amplitudes()[i] * intensity[i];
        out.raster.at(row, col) = out.weight * acc;
      }
    }
  }
  return out;
}

GhostImageResult render_total(const ComplexField& object, const SpiralSpectrum& spectrum, const BeamSpec& beam,
                              const ImagingSetup& setup, const GridSpec& spec) {
  const ModeCoefficients a = object_spectrum(object, beam, setup.z1, spectrum.l_max(), spectrum.p_max());
  const ModeCoefficients b = image_spectrum(a, spectrum);
  GhostImageResult result{render_pure_image(b, spec, setup.z2), RealRaster(spec), RealRaster(spec), 0.0};
  Background bg = render_background(a, spectrum, spec, setup.z2);
  result.background = std::move(bg.raster);
  result.background_weight = bg.weight;
  for (std::size_t i = 0; i < spec.size(); ++i)
    result.total_intensity[i] = result.background[i] + std::norm(result.pure_field[i]);
  return result;
}

GhostImageResult render_total(const ComplexField& object, const SourceGeometry& geometry, const ImagingSetup& setup,
                              const GridSpec& spec) {
  const SpiralSpectrum spectrum = build_spectrum(geometry, setup.l_max, setup.p_max);
  return render_total(object, spectrum, BeamSpec(geometry.matched_waist, setup.wavelength), setup, spec);
}

}  // namespace ghostoam

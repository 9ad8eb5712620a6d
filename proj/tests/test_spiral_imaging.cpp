#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ghostoam/spiral_imaging.hpp"
#include "oracles.hpp"

using namespace ghostoam;
using std::numbers::pi;

namespace {

GrayImage constant_image(int side, int value, int max_value = 255) {
  return {side, side, max_value, std::vector<int>(static_cast<std::size_t>(side) * side, value)};
}

}  // namespace

TEST_CASE("load_object") {
  const GridSpec spec(8, 1e-3);
  const ComplexField white = load_object(constant_image(8, 255), std::nullopt, spec);
  for (const cdouble& v : white.samples()) CHECK(v == cdouble(1.0, 0.0));

  GrayImage phase = constant_image(8, 128);
  const ComplexField shifted = load_object(constant_image(8, 64), phase, spec);
  CHECK(std::abs(shifted[0]) == doctest::Approx(std::sqrt(64.0 / 255.0)));
  CHECK(std::arg(shifted[0]) == doctest::Approx(0.0).scale(1.0));

  CHECK_THROWS_AS(load_object(constant_image(4, 255), std::nullopt, spec), std::invalid_argument);
  CHECK_THROWS_AS(load_object(constant_image(8, 0), std::nullopt, spec), std::invalid_argument);
  CHECK_THROWS_AS(load_object(constant_image(8, 10), constant_image(6, 1), spec), std::invalid_argument);
}

TEST_CASE("load_object of an LG(0,0) intensity gives its magnitude") {
  const BeamSpec beam(1e-3);
  const GridSpec spec(32, 6e-3);
  const ComplexField lg = sample_lg({0, 0}, beam, spec, 0.0);
  const double peak = std::norm(lg_amplitude({0, 0}, beam, 0.0, 0.0, 0.0));
  GrayImage img{32, 32, 65535, {}};
  for (const cdouble& v : lg.samples()) img.pixels.push_back(static_cast<int>(std::lround(65535.0 * std::norm(v) / peak)));
  const ComplexField o = load_object(img, std::nullopt, spec);
  // 16-bit quantisation of the intensity bounds the magnitude error by sqrt(0.5 / 65535)
  for (std::size_t i = 0; i < spec.size(); ++i) CHECK(std::abs(std::abs(o[i]) - std::abs(lg[i]) / std::sqrt(peak)) < 3e-3);
}

TEST_CASE("object spectrum selection rules") {
  const BeamSpec beam(0.4e-3);
  const double z1 = 0.3;
  const GridSpec spec(192, 10.0 * beam.width_at(z1));
  const ModeCoefficients single = object_spectrum(sample_lg({0, 0}, beam, spec, -z1), beam, z1, 3, 3);
  CHECK(single.plane == doctest::Approx(-z1));
  for (int i = 0; i < single.truncation.count(); ++i) {
    const ModeIndex m = single.truncation.mode(i);
    if (m.l == 0 && m.p == 0)
      CHECK(std::abs(single.values[i] - 1.0) < 1e-3);
    else
      CHECK(std::abs(single.values[i]) < 1e-3);
  }

  ComplexField vortex(spec);
  for (int row = 0; row < 192; ++row)
    for (int col = 0; col < 192; ++col) {
      const double x = spec.x(col), y = spec.y(row);
      vortex.at(row, col) = std::polar(std::exp(-(x * x + y * y) / 1e-6), std::atan2(y, x));
    }
  const ModeCoefficients a = object_spectrum(vortex, beam, z1, 4, 4);
  double on = 0.0;
  for (int p = 0; p <= 4; ++p) on = std::max(on, std::abs(a.at(1, p)));
  for (int l = -4; l <= 4; ++l)
    for (int p = 0; p <= 4; ++p)
      if (l != 1) CHECK(std::abs(a.at(l, p)) < 1e-3 * on);
}

TEST_CASE("image spectrum re-indexes and conjugates") {
  const BeamSpec beam(1e-3);
  const ModeTruncation tr(3, 2);
  ModeCoefficients a(tr, beam, -0.5);
  a.at(2, 0) = cdouble(0.3, 0.4);
  const SpiralSpectrum s = build_spectrum(source_geometry(1e-3, 5e-4), 3, 2);
  const ModeCoefficients b = image_spectrum(a, s);
  CHECK(!b.plane.has_value());
  for (int i = 0; i < tr.count(); ++i) {
    const ModeIndex m = tr.mode(i);
    if (m.l == -2 && m.p == 0)
      CHECK(std::abs(b.values[i] - s.amplitude(2, 0) * cdouble(0.3, -0.4)) < 1e-15);
    else
      CHECK(b.values[i] == cdouble{});
  }
  CHECK_THROWS_AS(image_spectrum(a, build_spectrum(source_geometry(1e-3, 5e-4), 2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(render_background(a, build_spectrum(source_geometry(1e-3, 5e-4), 3, 3), GridSpec(8, 1e-3), 0.5),
                  std::invalid_argument);
}

TEST_CASE("zero inputs render zero") {
  const BeamSpec beam(1e-3);
  const ModeTruncation tr(2, 2);
  const GridSpec spec(16, 8e-3);
  const ModeCoefficients zero(tr, beam, -0.5);
  const ComplexField field = synthesize(zero, spec, 0.5);
  for (const cdouble& v : field.samples()) CHECK(v == cdouble{});
  const Background bg = render_background(zero, build_spectrum(source_geometry(1e-3, 1e-4), 2, 2), spec, 0.5);
  CHECK(bg.weight == 0.0);
  for (double v : bg.raster.samples()) CHECK(v == 0.0);
}

TEST_CASE("clover object") {
  const double r0 = 1e-3;
  const GridSpec spec(128, 8e-3);
  const ComplexField o = clover_object(spec, r0);
  const double u = std::pow(clover_extent(r0) / r0, 2);
  CHECK(u > 1.0);
  CHECK(u * std::exp(-u) == doctest::Approx(1e-6 * std::exp(-1.0)).epsilon(1e-9));
  // four-fold symmetry of the amplitude
  for (int row = 0; row < 128; ++row)
    for (int col = 0; col < 128; ++col) CHECK(std::abs(o.at(row, col)) == doctest::Approx(std::abs(o.at(col, 127 - row))));
  CHECK_THROWS_AS(clover_object(spec, 0.0), std::invalid_argument);
}

TEST_CASE("clover capture at sigma_g = 25 um, z1 = 0.5 m") {
  const SourceGeometry g = source_geometry(1e-3, 2.5e-5);
  const BeamSpec beam(g.matched_waist);
  const double r0 = default_clover_radius(beam, 0.5);
  const GridSpec spec = default_grid(beam.width_at(-0.5), r0, 256);
  const ComplexField o = clover_object(spec, r0);
  const ModeCoefficients a = object_spectrum(o, beam, 0.5, 20, 20);
  CHECK(a.norm_squared() / std::real(inner_product(o, o)) >= 0.95);
}

TEST_CASE("property: Bessel inequality at every truncation") {
  const BeamSpec beam(0.3e-3);
  const GridSpec spec(128, 4e-3);
  const ComplexField o = clover_object(spec, 0.5e-3);
  const double norm = std::real(inner_product(o, o));
  double previous = 0.0;
  for (int n : {0, 2, 4, 8, 12}) {
    const double captured = object_spectrum(o, beam, 0.2, n, n).norm_squared();
    CHECK(captured <= norm * (1 + 1e-9));
    CHECK(captured >= previous);
    previous = captured;
  }
}

TEST_CASE("property: linearity of the pure image and scaling of the background") {
  const SourceGeometry g = source_geometry(1e-3, 2e-4);
  const BeamSpec beam(g.matched_waist);
  const GridSpec spec(64, 8.0 * beam.width_at(0.5));
  const SpiralSpectrum s = build_spectrum(g, 4, 4);
  ImagingSetup setup{0.5, 0.7, 4, 4};
  const ComplexField o = clover_object(spec, beam.width_at(0.5));
  const cdouble c(0.6, -1.3);
  ComplexField scaled(spec);
  for (std::size_t i = 0; i < spec.size(); ++i) scaled[i] = c * o[i];
  const GhostImageResult base = render_total(o, s, beam, setup, spec);
  const GhostImageResult other = render_total(scaled, s, beam, setup, spec);
  double peak = 0.0, bg_peak = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    peak = std::max(peak, std::abs(base.pure_field[i]));
    bg_peak = std::max(bg_peak, base.background[i]);
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    CHECK(std::abs(other.pure_field[i] - std::conj(c) * base.pure_field[i]) < 1e-12 * peak);
    CHECK(std::abs(other.background[i] - std::norm(c) * base.background[i]) < 1e-12 * bg_peak);
  }
}

TEST_CASE("property: phase conjugation with a flat spectrum and z2 = z1") {
  const SourceGeometry g = source_geometry(1e-3, 1e-4);
  const BeamSpec beam(g.matched_waist);
  const double z = 0.4;
  const GridSpec spec(96, 8.0 * beam.width_at(z));
  const ComplexField o = clover_object(spec, beam.width_at(z));
  const ModeCoefficients a = object_spectrum(o, beam, z, 8, 8);
  const ComplexField projected = synthesize(a, spec, -z);
  const ComplexField pure = render_pure_image(image_spectrum(a, SpiralSpectrum::flat(a.truncation)), spec, z);
  double peak = 0.0;
  for (const cdouble& v : projected.samples()) peak = std::max(peak, std::norm(v));
  for (std::size_t i = 0; i < spec.size(); ++i)
    if (std::norm(projected[i]) > 0.1 * peak) CHECK(std::abs(std::remainder(std::arg(pure[i]) + std::arg(projected[i]), 2 * pi)) < 0.05);
}

TEST_CASE("property: total is background plus pure intensity and background is radial") {
  const SourceGeometry g = source_geometry(1e-3, 1e-4);
  const BeamSpec beam(g.matched_waist);
  const GridSpec spec(64, 8.0 * beam.width_at(0.5));
  const GhostImageResult r = render_total(clover_object(spec, beam.width_at(0.5)), g, ImagingSetup{0.5, 0.5, 5, 5}, spec);
  for (std::size_t i = 0; i < spec.size(); ++i)
    CHECK(r.total_intensity[i] == r.background[i] + std::norm(r.pure_field[i]));
  for (int row = 0; row < 64; ++row)
    for (int col = 0; col < 64; ++col) {
      const double v = r.background.at(row, col);
      CHECK(r.background.at(col, row) == doctest::Approx(v).epsilon(1e-9));
      CHECK(r.background.at(63 - row, col) == doctest::Approx(v).epsilon(1e-9));
    }
}

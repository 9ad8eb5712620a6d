#pragma once

#include <optional>
#include <vector>

#include "ghostoam/field_grid.hpp"
#include "ghostoam/thermal_source.hpp"

namespace ghostoam {

/// Complex LG coefficients over a truncation, in ModeTruncation order.
struct ModeCoefficients {
  ModeTruncation truncation;
  std::vector<cdouble> values;
  std::optional<double> plane;  ///< plane z of the decomposition; unset for image spectra
  BeamSpec beam;

  ModeCoefficients(ModeTruncation truncation_, BeamSpec beam_, std::optional<double> plane_ = std::nullopt);

  cdouble& at(int l, int p) { return values[truncation.index(l, p)]; }
  cdouble at(int l, int p) const { return values[truncation.index(l, p)]; }
  double norm_squared() const;
};

struct GhostImageResult {
  ComplexField pure_field;   ///< coherent term
  RealRaster background;     ///< incoherent mode mixture
  RealRaster total_intensity;
  double background_weight = 0.0;  ///< sum of P |A|^2
};

/// 8-bit or 16-bit grayscale image; row 0 is the top row.
struct GrayImage {
  int width = 0;
  int height = 0;
  int max_value = 255;
  std::vector<int> pixels;
};

/// O = sqrt(intensity / max_value) exp(i phase), phase = -pi + 2 pi v / (max_value + 1).
ComplexField load_object(const GrayImage& intensity, const std::optional<GrayImage>& phase, const GridSpec& spec);

/// Parametric four-lobed test object.
///
///   amplitude(r, phi) = (r/r0)^2 exp(-r^2/r0^2) |cos 2 phi|
///   phase(phi)        = (pi/2) sin(4 phi)
///
/// Each petal carries a phase ramp from -pi/2 to +pi/2 across it.
ComplexField clover_object(const GridSpec& spec, double r0);

/// Clover radius r0 matched to the beam width at the object plane -z1.
double default_clover_radius(const BeamSpec& beam, double z1);

/// Radius beyond which the clover amplitude is below 1e-6 of its peak.
double clover_extent(double r0);

/// A_{l,p} = <LG_{l,p}(-z1) | O>, recorded at plane -z1.
ModeCoefficients object_spectrum(const ComplexField& object, const BeamSpec& beam, double z1, int l_max, int p_max);

/// Output coefficient of mode (-l, p) is P_{l,p} conj(A_{l,p}).
ModeCoefficients image_spectrum(const ModeCoefficients& object_coefficients, const SpiralSpectrum& spectrum);

/// sum_modes c * LG(mode, z), using the beam of the coefficients.
ComplexField synthesize(const ModeCoefficients& coefficients, const GridSpec& spec, double z);

ComplexField render_pure_image(const ModeCoefficients& image_coefficients, const GridSpec& spec, double z2);

struct Background {
  RealRaster raster;
  double weight = 0.0;
};

/// weight * sum P |LG(z2)|^2 with weight = sum P |A|^2.
Background render_background(const ModeCoefficients& object_coefficients, const SpiralSpectrum& spectrum,
                             const GridSpec& spec, double z2);

struct ImagingSetup {
  double z1 = 0.5;
  double z2 = 0.5;
  int l_max = 20;
  int p_max = 20;
  double wavelength = kHeNeWavelength;
};

/// Full two-term ghost image for a Gaussian-Schell source.
GhostImageResult render_total(const ComplexField& object, const SourceGeometry& geometry, const ImagingSetup& setup,
                              const GridSpec& spec);

/// Same as render_total with an explicit spectrum (e.g. a flattened one).
GhostImageResult render_total(const ComplexField& object, const SpiralSpectrum& spectrum, const BeamSpec& beam,
                              const ImagingSetup& setup, const GridSpec& spec);

}  // namespace ghostoam

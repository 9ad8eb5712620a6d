#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ghostoam {

using cdouble = std::complex<double>;

inline constexpr double kHeNeWavelength = 632.8e-9;

/// Square sampling window centred on the optical axis.
///
/// Pixel (row, col) sits at the pixel centre; row 0 is the top row (largest y),
/// columns run towards +x.
class GridSpec {
 public:
  GridSpec(int side_points, double extent);

  int side_points() const { return side_points_; }
  double extent() const { return extent_; }
  double pitch() const { return extent_ / side_points_; }
  double pixel_area() const { return pitch() * pitch(); }
  std::size_t size() const { return static_cast<std::size_t>(side_points_) * side_points_; }

  double x(int col) const { return (col + 0.5) * pitch() - 0.5 * extent_; }
  double y(int row) const { return 0.5 * extent_ - (row + 0.5) * pitch(); }

  bool operator==(const GridSpec&) const = default;

 private:
  int side_points_;
  double extent_;
};

/// Row-major raster bound to a grid.
template <class T>
class Raster {
 public:
  explicit Raster(GridSpec spec) : spec_(spec), samples_(spec.size(), T{}) {}
  Raster(GridSpec spec, std::vector<T> samples);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return samples_.size(); }

  T& at(int row, int col) { return samples_[index(row, col)]; }
  const T& at(int row, int col) const { return samples_[index(row, col)]; }
  T& operator[](std::size_t i) { return samples_[i]; }
  const T& operator[](std::size_t i) const { return samples_[i]; }

  std::span<T> samples() { return samples_; }
  std::span<const T> samples() const { return samples_; }

  /// True when every sample is finite.
  bool all_finite() const;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * spec_.side_points() + col;
  }

  GridSpec spec_;
  std::vector<T> samples_;
};

using ComplexField = Raster<cdouble>;
using RealRaster = Raster<double>;

struct ModeIndex {
  int l = 0;
  int p = 0;

  ModeIndex() = default;
  ModeIndex(int l_, int p_);

  bool operator==(const ModeIndex&) const = default;
};

/// Rectangular mode truncation |l| <= l_max, 0 <= p <= p_max.
///
/// Modes are enumerated l-major: l ascending from -l_max, then p ascending.
struct ModeTruncation {
  int l_max = 0;
  int p_max = 0;

  ModeTruncation() = default;
  ModeTruncation(int l_max_, int p_max_);

  int count() const { return (2 * l_max + 1) * (p_max + 1); }
  int index(int l, int p) const { return (l + l_max) * (p_max + 1) + p; }
  int index(ModeIndex m) const { return index(m.l, m.p); }
  ModeIndex mode(int i) const { return {i / (p_max + 1) - l_max, i % (p_max + 1)}; }
  bool contains(ModeIndex m) const { return m.l >= -l_max && m.l <= l_max && m.p >= 0 && m.p <= p_max; }

  bool operator==(const ModeTruncation&) const = default;
};

/// Laguerre-Gaussian beam parameters at the waist plane z = 0.
class BeamSpec {
 public:
  BeamSpec(double waist, double wavelength = kHeNeWavelength);

  double waist() const { return waist_; }
  double wavelength() const { return wavelength_; }
  double wavenumber() const;
  double rayleigh_range() const;
  /// 1/e^2 amplitude radius at distance z from the waist.
  double width_at(double z) const;
  /// Fundamental Gouy angle arctan(z / z_R).
  double gouy_angle(double z) const;

  bool operator==(const BeamSpec&) const = default;

 private:
  double waist_;
  double wavelength_;
};

/// Normalised LG_p^l mode value at polar position (radius, azimuth) and plane z.
///
/// Phase convention: exp(i l phi) azimuthal factor, exp(+i k r^2 / 2R(z)) curvature,
/// exp(-i (2p+|l|+1) arctan(z/z_R)) Gouy phase; the plane-wave factor exp(ikz) is
/// omitted. With this choice LG(-l, p, z) == conj(LG(l, p, -z)).
cdouble lg_amplitude(ModeIndex mode, const BeamSpec& beam, double radius, double azimuth, double z);

/// lg_amplitude at every pixel centre. Warns when the mode's ring radius leaves the window.
ComplexField sample_lg(ModeIndex mode, const BeamSpec& beam, const GridSpec& spec, double z);

/// Midpoint-rule approximation of the overlap integral of conj(a) * b.
cdouble inner_product(const ComplexField& a, const ComplexField& b);

struct IntensityPhase {
  RealRaster intensity;
  RealRaster phase;  ///< in (-pi, pi]
};

IntensityPhase intensity_and_phase(const ComplexField& f);

/// Evaluates every mode of a truncation at one point, sharing the radial
/// recurrences and azimuthal powers between modes.
class LgBasisEvaluator {
 public:
  LgBasisEvaluator(const BeamSpec& beam, double z, ModeTruncation truncation);

  const ModeTruncation& truncation() const { return truncation_; }
  const BeamSpec& beam() const { return beam_; }
  double plane() const { return z_; }

  /// Writes mode values in truncation order; out.size() must equal truncation().count().
  void evaluate(double x, double y, std::span<cdouble> out) const;

  /// Same as evaluate but only |LG|^2, independent of azimuth.
  void evaluate_intensity(double radius, std::span<double> out) const;

 private:
  void radial(double radius, std::vector<double>& values) const;

  BeamSpec beam_;
  double z_;
  ModeTruncation truncation_;
  double width_;
  double curvature_coeff_;  // k z / (2 (z^2 + z_R^2))
  std::vector<cdouble> gouy_;  // indexed by mode order 2p+|l|
};

/// Gram matrix G(i,j) = <mode_i | mode_j> over the grid, in truncation order.
Eigen::MatrixXcd gram_matrix(const ModeTruncation& truncation, const BeamSpec& beam,
                             const GridSpec& spec, double z);

/// Default square window for a beam: eight times the larger of waist and object size.
GridSpec default_grid(double waist, double object_size = 0.0, int side_points = 512);

}  // namespace ghostoam

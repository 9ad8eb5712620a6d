#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "ghostoam/field_grid.hpp"
#include "ghostoam/quantum_correlations.hpp"
#include "ghostoam/spiral_imaging.hpp"
#include "ghostoam/thermal_source.hpp"

namespace ghostoam::io {

// OAMF layout, all little-endian:
//   "OAMF" | u16 version = 1 | u32 side_points | f64 extent [m] |
//   side_points^2 x (f64 re, f64 im), row-major, top row first
void write_field(std::ostream& out, const ComplexField& field);
ComplexField read_field(std::istream& in);
void write_field(const std::filesystem::path& path, const ComplexField& field);
ComplexField read_field(const std::filesystem::path& path);

struct LinearScaling {
  double min = 0.0;
  double max = 0.0;
};

/// Binary 16-bit PGM with linear min-max scaling; a constant raster maps to 0.
LinearScaling write_pgm16(const std::filesystem::path& path, const RealRaster& raster);

/// Reads binary (P5) or plain (P2) PGM of any bit depth up to 16.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

// CSV writers. Numbers use 17 significant digits so output is reproducible bit for bit.

/// l,p,P,P_squared sorted by (|l|, l, p)
void write_spectrum_csv(std::ostream& out, const SpiralSpectrum& spectrum);
/// l,P_l
void write_marginal_csv(std::ostream& out, const SpiralSpectrum& spectrum);
/// l,p,re_A,im_A,re_B,im_B where B_{l,p} = P_{l,p} conj(A_{l,p}), the coefficient of output mode (-l, p)
void write_mode_spectrum_csv(std::ostream& out, const ModeCoefficients& object_coefficients,
                             const ModeCoefficients& image_coefficients);
/// sigma_g_over_sigma_s,L,P,d,D_rho,D_rhoQ,D_inf
void write_discord_csv(std::ostream& out, const std::vector<DiscordRow>& rows);
/// row,col,re,im for nonzero entries
void write_operator_csv(std::ostream& out, const Eigen::MatrixXcd& op);
/// l,l_prime,p,p_prime,re_f,im_f,abs_ratio,expected_ratio
void write_csd_csv(std::ostream& out, const CsdTensor& tensor, const SourceGeometry& geometry);

}  // namespace ghostoam::io

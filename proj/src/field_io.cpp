#include "ghostoam/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ghostoam/errors.hpp"

namespace ghostoam::io {
namespace {

constexpr std::array<char, 4> kMagic{'O', 'A', 'M', 'F'};
constexpr std::uint16_t kVersion = 1;

template <class U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <class U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) throw IoError("OAMF: truncated stream");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

void put_f64(std::ostream& out, double v) { put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << (v == 0.0 ? 0.0 : v);
  return s.str();
}

}  // namespace

void write_field(std::ostream& out, const ComplexField& field) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.spec().side_points()));
  put_f64(out, field.spec().extent());
  for (const cdouble& v : field.samples()) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  if (!out) throw IoError("OAMF: write failed");
}

ComplexField read_field(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw IoError("OAMF: bad magic");
  const auto version = get_le<std::uint16_t>(in);
  if (version != kVersion) throw IoError("OAMF: unsupported version " + std::to_string(version));
  const auto side = get_le<std::uint32_t>(in);
  const double extent = get_f64(in);
  if (side < 2 || side > 65535 || !(extent > 0.0)) throw IoError("OAMF: invalid grid header");
  const GridSpec spec(static_cast<int>(side), extent);
  ComplexField field(spec);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    field[i] = cdouble(re, im);
  }
  if (!field.all_finite()) throw IoError("OAMF: non-finite samples");
  return field;
}

void write_field(const std::filesystem::path& path, const ComplexField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_field(out, field);
}

ComplexField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_field(in);
}

LinearScaling write_pgm16(const std::filesystem::path& path, const RealRaster& raster) {
  const auto samples = raster.samples();
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const LinearScaling scaling{*lo, *hi};
  const double span = scaling.max - scaling.min;

  GrayImage image;
  image.width = image.height = raster.spec().side_points();
  image.max_value = 65535;
  image.pixels.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double unit = span > 0.0 ? (samples[i] - scaling.min) / span : 0.0;
    image.pixels[i] = static_cast<int>(std::lround(std::clamp(unit, 0.0, 1.0) * 65535.0));
  }
  write_pgm(path, image);
  return scaling;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P5\n" << image.width << ' ' << image.height << '\n' << image.max_value << '\n';
  const bool wide = image.max_value > 255;
  for (int v : image.pixels) {
    if (wide) out.put(static_cast<char>((v >> 8) & 0xFF));
    out.put(static_cast<char>(v & 0xFF));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int header_int(std::istream& in, const std::filesystem::path& path) {
  const std::string token = header_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw IoError("PGM: malformed header in " + path.string());
  }
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = header_token(in);
  if (magic != "P5" && magic != "P2") throw IoError("PGM: unsupported format in " + path.string());
  GrayImage image;
  image.width = header_int(in, path);
  image.height = header_int(in, path);
  image.max_value = header_int(in, path);
  if (image.width <= 0 || image.height <= 0 || image.max_value <= 0 || image.max_value > 65535)
    throw IoError("PGM: invalid dimensions in " + path.string());
  const std::size_t count = static_cast<std::size_t>(image.width) * image.height;
  image.pixels.resize(count);
  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) image.pixels[i] = header_int(in, path);
  } else {
    const bool wide = image.max_value > 255;
    for (std::size_t i = 0; i < count; ++i) {
      int v = in.get();
      if (wide) v = (v << 8) | in.get();
      if (!in) throw IoError("PGM: truncated pixel data in " + path.string());
      image.pixels[i] = v;
    }
  }
  for (int v : image.pixels)
    if (v < 0 || v > image.max_value) throw IoError("PGM: pixel above max value in " + path.string());
  return image;
}

void write_spectrum_csv(std::ostream& out, const SpiralSpectrum& spectrum) {
  out << "l,p,P,P_squared\n";
  auto rows_for = [&](int l) {
    for (int p = 0; p <= spectrum.p_max(); ++p) {
      const double a = spectrum.amplitude(l, p);
      out << l << ',' << p << ',' << number(a) << ',' << number(a * a) << '\n';
    }
  };
  rows_for(0);
  for (int m = 1; m <= spectrum.l_max(); ++m) {
    rows_for(-m);
    rows_for(m);
  }
}

void write_marginal_csv(std::ostream& out, const SpiralSpectrum& spectrum) {
  out << "l,P_l\n";
  const std::vector<double> marginal = spectrum.oam_marginal();
  for (int l = -spectrum.l_max(); l <= spectrum.l_max(); ++l) out << l << ',' << number(marginal[l + spectrum.l_max()]) << '\n';
}

void write_mode_spectrum_csv(std::ostream& out, const ModeCoefficients& object_coefficients,
                             const ModeCoefficients& image_coefficients) {
  if (!(object_coefficients.truncation == image_coefficients.truncation))
    throw std::invalid_argument("mode spectrum CSV: truncations differ");
  const ModeTruncation& tr = object_coefficients.truncation;
  out << "l,p,re_A,im_A,re_B,im_B\n";
  for (int l = -tr.l_max; l <= tr.l_max; ++l) {
    for (int p = 0; p <= tr.p_max; ++p) {
      const cdouble a = object_coefficients.at(l, p);
      const cdouble b = image_coefficients.at(-l, p);
      out << l << ',' << p << ',' << number(a.real()) << ',' << number(a.imag()) << ',' << number(b.real()) << ','
          << number(b.imag()) << '\n';
    }
  }
}

void write_discord_csv(std::ostream& out, const std::vector<DiscordRow>& rows) {
  out << "sigma_g_over_sigma_s,L,P,d,D_rho,D_rhoQ,D_inf\n";
  for (const DiscordRow& r : rows)
    out << number(r.sigma_g_over_sigma_s) << ',' << r.l_max << ',' << r.p_max << ',' << r.d << ',' << number(r.d_rho)
        << ',' << number(r.d_rho_q) << ',' << number(r.d_inf) << '\n';
}

void write_operator_csv(std::ostream& out, const Eigen::MatrixXcd& op) {
  out << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < op.rows(); ++i)
    for (Eigen::Index j = 0; j < op.cols(); ++j)
      if (op(i, j) != cdouble{}) out << i << ',' << j << ',' << number(op(i, j).real()) << ',' << number(op(i, j).imag()) << '\n';
}

void write_csd_csv(std::ostream& out, const CsdTensor& tensor, const SourceGeometry& geometry) {
  const ModeTruncation& tr = tensor.truncation();
  const double reference = std::abs(tensor.at(0, 0, 0, 0));
  out << "l,l_prime,p,p_prime,re_f,im_f,abs_ratio,expected_ratio\n";
  for (int a = 0; a < tr.count(); ++a) {
    for (int b = 0; b < tr.count(); ++b) {
      const ModeIndex ma = tr.mode(a), mb = tr.mode(b);
      const cdouble f = tensor.at(ma.l, mb.l, ma.p, mb.p);
      const bool on_target = mb.l == -ma.l && mb.p == ma.p;
      const double expected = on_target ? std::pow(geometry.t, std::abs(ma.l) + 2 * ma.p) : 0.0;
      out << ma.l << ',' << mb.l << ',' << ma.p << ',' << mb.p << ',' << number(f.real()) << ',' << number(f.imag())
          << ',' << number(reference > 0.0 ? std::abs(f) / reference : 0.0) << ',' << number(expected) << '\n';
    }
  }
}

}  // namespace ghostoam::io

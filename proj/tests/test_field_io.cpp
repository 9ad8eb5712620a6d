#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "ghostoam/errors.hpp"
#include "ghostoam/field_io.hpp"

using namespace ghostoam;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ghostoam_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("property: OAMF round trip is bit exact") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int side : {2, 3, 17, 64}) {
    ComplexField f(GridSpec(side, 1e-3 * side));
    for (cdouble& v : f.samples()) v = {g(rng), g(rng) * 1e-300};
    std::stringstream buf;
    io::write_field(buf, f);
    CHECK(buf.str().size() == 4 + 2 + 4 + 8 + 16 * f.size());
    const ComplexField back = io::read_field(buf);
    CHECK(back.spec() == f.spec());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);
  }
}

TEST_CASE("OAMF header layout is little endian") {
  ComplexField f(GridSpec(2, 1.0));
  std::stringstream buf;
  io::write_field(buf, f);
  const std::string s = buf.str();
  CHECK(s.substr(0, 4) == "OAMF");
  CHECK(static_cast<unsigned char>(s[4]) == 1);
  CHECK(static_cast<unsigned char>(s[5]) == 0);
  CHECK(static_cast<unsigned char>(s[6]) == 2);
}

TEST_CASE("OAMF rejects damaged input") {
  std::stringstream bad("NOPE");
  CHECK_THROWS_AS(io::read_field(bad), IoError);
  ComplexField f(GridSpec(4, 1.0));
  std::stringstream buf;
  io::write_field(buf, f);
  std::stringstream cut(buf.str().substr(0, 40));
  CHECK_THROWS_AS(io::read_field(cut), IoError);
  CHECK_THROWS_AS(io::read_field(fs::path("/nonexistent/dir/x.oamf")), IoError);
}

TEST_CASE("PGM round trip and scaling") {
  RealRaster r(GridSpec(3, 1.0));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 2.0 + 0.5 * i;
  const fs::path p = scratch("ramp.pgm");
  const io::LinearScaling s = io::write_pgm16(p, r);
  CHECK(s.min == 2.0);
  CHECK(s.max == 6.0);
  const GrayImage img = io::read_pgm(p);
  CHECK(img.width == 3);
  CHECK(img.max_value == 65535);
  CHECK(img.pixels.front() == 0);
  CHECK(img.pixels.back() == 65535);
  CHECK(img.pixels[4] == 32768);

  const fs::path ascii = scratch("plain.pgm");
  std::ofstream(ascii) << "P2\n# comment\n2 2\n255\n0 10\n200 255\n";
  const GrayImage a = io::read_pgm(ascii);
  CHECK(a.pixels == std::vector<int>{0, 10, 200, 255});

  const fs::path eight = scratch("eight.pgm");
  io::write_pgm(eight, a);
  CHECK(io::read_pgm(eight).pixels == a.pixels);

  std::ofstream(scratch("bad.pgm")) << "P6\n1 1\n255\n";
  CHECK_THROWS_AS(io::read_pgm(scratch("bad.pgm")), IoError);
}

TEST_CASE("constant raster maps to zero") {
  RealRaster r(GridSpec(2, 1.0));
  for (double& v : r.samples()) v = 3.0;
  io::write_pgm16(scratch("flat.pgm"), r);
  for (int v : io::read_pgm(scratch("flat.pgm")).pixels) CHECK(v == 0);
}

TEST_CASE("CSV headers and ordering") {
  const SpiralSpectrum s = build_spectrum(source_geometry(1e-3, 2e-3), 1, 1);
  std::ostringstream spectrum, marginal;
  io::write_spectrum_csv(spectrum, s);
  io::write_marginal_csv(marginal, s);
  std::istringstream lines(spectrum.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "l,p,P,P_squared");
  std::getline(lines, line);
  CHECK(line.rfind("0,0,", 0) == 0);
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(line.rfind("-1,0,", 0) == 0);
  CHECK(marginal.str().rfind("l,P_l\n-1,", 0) == 0);

  const BeamSpec beam(1e-3);
  ModeCoefficients a(ModeTruncation(1, 0), beam, -0.5);
  a.at(1, 0) = cdouble(1.0, 2.0);
  const SpiralSpectrum flat = SpiralSpectrum::flat(ModeTruncation(1, 0), 0.5);
  const ModeCoefficients b = image_spectrum(a, flat);
  std::ostringstream modes;
  io::write_mode_spectrum_csv(modes, a, b);
  CHECK(modes.str() == "l,p,re_A,im_A,re_B,im_B\n-1,0,0,0,0,0\n0,0,0,0,0,0\n1,0,1,2,0.5,-1\n");

  std::ostringstream discord;
  io::write_discord_csv(discord, {{1.5, 2, 3, 20, 0.01, 0.2, 0.015}});
  CHECK(discord.str() == "sigma_g_over_sigma_s,L,P,d,D_rho,D_rhoQ,D_inf\n1.5,2,3,20,0.01,0.20000000000000001,0.014999999999999999\n");

  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(2, 2);
  op(1, 0) = cdouble(0.25, -1.0);
  std::ostringstream ops;
  io::write_operator_csv(ops, op);
  CHECK(ops.str() == "row,col,re,im\n1,0,0.25,-1\n");
}

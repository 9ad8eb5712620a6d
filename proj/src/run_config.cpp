#include "ghostoam/run_config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ghostoam/errors.hpp"
#include "ghostoam/field_io.hpp"
#include "ghostoam/quantum_correlations.hpp"
#include "ghostoam/spiral_imaging.hpp"
#include "ghostoam/thermal_source.hpp"
#include "ghostoam/verification.hpp"

namespace ghostoam::cli {
namespace fs = std::filesystem;

namespace {

// Every key accepted on the command line and in config files.
const std::vector<std::string> kKeys{"command", "sigma-s",     "sigma-g",     "wavelength", "z1",     "z2",
                                     "l-max",   "p-max",       "grid",        "extent",     "out",    "out-prefix",
                                     "seed",    "object",      "phase",       "sigma-g-min", "sigma-g-max",
                                     "samples", "dims",        "suite"};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string canonical_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

double parse_double(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || errno == ERANGE || std::isnan(v))
    throw UsageError(key + ": cannot parse '" + text + "' as a number");
  return v;
}

double parse_length(const std::string& key, const std::string& text, bool allow_inf = false) {
  if (allow_inf && (text == "inf" || text == "infinity")) return std::numeric_limits<double>::infinity();
  const double v = parse_double(key, text);
  if (!(v > 0.0) || std::isinf(v)) throw UsageError(key + ": must be a positive finite length in meters, got '" + text + "'");
  return v;
}

double parse_plane(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!(v > 0.0) || std::isinf(v)) throw UsageError(key + ": must be a positive distance in meters, got '" + text + "'");
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (text.empty() || end != begin + text.size() || errno == ERANGE)
    throw UsageError(key + ": cannot parse '" + text + "' as an integer");
  return v;
}

int parse_count(const std::string& key, const std::string& text, int min_value) {
  const long long v = parse_integer(key, text);
  if (v < min_value || v > 1'000'000) throw UsageError(key + ": out of range, got '" + text + "'");
  return static_cast<int>(v);
}

std::vector<std::pair<int, int>> parse_dims(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  std::stringstream list(text);
  std::string item;
  while (std::getline(list, item, ',')) {
    item = trim(item);
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("dims: expected L:P pairs, got '" + item + "'");
    out.emplace_back(parse_count("dims", trim(item.substr(0, colon)), 0), parse_count("dims", trim(item.substr(colon + 1)), 0));
  }
  return out;
}

void apply(RunConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = canonical_key(raw_key);
  if (key == "command") {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), value) == names.end()) throw UsageError("command: unknown command '" + value + "'");
    c.command = value;
  } else if (key == "sigma-s") {
    c.sigma_s = parse_length(key, value);
  } else if (key == "sigma-g") {
    c.sigma_g = parse_length(key, value, true);
  } else if (key == "wavelength") {
    c.wavelength = parse_length(key, value);
  } else if (key == "z1") {
    c.z1 = parse_plane(key, value);
  } else if (key == "z2") {
    c.z2 = parse_plane(key, value);
  } else if (key == "l-max") {
    c.l_max = parse_count(key, value, 0);
  } else if (key == "p-max") {
    c.p_max = parse_count(key, value, 0);
  } else if (key == "grid") {
    c.grid = parse_count(key, value, 2);
  } else if (key == "extent") {
    c.extent = parse_length(key, value);
  } else if (key == "out") {
    if (value.empty()) throw UsageError("out: empty path");
    c.out = value;
  } else if (key == "out-prefix") {
    if (value.empty() || value.find('/') != std::string::npos) throw UsageError("out-prefix: must be a nonempty file name prefix");
    c.out_prefix = value;
  } else if (key == "seed") {
    const long long v = parse_integer(key, value);
    if (v < 0) throw UsageError("seed: must be nonnegative");
    c.seed = static_cast<std::uint64_t>(v);
  } else if (key == "object") {
    if (value.empty()) throw UsageError("object: empty value");
    c.object = value;
  } else if (key == "phase") {
    c.phase = value;
  } else if (key == "sigma-g-min") {
    c.sigma_g_min = parse_length(key, value);
  } else if (key == "sigma-g-max") {
    c.sigma_g_max = parse_length(key, value);
  } else if (key == "samples") {
    c.samples = parse_count(key, value, 2);
  } else if (key == "dims") {
    parse_dims(value);
    c.dims = value;
  } else if (key == "suite") {
    const auto& names = verify::suite_names();
    if (value != "all" && std::find(names.begin(), names.end(), value) == names.end())
      throw UsageError("suite: unknown suite '" + value + "'");
    c.suite = value;
  } else {
    throw UsageError(raw_key + ": unknown key");
  }
}

void check_consistency(const RunConfig& c) {
  if (c.sigma_g_min >= c.sigma_g_max) throw UsageError("sigma-g-min: must be below sigma-g-max");
}

std::string number(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string usage_footer() {
  return "Lengths are in meters. Config files hold `key = value` lines with the flag names as keys.\n"
         "Exit codes: 0 success, 1 usage, 2 numerical verification failure, 3 I/O failure.\n";
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"spectrum", "image", "discord", "oracle-csd", "verify"};
  return names;
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::map<std::string, std::string> values;
  std::string line;
  int number_of_line = 0;
  while (std::getline(in, line)) {
    ++number_of_line;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path.string() + ":" + std::to_string(number_of_line) + ": expected key = value");
    const std::string key = canonical_key(trim(line.substr(0, eq)));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw UsageError(key + ": unknown key in " + path.string());
    values[key] = trim(line.substr(eq + 1));
  }
  return values;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Ghost imaging with thermal OAM light: spectra, images, discord and verification."};
  app.footer(usage_footer());
  std::map<std::string, std::string> flags;
  std::string config_path;

  const std::vector<std::pair<std::string, std::string>> descriptions{
      {"sigma-s", "source size sigma_s [m]"},
      {"sigma-g", "coherence width sigma_g [m], or inf"},
      {"wavelength", "wavelength [m]"},
      {"z1", "source to object distance [m]"},
      {"z2", "source to camera distance [m]"},
      {"l-max", "OAM truncation L"},
      {"p-max", "radial truncation P"},
      {"grid", "grid side in pixels"},
      {"extent", "grid side length [m]"},
      {"out", "output directory"},
      {"out-prefix", "output file name prefix"},
      {"seed", "seed for randomized searches"},
      {"object", "image: 'clover' or an intensity PGM"},
      {"phase", "image: optional phase PGM"},
      {"sigma-g-min", "discord: lowest sigma_g [m]"},
      {"sigma-g-max", "discord: highest sigma_g [m]"},
      {"samples", "discord: number of log-spaced sigma_g samples"},
      {"dims", "discord: truncations as L:P,L:P (overrides l-max/p-max)"},
      {"suite", "verify: suite name or all"},
  };
  for (const auto& [key, text] : descriptions) app.add_option("--" + key, flags[key], text);
  app.add_option("--config", config_path, "key = value config file");

  std::string command;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run " + name);
    sub->fallthrough();
    sub->callback([&command, name] { command = name; });
  }
  app.require_subcommand(0, 1);

  std::vector<const char*> argv{"ghostoam"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig config;
  if (!config_path.empty())
    for (const auto& [key, value] : read_config_file(config_path)) apply(config, key, value);
  for (const auto& [key, text] : descriptions)
    if (app.count("--" + key) > 0) apply(config, key, flags[key]);
  if (!command.empty()) config.command = command;
  if (config.command.empty()) throw UsageError("command: none given (expected spectrum, image, discord, oracle-csd or verify)");
  check_consistency(config);
  return config;
}

RunConfig resolve(const RunConfig& config) {
  RunConfig r = config;
  if (r.command == "verify") return r;
  const bool csd = r.command == "oracle-csd";
  if (!r.l_max) r.l_max = csd ? 3 : 20;
  if (!r.p_max) r.p_max = csd ? 3 : 20;
  if (r.command == "image" || csd) {
    const SourceGeometry g = source_geometry(r.sigma_s, r.sigma_g);
    const BeamSpec beam(g.matched_waist, r.wavelength);
    if (csd) {
      if (!r.grid) r.grid = 128;
      if (!r.extent) r.extent = 12.0 * g.matched_waist;
    } else {
      if (!r.grid) {
        r.grid = 512;
        if (r.object != "clover") r.grid = io::read_pgm(r.object).width;
      }
      if (!r.extent) {
        const double r0 = r.object == "clover" ? default_clover_radius(beam, r.z1) : 0.0;
        r.extent = default_grid(beam.width_at(-r.z1), r0, *r.grid).extent();
      }
    }
  }
  return r;
}

std::string manifest_text(const RunConfig& c, const std::vector<fs::path>& outputs) {
  std::ostringstream s;
  s << "# ghostoam run manifest; pass back with --config to reproduce\n";
  s << "command = " << c.command << '\n';
  s << "sigma-s = " << number(c.sigma_s) << '\n';
  s << "sigma-g = " << number(c.sigma_g) << '\n';
  s << "wavelength = " << number(c.wavelength) << '\n';
  s << "z1 = " << number(c.z1) << '\n';
  s << "z2 = " << number(c.z2) << '\n';
  if (c.l_max) s << "l-max = " << *c.l_max << '\n';
  if (c.p_max) s << "p-max = " << *c.p_max << '\n';
  if (c.grid) s << "grid = " << *c.grid << '\n';
  if (c.extent) s << "extent = " << number(*c.extent) << '\n';
  s << "out = " << c.out.string() << '\n';
  s << "out-prefix = " << c.out_prefix << '\n';
  s << "seed = " << c.seed << '\n';
  s << "object = " << c.object << '\n';
  if (!c.phase.empty()) s << "phase = " << c.phase << '\n';
  s << "sigma-g-min = " << number(c.sigma_g_min) << '\n';
  s << "sigma-g-max = " << number(c.sigma_g_max) << '\n';
  s << "samples = " << c.samples << '\n';
  if (!c.dims.empty()) s << "dims = " << c.dims << '\n';
  s << "suite = " << c.suite << '\n';
  for (const fs::path& p : outputs) s << "# output: " << p.filename().string() << '\n';
  return s.str();
}

namespace {

class Outputs {
 public:
  explicit Outputs(const RunConfig& c) : dir_(c.out), prefix_(c.out_prefix) {}

  fs::path path(const std::string& suffix) {
    fs::path p = dir_ / (prefix_ + suffix);
    files_.push_back(p);
    return p;
  }

  template <class Writer>
  void text(const std::string& suffix, Writer&& write) {
    const fs::path p = path(suffix);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    write(out);
    if (!out) throw IoError("write failed for " + p.string());
  }

  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::string prefix_;
  std::vector<fs::path> files_;
};

void ensure_writable(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (!fs::is_directory(c.out)) throw IoError("output directory " + c.out.string() + " cannot be created");
  const fs::path probe = c.out / (c.out_prefix + ".write_probe");
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory " + c.out.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

int run_spectrum(const RunConfig& c, Outputs& out, std::ostream& log) {
  const SourceGeometry g = source_geometry(c.sigma_s, c.sigma_g);
  const SpiralSpectrum spectrum = build_spectrum(g, *c.l_max, *c.p_max);
  out.text("_spectrum.csv", [&](std::ostream& s) { io::write_spectrum_csv(s, spectrum); });
  out.text("_marginal.csv", [&](std::ostream& s) { io::write_marginal_csv(s, spectrum); });
  log << std::setprecision(10) << "t = " << g.t << ", matched waist = " << g.matched_waist << " m"
      << ", sum P^2 = " << spectrum.sum_squares() << ", Schmidt number = " << schmidt_number(spectrum) << '\n';
  return kSuccess;
}

int run_image(const RunConfig& c, Outputs& out, std::ostream& log) {
  const SourceGeometry g = source_geometry(c.sigma_s, c.sigma_g);
  const BeamSpec beam(g.matched_waist, c.wavelength);
  const GridSpec spec(*c.grid, *c.extent);
  ComplexField object(spec);
  if (c.object == "clover") {
    object = clover_object(spec, default_clover_radius(beam, c.z1));
  } else {
    std::optional<GrayImage> phase;
    if (!c.phase.empty()) phase = io::read_pgm(c.phase);
    object = load_object(io::read_pgm(c.object), phase, spec);
  }
  ImagingSetup setup{c.z1, c.z2, *c.l_max, *c.p_max, c.wavelength};
  const SpiralSpectrum spectrum = build_spectrum(g, setup.l_max, setup.p_max);
  const ModeCoefficients a = object_spectrum(object, beam, setup.z1, setup.l_max, setup.p_max);
  const ModeCoefficients b = image_spectrum(a, spectrum);
  const ComplexField pure = render_pure_image(b, spec, setup.z2);
  const Background bg = render_background(a, spectrum, spec, setup.z2);

  RealRaster total(spec);
  for (std::size_t i = 0; i < spec.size(); ++i) total[i] = bg.raster[i] + std::norm(pure[i]);
  const IntensityPhase ip = intensity_and_phase(pure);

  std::ostringstream scaling;
  scaling << std::setprecision(17);
  auto pgm = [&](const std::string& name, const RealRaster& raster) {
    const io::LinearScaling s = io::write_pgm16(out.path("_" + name + ".pgm"), raster);
    scaling << name << " min = " << s.min << " max = " << s.max << '\n';
  };
  pgm("pure_intensity", ip.intensity);
  pgm("pure_phase", ip.phase);
  pgm("background", bg.raster);
  pgm("total", total);
  out.text("_scaling.txt", [&](std::ostream& s) {
    s << "# pixel value v maps to min + (max - min) v / 65535\n" << scaling.str();
  });
  out.text("_spectrum.csv", [&](std::ostream& s) { io::write_mode_spectrum_csv(s, a, b); });
  io::write_field(out.path("_object.oamf"), object);
  io::write_field(out.path("_pure_field.oamf"), pure);

  log << std::setprecision(6) << "grid " << spec.side_points() << "^2 over " << spec.extent() << " m; captured |A|^2 = "
      << a.norm_squared() / std::real(inner_product(object, object)) << ", background weight = " << bg.weight << '\n';
  return kSuccess;
}

int run_discord(const RunConfig& c, Outputs& out, std::ostream& log) {
  std::vector<std::pair<int, int>> dims = c.dims.empty() ? std::vector<std::pair<int, int>>{{*c.l_max, *c.p_max}}
                                                         : parse_dims(c.dims);
  std::vector<double> samples(c.samples);
  for (int i = 0; i < c.samples; ++i)
    samples[i] = c.sigma_g_min * std::pow(c.sigma_g_max / c.sigma_g_min, static_cast<double>(i) / (c.samples - 1));
  const std::vector<DiscordRow> rows = discord_curve(c.sigma_s, samples, dims);
  out.text("_discord.csv", [&](std::ostream& s) { io::write_discord_csv(s, rows); });
  const auto best = std::max_element(rows.begin(), rows.end(),
                                     [](const DiscordRow& x, const DiscordRow& y) { return x.d_rho < y.d_rho; });
  log << std::setprecision(8) << "max D_rho = " << best->d_rho << " at sigma_g/sigma_s = " << best->sigma_g_over_sigma_s
      << " (L = " << best->l_max << ", P = " << best->p_max << ")\n";
  return kSuccess;
}

int run_oracle_csd(const RunConfig& c, Outputs& out, std::ostream& log) {
  const SourceGeometry g = source_geometry(c.sigma_s, c.sigma_g);
  const GridSpec spec(*c.grid, *c.extent);
  const CsdTensor tensor = csd_mode_decompose(g, *c.l_max, *c.p_max, spec);
  out.text("_csd.csv", [&](std::ostream& s) { io::write_csd_csv(s, tensor, g); });
  const double f0 = std::abs(tensor.at(0, 0, 0, 0));
  double ratio_err = 0.0;
  for (int l = -*c.l_max; l <= *c.l_max; ++l)
    for (int p = 0; p <= *c.p_max; ++p)
      ratio_err = std::max(ratio_err, std::abs(std::abs(tensor.at(l, -l, p, p)) / f0 - std::pow(g.t, std::abs(l) + 2 * p)));
  const double off = tensor.max_off_target() / f0;
  const bool ok = off < 1e-3 && ratio_err < 1e-3;
  log << (ok ? "PASS" : "FAIL") << " csd oracle: off-target/f0 = " << off << ", max ratio error = " << ratio_err
      << " (both < 1e-3)\n";
  return ok ? kSuccess : kVerificationFailed;
}

int run_verify(const RunConfig& c, Outputs& out, std::ostream& log) {
  verify::SuiteOptions options;
  options.l_max = c.l_max;
  options.p_max = c.p_max;
  options.seed = c.seed;
  const std::vector<verify::CriterionResult> results = verify::run_suite(c.suite, options);
  bool ok = true;
  std::ostringstream report;
  for (const auto& r : results) {
    report << verify::format(r) << '\n';
    ok = ok && r.passed;
  }
  log << report.str();
  out.text("_verify.txt", [&](std::ostream& s) { s << report.str(); });
  return ok ? kSuccess : kVerificationFailed;
}

}  // namespace

int run_command(const RunConfig& config, std::ostream& log) {
  const RunConfig c = resolve(config);
  ensure_writable(c);
  Outputs out(c);
  int status = kSuccess;
  if (c.command == "spectrum") {
    status = run_spectrum(c, out, log);
  } else if (c.command == "image") {
    status = run_image(c, out, log);
  } else if (c.command == "discord") {
    status = run_discord(c, out, log);
  } else if (c.command == "oracle-csd") {
    status = run_oracle_csd(c, out, log);
  } else if (c.command == "verify") {
    status = run_verify(c, out, log);
  } else {
    throw UsageError("command: unknown command '" + c.command + "'");
  }
  const fs::path manifest = out.path("_run_manifest.txt");
  std::ofstream m(manifest, std::ios::binary);
  if (!m) throw IoError("cannot open " + manifest.string() + " for writing");
  m << manifest_text(c, out.files());
  if (!m) throw IoError("write failed for " + manifest.string());
  log << "wrote " << out.files().size() << " files to " << c.out.string() << '\n';
  return status;
}

int main_entry(const std::vector<std::string>& args, std::ostream& log, std::ostream& err) {
  try {
    return run_command(parse_config(args), log);
  } catch (const HelpRequested& h) {
    log << h.text;
    return kSuccess;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\nrun with --help for the list of options\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }
}

}  // namespace ghostoam::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghostoam/field_grid.hpp"

namespace ghostoam::cli {

/// Bad flag, bad config key or bad value. The message names the key.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by parse_config for -h/--help.
struct HelpRequested {
  std::string text;
};

struct RunConfig {
  std::string command;  ///< spectrum, image, discord, oracle-csd, verify
  double sigma_s = 1e-3;
  double sigma_g = 2.5e-5;  ///< +inf for a coherent source
  double wavelength = kHeNeWavelength;
  double z1 = 0.5;
  double z2 = 0.5;
  std::optional<int> l_max;  ///< unset means the command default
  std::optional<int> p_max;
  std::optional<int> grid;
  std::optional<double> extent;
  std::filesystem::path out = ".";
  std::string out_prefix = "ghost";
  std::uint64_t seed = 0;

  std::string object = "clover";  ///< "clover" or a PGM path
  std::string phase;              ///< optional phase PGM

  double sigma_g_min = 2e-4;
  double sigma_g_max = 1e-2;
  int samples = 200;
  std::string dims;  ///< extra discord truncations, "L:P,L:P"

  std::string suite = "all";

  bool operator==(const RunConfig&) const = default;
};

/// Subcommand names in dispatch order.
const std::vector<std::string>& command_names();

/// Reads `key = value` lines; '#' starts a comment. Keys use flag spelling
/// without dashes prefix ("sigma-s"); underscores are accepted for dashes.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Applies defaults, then the config file named by --config, then flags.
/// `args` excludes the program name. Throws UsageError.
RunConfig parse_config(const std::vector<std::string>& args);

/// Fills unset truncation and grid fields with the command defaults.
/// Leaves them unset for verify, where they select a sub-case.
RunConfig resolve(const RunConfig& config);

/// key = value text that parse_config reads back to the same config.
std::string manifest_text(const RunConfig& config, const std::vector<std::filesystem::path>& outputs);

/// Exit codes of run_command.
enum ExitCode : int { kSuccess = 0, kUsage = 1, kVerificationFailed = 2, kIoFailure = 3 };

/// Runs one command, writing files under config.out and progress to `log`.
int run_command(const RunConfig& config, std::ostream& log);

/// parse_config + run_command with error-to-exit-code mapping.
int main_entry(const std::vector<std::string>& args, std::ostream& log, std::ostream& err);

}  // namespace ghostoam::cli

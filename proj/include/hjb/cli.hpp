#pragma once

// Command-line front end: flat key=value configuration, subcommand dispatch
// and file emission.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hjb::cli {

inline constexpr const char* kVersion = "hjb 0.1.0";

enum ExitCode : int { Success = 0, AssertionFailure = 1, ConfigError = 2, NonConvergence = 3 };

/// Fully resolved run configuration. Every field has a key of the same
/// name in the config file and a `--key` flag.
struct RunConfig {
  std::string subcommand;
  std::string study;  // validate only

  std::string domain = "ball";  // interval | ball | annulus | box
  double radius = 1.0;          // interval, ball
  double inner = 0.5;           // annulus
  double outer = 1.0;           // annulus
  double width = 2.0;           // box, every axis
  int n = 2;
  double r = 1.0;
  double g = 0.0;
  double h = 1.0 / 64.0;
  double epsilon = 1e-2;
  double delta = 0.05;
  std::optional<double> dt;
  int M = 16;
  bool dt_override = false;
  double tolerance = 1e-10;
  int max_sweeps = 10'000;
  std::string init = "above";          // above | boundary
  std::string update = "gauss-seidel";  // gauss-seidel | jacobi
  std::optional<double> relaxation;
  std::uint64_t seed = 1;
  int trials = 25;
  std::string fixture;  // validate; empty picks the study default
  std::vector<double> h_list;
  std::vector<double> eps_list;
  std::vector<double> R_list;
  std::filesystem::path output;
};

/// Keys accepted in files and as flags, in echo order.
const std::vector<std::string>& config_keys();

/// key=value tokens separated by whitespace; '#' starts a comment. Throws
/// ConfigParse (with line number) on malformed tokens and unknown keys.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Applies `values` over the defaults and validates. Throws Validation
/// naming the offending field.
RunConfig resolve(const std::string& subcommand, const std::map<std::string, std::string>& values);

/// Resolved values as strings, keyed like the config file.
std::map<std::string, std::string> echo(const RunConfig& config);

/// One row per defaulted key: CLI default against the module default.
struct DefaultRow {
  std::string key;
  std::string cli;
  std::string module;
};
std::vector<DefaultRow> default_table();

/// Executes a resolved configuration, writing into config.output.
int run(const RunConfig& config);

/// Parses argv (flags override the --config file) and runs. Errors are
/// printed to stderr as JSON and written to error.json when an output
/// directory is known.
int main(int argc, const char* const* argv);

}  // namespace hjb::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "satisrank/divergence.hpp"
#include "satisrank/risk_core.hpp"

namespace satisrank {

enum class Command { Batch, Online, Bounds, SampleSize, RankProb, Simulate };

std::string_view command_name(Command command);

/// Fully resolved command line. Optional fields stay empty when the command
/// does not use them or the user left them unset.
struct RunConfig {
  Command command = Command::Batch;
  DivergenceSpec divergence;
  RegretScaling scaling = RegretScaling::InverseAlpha;
  double epsilon = 1e-4;
  std::uint64_t seed = 0;
  std::string output_path;  // empty: report goes to stdout

  std::optional<std::string> input;
  std::optional<std::string> stream;
  std::optional<std::string> dist;
  std::optional<std::string> params_file;
  std::vector<double> tau;
  std::optional<std::int64_t> n;
  std::optional<int> items;
  std::optional<std::int64_t> iters;
  double delta = 0.05;
  double gamma = 0.05;
  int groups = 10;
  std::optional<int> group_size;
  int resample_factor = 10;
  bool threshold_tau = false;
  bool literal_sup = false;
  bool literal_steps = false;
  std::optional<double> big_m;
  std::int64_t history_points = 1000;

  std::string mode = "inversion";  // rankprob: inversion | validity
  std::optional<std::int64_t> e;
  std::optional<double> gap_c;
  std::optional<double> kappa;
  std::optional<std::int64_t> n1;
  std::optional<std::int64_t> n2;
  bool literal_binomial = false;
};

/// Parses arguments (without the program name). Help requests return
/// nullopt after printing usage to `out`.
std::optional<RunConfig> parse_command_line(const std::vector<std::string>& args,
                                            std::ostream& out);

/// Runs a resolved configuration. Writes the JSON report to the output path
/// (or `out`) and returns the exit status. Errors become a JSON record on
/// `err` and a nonzero status.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_command_line followed by execute, with argument errors reported the
/// same way as runtime errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace satisrank

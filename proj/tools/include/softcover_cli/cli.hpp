#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "softcover/probability.hpp"

namespace softcover::cli {

enum ExitCode : int {
  kOk = 0,
  kIoFailure = 1,
  kInvalidInput = 2,
  kResourceCap = 3,
};

/// Parses argv (including the program name) and runs one subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ChannelSpec {
  FiniteDistribution qx;
  Channel ch;
  std::string label;
};

/// Accepts `bsc:p`, `bec:p`, `noiseless:k`, an inline JSON object
/// `{"input_dist": [...], "channel_rows": [[...], ...]}`, or a path to a file
/// holding such an object. Shorthands use the uniform input distribution.
ChannelSpec parse_channel_spec(const std::string& text);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

/// --threads flag, then SOFTCOVER_THREADS, then the config value, then all cores.
unsigned resolve_threads(std::optional<long long> flag, std::optional<long long> config);

}  // namespace softcover::cli

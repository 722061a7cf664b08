#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "greenp2cli/map_io.hpp"

namespace greenp2cli {

enum class Command { Green, Mult, Invariants, Classify, Equidist, Lelong, Kiselman, Volume, Gen };

inline constexpr std::uint64_t kFallbackSeed = 0x5EED;

/// Unset optionals take the per-command defaults listed in `greenp2 --help`.
struct RunConfig {
  Command command = Command::Green;
  /// Map file; empty reads the map from the input stream.
  std::string map_path;
  std::string out_path;
  std::string csv_path;
  std::uint64_t seed = kFallbackSeed;
  std::optional<int> n;
  std::optional<int> samples;
  std::optional<double> tol;
  int threads = 1;
  std::optional<int> d;
  std::optional<std::string> row;
  /// gen: "table1" or "lattes-ueda".
  std::string generator;
  std::optional<std::string> curve;
  std::vector<std::string> points;
  std::optional<double> radius;
  std::vector<double> alphas;
};

/// GREENP2_DEFAULT_SEED when set and numeric, otherwise kFallbackSeed.
std::uint64_t default_seed();

struct Outcome {
  Json report;
  /// Rows of n, value, stderr, clip_fraction; empty when the command has no series.
  std::string csv;
  /// Numerical failures found while computing the report.
  std::vector<std::string> flags;
};

/// Computes the report without touching files or streams other than `input`,
/// which supplies the map when no path is given.
Outcome execute(const RunConfig& config, std::istream& input);

/// Runs the command and writes artifacts. Returns 0 on success, 2 when the
/// report carries numerical-failure flags, 1 on errors (JSON on `err`).
int run(const RunConfig& config, std::istream& input, std::ostream& out, std::ostream& err);

}  // namespace greenp2cli

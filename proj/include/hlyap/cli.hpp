#pragma once

// Command pipelines behind the hlyap executable. Each command reads a group
// file, writes plain CSV/JSON files into the output directory and returns
// the process exit code.

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hlyap::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadInput = 2,
  kEmptySample = 3,
  kSearchExhausted = 4,
  kFitFailed = 5,
};

struct RunConfig {
  std::string command;
  std::string group_path;
  int max_len = 8;
  double tol = 1e-8;          ///< relative modulus clustering tolerance
  double gap_tol = 1e-6;      ///< parallel exponents closer than this are equal
  double threshold = 1e-8;    ///< certificate margin threshold
  double window_min = 1e-5;   ///< alpha fit window, relative to the axis length
  double window_max = 1e-2;
  double r2_min = 0.99;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::vector<std::string> words;  ///< empty or {"auto"}: shortest loxodromic word

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  /// Digest of every field except the output directory.
  std::string hash() const;
  /// Throws ErrorCode::invalid_argument for non-positive tolerances or max_len < 0.
  void validate() const;
};

/// Output directory used when none is given: $HLYAP_OUT, else "hlyap_out".
std::string default_out_dir();

int cmd_analyze(const RunConfig& config, std::ostream& log);
int cmd_certify(const RunConfig& config, std::ostream& log);
int cmd_boundary(const RunConfig& config, std::ostream& log);
int run(const RunConfig& config, std::ostream& log);

}  // namespace hlyap::cli

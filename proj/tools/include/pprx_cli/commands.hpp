#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pprx::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitHardFailure = 1,  // verify found a hard failure, or replay did not reproduce
  kExitUsage = 2,
  kExitInvalidInput = 3,  // scenario or parameter validation
  kExitRuntime = 4,
};

struct CommandArgs {
  std::string subcommand;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::string out;  // empty: "pprx_out", or the recorded directory for replay
  std::string claims = "all";
  std::string param;
  std::string range;
  std::optional<std::string> variant;
  unsigned threads = 0;
  int ledger_limit = 100;  // per-run ledger files written by simulate; 0 = all
  std::string manifest;    // replay only
};

inline const std::vector<std::string>& claim_ids() {
  static const std::vector<std::string> ids = {"bstar",  "indifference",  "low_monotonicity",
                                               "timing", "best_response", "funded"};
  return ids;
}

// Comma list of claim ids or "all"; throws std::invalid_argument listing the
// valid ids on anything else.
std::vector<std::string> parse_claims(const std::string& filter);

// "a,b,c" or "start:stop:step" (stop included when hit within 1e-9 of a step).
std::vector<double> parse_range(const std::string& text);

int run_command(const CommandArgs& args, std::ostream& out, std::ostream& err);

// Full command line including argv[0].
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pprx::cli

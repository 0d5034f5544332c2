#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "pprx/engine.hpp"

namespace pprx::cli {

// Scenario file problem with a location, "file:line:col: field: message".
class ScenarioFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kScenarioSchemaVersion = 1;

struct LoadedScenario {
  sim::Scenario scenario;
  bool has_seed = false;  // a file may leave the seed to the command line
};

LoadedScenario parse_scenario(const std::string& text, const std::string& source = "<string>");
LoadedScenario load_scenario(const std::filesystem::path& path);

// Normalized form: fixed key order, shortest round-trip numbers, every field
// spelled out. parse(emit(s)) reproduces s and emit is idempotent.
std::string emit_scenario(const sim::Scenario& scenario, bool with_seed = true);

}  // namespace pprx::cli

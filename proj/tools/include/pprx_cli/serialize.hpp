#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "pprx/engine.hpp"
#include "pprx/oracle.hpp"

namespace pprx::cli {

using Json = nlohmann::ordered_json;

Json to_json(const equilibrium::EquilibriumStrategy& s, const Agent& agent);
Json to_json(const sim::EnsembleSummary& s);
Json to_json(const oracle::OracleReport& r);

// CSV with a leading "#schema=<name>/<version>" line, then the header row.
class CsvWriter {
 public:
  CsvWriter(std::string schema, int version, std::vector<std::string> columns);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

std::string csv_escape(const std::string& cell);

// Writes bytes exactly (no newline translation); creates parent directories.
void write_file(const std::filesystem::path& path, const std::string& bytes);

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace pprx::cli

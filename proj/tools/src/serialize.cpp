#include "pprx_cli/serialize.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>


namespace pprx::cli {

Json to_json(const equilibrium::EquilibriumStrategy& s, const Agent& agent) {
  Json j;
  j["agent_id"] = s.agent_id;
  j["class"] = to_string(s.cls);
  j["b0"] = s.belief_report;
  j["valuation"] = agent.valuation;
  j["bbr_reward"] = agent.bbr_reward;
  j["report_epoch"] = s.report_epoch;
  j["drift"] = belief::to_string(s.drift);
  j["x_cap"] = s.nominal_cap;
  j["cap_belief"] = s.nominal_cap_belief;
  j["timing"] = equilibrium::to_string(s.timing);
  j["timing_kind"] = equilibrium::to_string(s.timing.kind);
  j["timing_epoch"] = s.timing.epoch;
  if (s.timing.kind == equilibrium::TimingKind::FirstCrossing) {
    j["threshold"] = s.timing.threshold;
    j["direction"] =
        s.timing.direction == equilibrium::CrossingDirection::Downward ? "down" : "up";
  }
  j["race_verdict"] = equilibrium::to_string(s.verdict);
  j["timing_precondition_met"] = s.timing_precondition_met;
  j["zero_belief_limit"] = s.zero_belief_limit;
  return j;
}

Json to_json(const sim::EnsembleSummary& s) {
  Json j;
  j["runs"] = s.runs;
  j["funded_rate"] = s.funded_rate;
  j["funded_rate_ci95"] = {s.funded_rate_ci_low, s.funded_rate_ci_high};
  j["mean_final_total"] = s.mean_final_total;
  j["final_total_stddev"] = s.final_total_stddev;
  j["race_stats"] = s.mean_race_fraction;
  j["mean_contribution_epoch"] = s.mean_contribution_epoch;
  j["mean_payoff"] = s.mean_payoff;
  Json agents = Json::array();
  for (const auto& a : s.agents) {
    agents.push_back({{"agent_id", a.agent_id},
                      {"mean_payoff", a.mean_payoff},
                      {"payoff_stderr", a.payoff_stderr},
                      {"contribution_rate", a.contribution_rate},
                      {"mean_contribution", a.mean_contribution},
                      {"mean_contribution_epoch", a.mean_contribution_epoch}});
  }
  j["agents"] = std::move(agents);
  return j;
}

Json to_json(const oracle::OracleReport& r) {
  Json j;
  j["claim"] = r.claim;
  j["subject"] = r.subject;
  j["status"] = oracle::to_string(r.status);
  j["gating"] = r.gating;
  j["measured"] = r.measured;
  j["predicted"] = r.predicted;
  j["tolerance"] = r.tolerance;
  Json cx = Json::array();
  for (const auto& c : r.counterexamples) {
    Json point = Json::object();
    for (const auto& [k, v] : c.point) point[k] = v;
    cx.push_back({{"description", c.description}, {"point", std::move(point)}});
  }
  j["counterexamples"] = std::move(cx);
  Json metrics = Json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = v;
  j["metrics"] = std::move(metrics);
  Json series = Json::object();
  for (const auto& [k, v] : r.series) series[k] = v;
  j["series"] = std::move(series);
  j["notes"] = r.notes;
  return j;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

CsvWriter::CsvWriter(std::string schema, int version, std::vector<std::string> columns)
    : width_(columns.size()) {
  out_ = "#schema=" + schema + "/" + std::to_string(version) + "\n";
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::logic_error("CsvWriter: row width mismatch");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out_ += ',';
    out_ += csv_escape(cells[k]);
  }
  out_ += '\n';
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest init failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 0xf];
  }
  return out;
}

}  // namespace pprx::cli

#include "pprx_cli/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>

#include "pprx/equilibrium.hpp"
#include "pprx/errors.hpp"
#include "pprx/oracle.hpp"
#include "pprx_cli/format.hpp"
#include "pprx_cli/scenario_io.hpp"
#include "pprx_cli/serialize.hpp"

namespace pprx::cli {
namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "pprx 0.1.0";
constexpr int kDefaultRuns = 1000;
constexpr int kDefaultMcRuns = 10'000;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Terminal output goes through here so parallel work never interleaves lines.
class Reporter {
 public:
  Reporter(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}
  void line(const std::string& s) {
    std::lock_guard lock(mu_);
    out_ << s << '\n';
  }
  void warn(const std::string& s) {
    std::lock_guard lock(mu_);
    err_ << "warning: " << s << '\n';
  }
  void error(const std::string& s) {
    std::lock_guard lock(mu_);
    err_ << "error: " << s << '\n';
  }

 private:
  std::mutex mu_;
  std::ostream& out_;
  std::ostream& err_;
};

class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  void write(const std::string& rel, const std::string& bytes) {
    const fs::path p = root_ / rel;
    write_file(p, bytes);
    files_.push_back({rel, sha256_file(p)});
  }
  const fs::path& root() const { return root_; }
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  fs::path root_;
  std::vector<std::pair<std::string, std::string>> files_;
};

struct Context {
  CommandArgs args;
  LoadedScenario loaded;
  std::uint64_t seed = 0;
  std::string seed_source;
  fs::path scenario_path;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Context load_context(const CommandArgs& args, Reporter& rep) {
  if (args.scenario.empty()) throw UsageError("--scenario is required");
  Context ctx;
  ctx.args = args;
  ctx.scenario_path = fs::absolute(args.scenario).lexically_normal();
  ctx.loaded = load_scenario(ctx.scenario_path);
  auto& sc = ctx.loaded.scenario;
  if (args.variant) sc.cfg.low_cap_variant = parse_low_cap_variant(*args.variant);
  if (args.seed) {
    ctx.seed = *args.seed;
    ctx.seed_source = "flag";
  } else if (ctx.loaded.has_seed) {
    ctx.seed = sc.master_seed;
    ctx.seed_source = "scenario";
  } else {
    std::random_device rd;
    ctx.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    ctx.seed_source = "drawn";
    rep.warn("no seed given; drew " + std::to_string(ctx.seed) + " (recorded in the manifest)");
  }
  sc.master_seed = ctx.seed;
  return ctx;
}

void write_manifest(const Context& ctx, const OutputDir& dir) {
  Json m;
  m["schema"] = "pprx-manifest/1";
  m["tool"] = kToolVersion;
  m["subcommand"] = ctx.args.subcommand;
  m["scenario"] = ctx.scenario_path.string();
  m["scenario_sha256"] = sha256_file(ctx.scenario_path);
  m["seed"] = ctx.seed;
  m["seed_source"] = ctx.seed_source;
  m["output_dir"] = fs::absolute(dir.root()).lexically_normal().string();
  Json args;
  if (ctx.args.runs) args["runs"] = *ctx.args.runs;
  if (ctx.args.variant) args["variant"] = *ctx.args.variant;
  if (ctx.args.subcommand == "verify") args["claims"] = ctx.args.claims;
  if (ctx.args.subcommand == "sweep") {
    args["param"] = ctx.args.param;
    args["range"] = ctx.args.range;
  }
  if (ctx.args.subcommand == "simulate") args["ledger_limit"] = ctx.args.ledger_limit;
  m["args"] = args.is_null() ? Json::object() : args;
  Json outputs = Json::array();
  for (const auto& [rel, sha] : dir.files()) outputs.push_back({{"path", rel}, {"sha256", sha}});
  m["outputs"] = std::move(outputs);
  write_file(dir.root() / "manifest.json", dump(m));
}

// ---------------------------------------------------------------- equilibrium

int cmd_equilibrium(const Context& ctx, Reporter& rep) {
  const auto prepared = sim::prepare(ctx.loaded.scenario);
  for (const auto& w : prepared.warnings) rep.warn(w);
  const auto& cfg = prepared.scenario.cfg;

  CsvWriter csv("pprx-strategies", 1,
                {"agent_id", "class", "b0", "m", "drift", "x_cap", "cap_belief", "timing",
                 "threshold", "race_verdict", "precondition_met"});
  Json rows = Json::array();
  for (std::size_t i = 0; i < prepared.strategies.size(); ++i) {
    const Agent& a = prepared.scenario.agents[i].agent;
    if (!prepared.strategies[i]) {
      const std::string cls(to_string(prepared.belief_phase.classes[i]));
      csv.row({std::to_string(a.id), cls, format_number(a.prior_belief), format_money(a.bbr_reward),
               std::string(belief::to_string(prepared.drifts[i])), "", "", "unsupported", "", "",
               "false"});
      rows.push_back({{"agent_id", a.id},
                      {"class", cls},
                      {"b0", a.prior_belief},
                      {"drift", belief::to_string(prepared.drifts[i])},
                      {"timing", "unsupported"},
                      {"policy", sim::describe(prepared.scenario.agents[i].policy)}});
      rep.line("agent " + std::to_string(a.id) + "  " + cls + "  b0=" +
               format_number(a.prior_belief) + "  drift=mixed  no equilibrium timing (" +
               sim::describe(prepared.scenario.agents[i].policy) + ")");
      continue;
    }
    const auto& s = *prepared.strategies[i];
    const bool crossing = s.timing.kind == equilibrium::TimingKind::FirstCrossing;
    csv.row({std::to_string(s.agent_id), std::string(to_string(s.cls)),
             format_number(s.belief_report), format_money(a.bbr_reward),
             std::string(belief::to_string(s.drift)), format_money(s.nominal_cap),
             format_number(s.nominal_cap_belief), equilibrium::to_string(s.timing),
             crossing ? format_number(s.timing.threshold) : "",
             std::string(equilibrium::to_string(s.verdict)),
             s.timing_precondition_met ? "true" : "false"});
    rows.push_back(to_json(s, a));
    rep.line("agent " + std::to_string(s.agent_id) + "  " + std::string(to_string(s.cls)) +
             "  b0=" + format_number(s.belief_report) + "  drift=" +
             std::string(belief::to_string(s.drift)) + "  x_cap=" + format_money(s.nominal_cap) +
             "  " + equilibrium::to_string(s.timing) + "  race=" +
             std::string(equilibrium::to_string(s.verdict)));
  }
  Json j;
  j["schema"] = "pprx-strategies/1";
  j["scenario"] = prepared.scenario.name;
  j["seed"] = ctx.seed;
  j["low_cap_variant"] = to_string(cfg.low_cap_variant);
  j["belief_threshold"] = equilibrium::belief_threshold(cfg);
  j["warnings"] = prepared.warnings;
  j["strategies"] = std::move(rows);

  OutputDir dir(ctx.args.out);
  dir.write("strategies.csv", csv.str());
  dir.write("strategies.json", dump(j));
  write_manifest(ctx, dir);
  return kExitOk;
}

// ------------------------------------------------------------------- simulate

std::string ledger_csv(const sim::Ledger& ledger) {
  CsvWriter csv("pprx-ledger", 1, {"epoch", "agent_id", "x", "C_t", "belief", "cap", "fallback"});
  for (const auto& e : ledger.events) {
    csv.row({std::to_string(e.epoch), std::to_string(e.agent_id), format_money(e.amount),
             format_money(e.total_after), format_number(e.belief), format_money(e.cap),
             e.fallback ? "true" : "false"});
  }
  return csv.str();
}

int resolve_runs(const CommandArgs& args, int fallback) {
  const int runs = args.runs.value_or(fallback);
  if (runs < 1) throw UsageError("--runs must be >= 1");
  return runs;
}

int cmd_simulate(const Context& ctx, Reporter& rep) {
  const int runs = resolve_runs(ctx.args, kDefaultRuns);
  if (ctx.args.ledger_limit < 0) throw UsageError("--ledgers must be >= 0");
  const auto prepared = sim::prepare(ctx.loaded.scenario);
  for (const auto& w : prepared.warnings) rep.warn(w);
  std::vector<sim::RunResult> results;
  const auto summary = sim::run_ensemble(prepared, runs, ctx.args.threads, &results);

  CsvWriter outcomes("pprx-outcomes", 1,
                     {"run", "funded", "final_total", "end_epoch", "race_fraction",
                      "refund_outlay", "bbr_outlay"});
  CsvWriter agents("pprx-agent-outcomes", 1,
                   {"run", "agent_id", "class", "contribution", "contribution_epoch", "payoff",
                    "refund_bonus", "bbr_paid"});
  for (const auto& r : results) {
    const auto& o = r.outcome;
    outcomes.row({std::to_string(r.run_index), o.funded ? "true" : "false",
                  format_money(o.final_total), std::to_string(o.end_epoch),
                  format_number(o.race_fraction), format_money(o.refund_outlay),
                  format_money(o.bbr_outlay)});
    for (const auto& a : o.agents) {
      agents.row({std::to_string(r.run_index), std::to_string(a.agent_id),
                  std::string(to_string(a.cls)), format_money(a.contribution),
                  std::to_string(a.contribution_epoch), format_money(a.payoff),
                  format_money(a.refund_bonus), format_money(a.bbr_paid)});
    }
  }

  Json j;
  j["schema"] = "pprx-summary/1";
  j["scenario"] = prepared.scenario.name;
  j["seed"] = ctx.seed;
  j["low_cap_variant"] = to_string(prepared.scenario.cfg.low_cap_variant);
  j["summary"] = to_json(summary);
  j["warnings"] = prepared.warnings;

  OutputDir dir(ctx.args.out);
  dir.write("summary.json", dump(j));
  dir.write("outcomes.csv", outcomes.str());
  dir.write("agents.csv", agents.str());
  const std::size_t limit = ctx.args.ledger_limit == 0
                                ? results.size()
                                : std::min<std::size_t>(results.size(), ctx.args.ledger_limit);
  for (std::size_t r = 0; r < limit; ++r) {
    char name[40];
    std::snprintf(name, sizeof name, "ledgers/run_%05zu.csv", r);
    dir.write(name, ledger_csv(results[r].ledger));
  }
  write_manifest(ctx, dir);

  std::ostringstream os;
  os << "runs=" << runs << "  funded_rate=" << format_number(summary.funded_rate) << " [ci95 "
     << format_number(summary.funded_rate_ci_low) << ", "
     << format_number(summary.funded_rate_ci_high)
     << "]  race_stats=" << format_number(summary.mean_race_fraction);
  rep.line(os.str());
  return kExitOk;
}

// --------------------------------------------------------------------- verify

oracle::OracleReport skipped_report(std::string claim, std::string subject, std::string note) {
  oracle::OracleReport r;
  r.claim = std::move(claim);
  r.subject = std::move(subject);
  r.status = oracle::Status::Skipped;
  r.notes.push_back(std::move(note));
  return r;
}

std::vector<oracle::OracleReport> run_claim(const std::string& claim,
                                            const sim::PreparedScenario& prepared,
                                            const Context& ctx, int mc_runs) {
  const auto& sc = prepared.scenario;
  const auto& cfg = sc.cfg;
  std::vector<oracle::OracleReport> out;
  auto agent_subject = [](const Agent& a) { return "agent " + std::to_string(a.id); };

  if (claim == "bstar") {
    const Agent& a = sc.agents.front().agent;
    out.push_back(oracle::verify_bstar(cfg, a.valuation, a.bbr_reward));
  } else if (claim == "indifference") {
    for (std::size_t i = 0; i < sc.agents.size(); ++i) {
      const Agent& a = sc.agents[i].agent;
      if (!(a.prior_belief > 0.0 && a.prior_belief < 1.0)) {
        out.push_back(skipped_report(claim, agent_subject(a), "prior on the boundary"));
        continue;
      }
      auto r = oracle::verify_indifference(cfg, prepared.belief_phase.classes[i], a.prior_belief,
                                           a.valuation, a.bbr_reward, cfg.low_cap_variant);
      r.subject = agent_subject(a) + ": " + r.subject;
      out.push_back(std::move(r));
    }
  } else if (claim == "low_monotonicity") {
    std::vector<LowCapVariant> variants;
    if (ctx.args.variant) {
      variants.push_back(cfg.low_cap_variant);
    } else {
      variants = {LowCapVariant::PaperVerbatim, LowCapVariant::Rederived};
    }
    for (std::size_t i = 0; i < sc.agents.size(); ++i) {
      if (prepared.belief_phase.classes[i] != BeliefClass::Low) continue;
      const Agent& a = sc.agents[i].agent;
      for (auto v : variants) {
        auto r = oracle::verify_low_monotonicity(cfg, a.valuation, a.bbr_reward, v);
        r.subject = agent_subject(a) + ": " + r.subject;
        out.push_back(std::move(r));
      }
    }
    if (out.empty()) out.push_back(skipped_report(claim, "scenario", "no low-belief agents"));
  } else if (claim == "timing") {
    oracle::TimingOptions opts;
    opts.mc_runs = mc_runs;
    opts.seed = ctx.seed;
    opts.threads = ctx.args.threads;
    for (std::size_t i = 0; i < sc.agents.size(); ++i) {
      const Agent& a = sc.agents[i].agent;
      if (!prepared.strategies[i]) {
        out.push_back(skipped_report(claim, agent_subject(a), "mixed drift: no predicted timing"));
        continue;
      }
      auto r = oracle::verify_timing(cfg, prepared.belief_phase.classes[i], sc.agents[i].walk,
                                     a.prior_belief, a.valuation, a.bbr_reward, opts);
      r.subject = agent_subject(a) + ": " + r.subject;
      out.push_back(std::move(r));
    }
  } else if (claim == "best_response") {
    oracle::BestResponseOptions opts;
    opts.mc_runs = mc_runs;
    opts.threads = ctx.args.threads;
    for (const auto& spec : sc.agents) {
      out.push_back(oracle::best_response_check(prepared, spec.agent.id, {}, opts));
    }
  } else if (claim == "funded") {
    out.push_back(oracle::verify_funded_at_equilibrium(prepared));
  }
  return out;
}

int cmd_verify(const Context& ctx, Reporter& rep) {
  const auto claims = parse_claims(ctx.args.claims);
  const int mc_runs = resolve_runs(ctx.args, kDefaultMcRuns);
  if (mc_runs < kDefaultMcRuns) throw UsageError("verify: --runs must be >= 10000");
  const auto prepared = sim::prepare(ctx.loaded.scenario);
  for (const auto& w : prepared.warnings) rep.warn(w);

  std::vector<oracle::OracleReport> reports;
  for (const auto& claim : claims) {
    for (auto& r : run_claim(claim, prepared, ctx, mc_runs)) reports.push_back(std::move(r));
  }

  CsvWriter csv("pprx-verify", 1,
                {"claim", "subject", "status", "gating", "measured", "predicted", "tolerance",
                 "counterexamples"});
  Json list = Json::array();
  int hard = 0;
  for (const auto& r : reports) {
    if (r.hard_failure()) ++hard;
    csv.row({r.claim, r.subject, std::string(oracle::to_string(r.status)),
             r.gating ? "true" : "false", format_number(r.measured), format_number(r.predicted),
             format_number(r.tolerance), std::to_string(r.counterexamples.size())});
    list.push_back(to_json(r));
    rep.line("[" + std::string(oracle::to_string(r.status)) + "] " + r.claim + "  " + r.subject);
  }
  Json j;
  j["schema"] = "pprx-verify/1";
  j["scenario"] = prepared.scenario.name;
  j["seed"] = ctx.seed;
  j["claims"] = claims;
  j["mc_runs"] = mc_runs;
  j["hard_failures"] = hard;
  j["reports"] = std::move(list);

  OutputDir dir(ctx.args.out);
  dir.write("reports.json", dump(j));
  dir.write("summary.csv", csv.str());
  write_manifest(ctx, dir);
  rep.line(std::to_string(reports.size()) + " reports, " + std::to_string(hard) +
           " hard failures");
  return hard > 0 ? kExitHardFailure : kExitOk;
}

// ---------------------------------------------------------------------- sweep

std::string canonical_param(const std::string& p) {
  if (p == "B_C" || p == "b_c" || p == "contribution_budget") return "B_C";
  if (p == "B_B" || p == "b_b" || p == "belief_budget") return "B_B";
  if (p == "H0" || p == "h0" || p == "provision_point") return "H0";
  if (p == "b0" || p == "prior_belief") return "b0";
  if (p == "drift_gain" || p == "drift-gain" || p == "gain") return "drift_gain";
  throw UsageError("unknown --param '" + p + "' (B_C, B_B, H0, b0, drift_gain)");
}

void apply_param(sim::Scenario& sc, const std::string& param, double v) {
  if (param == "B_C") {
    sc.cfg.contribution_budget = v;
  } else if (param == "B_B") {
    sc.cfg.belief_budget = v;
  } else if (param == "H0") {
    sc.cfg.provision_point = v;
  } else if (param == "b0") {
    for (auto& a : sc.agents) a.agent.prior_belief = v;
  } else {
    bool any = false;
    for (auto& a : sc.agents) {
      if (auto* g = std::get_if<belief::ContributionDrift>(&a.walk)) {
        g->gain = v;
        any = true;
      } else if (auto* g = std::get_if<belief::DeadlineDrift>(&a.walk)) {
        g->gain = v;
        any = true;
      }
    }
    if (!any) throw UsageError("drift_gain: no agent has a gain-driven walk");
  }
}

int cmd_sweep(const Context& ctx, Reporter& rep) {
  if (ctx.args.param.empty()) throw UsageError("--param is required");
  const std::string param = canonical_param(ctx.args.param);
  const auto values = parse_range(ctx.args.range);
  const int runs = resolve_runs(ctx.args, kDefaultRuns);

  CsvWriter csv("pprx-sweep", 1, {"param", "value", "metric", "metric_value"});
  for (double v : values) {
    sim::Scenario sc = ctx.loaded.scenario;
    apply_param(sc, param, v);
    const auto prepared = sim::prepare(sc);
    const auto s = sim::run_ensemble(prepared, runs, ctx.args.threads);
    const std::pair<const char*, double> metrics[] = {
        {"funded_rate", s.funded_rate},
        {"funded_rate_ci_low", s.funded_rate_ci_low},
        {"funded_rate_ci_high", s.funded_rate_ci_high},
        {"mean_contribution_epoch", s.mean_contribution_epoch},
        {"mean_payoff", s.mean_payoff},
        {"mean_final_total", s.mean_final_total},
        {"race_fraction", s.mean_race_fraction},
        {"belief_threshold", equilibrium::belief_threshold(prepared.scenario.cfg)},
    };
    for (const auto& [name, value] : metrics) {
      csv.row({param, format_number(v), name, format_number(value)});
    }
    rep.line(param + "=" + format_number(v) + "  funded_rate=" + format_number(s.funded_rate) +
             "  b*=" + format_number(equilibrium::belief_threshold(prepared.scenario.cfg)));
  }
  OutputDir dir(ctx.args.out);
  dir.write("sweep.csv", csv.str());
  write_manifest(ctx, dir);
  return kExitOk;
}

// --------------------------------------------------------------------- replay

int cmd_replay(const CommandArgs& args, Reporter& rep, std::ostream& out, std::ostream& err) {
  if (args.manifest.empty()) throw UsageError("replay: --manifest is required");
  std::ifstream in(args.manifest, std::ios::binary);
  if (!in) throw UsageError("replay: cannot read " + args.manifest);
  Json m;
  try {
    m = Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError(std::string("replay: bad manifest: ") + e.what());
  }
  if (m.value("schema", "") != "pprx-manifest/1") throw UsageError("replay: unknown manifest schema");

  CommandArgs next;
  next.subcommand = m.at("subcommand").get<std::string>();
  next.scenario = m.at("scenario").get<std::string>();
  next.seed = m.at("seed").get<std::uint64_t>();
  next.out = args.out.empty() ? m.at("output_dir").get<std::string>() : args.out;
  next.threads = args.threads;
  const Json& a = m.at("args");
  if (a.contains("runs")) next.runs = a["runs"].get<int>();
  if (a.contains("variant")) next.variant = a["variant"].get<std::string>();
  if (a.contains("claims")) next.claims = a["claims"].get<std::string>();
  if (a.contains("param")) next.param = a["param"].get<std::string>();
  if (a.contains("range")) next.range = a["range"].get<std::string>();
  if (a.contains("ledger_limit")) next.ledger_limit = a["ledger_limit"].get<int>();

  if (sha256_file(next.scenario) != m.at("scenario_sha256").get<std::string>()) {
    rep.warn("scenario file changed since the manifest was written");
  }
  const int code = run_command(next, out, err);
  if (code != kExitOk && code != kExitHardFailure) return code;

  int mismatched = 0;
  const auto& outputs = m.at("outputs");
  for (const auto& o : outputs) {
    const fs::path p = fs::path(next.out) / o.at("path").get<std::string>();
    const bool same = fs::exists(p) && sha256_file(p) == o.at("sha256").get<std::string>();
    if (!same) {
      ++mismatched;
      rep.error("not reproduced: " + o.at("path").get<std::string>());
    }
  }
  rep.line("replay: " + std::to_string(outputs.size() - mismatched) + "/" +
           std::to_string(outputs.size()) + " outputs reproduced");
  return mismatched == 0 ? code : kExitHardFailure;
}

}  // namespace

std::vector<std::string> parse_claims(const std::string& filter) {
  const auto& ids = claim_ids();
  auto valid_list = [&] {
    std::string s = "all";
    for (const auto& id : ids) s += ", " + id;
    return s;
  };
  if (filter == "all") return ids;
  std::vector<std::string> out;
  std::stringstream ss(filter);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (std::find(ids.begin(), ids.end(), item) == ids.end()) {
      throw UsageError("unknown claim '" + item + "' (valid: " + valid_list() + ")");
    }
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  }
  if (out.empty() || filter.back() == ',') {
    throw UsageError("empty claim filter (valid: " + valid_list() + ")");
  }
  return out;
}

std::vector<double> parse_range(const std::string& text) {
  if (text.empty()) throw UsageError("--range is empty");
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + s + "' in --range");
    }
    if (used != s.size() || !std::isfinite(v)) throw UsageError("bad number '" + s + "' in --range");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw UsageError("--range start:stop:step needs three fields");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw UsageError("--range needs step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    if (n > 100'000) throw UsageError("--range has too many points");
    for (long k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * step);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(number(item));
    if (text.back() == ',') throw UsageError("--range has an empty entry");
  }
  if (out.empty()) throw UsageError("--range is empty");
  return out;
}

int run_command(const CommandArgs& args, std::ostream& out, std::ostream& err) {
  Reporter rep(out, err);
  try {
    if (args.subcommand == "replay") return cmd_replay(args, rep, out, err);
    CommandArgs resolved = args;
    if (resolved.out.empty()) resolved.out = "pprx_out";
    if (resolved.subcommand == "verify") (void)parse_claims(resolved.claims);
    if (resolved.subcommand == "sweep") {
      (void)canonical_param(resolved.param);
      (void)parse_range(resolved.range);
    }
    const Context ctx = load_context(resolved, rep);
    if (args.subcommand == "equilibrium") return cmd_equilibrium(ctx, rep);
    if (args.subcommand == "simulate") return cmd_simulate(ctx, rep);
    if (args.subcommand == "verify") return cmd_verify(ctx, rep);
    if (args.subcommand == "sweep") return cmd_sweep(ctx, rep);
    throw UsageError("unknown subcommand '" + args.subcommand + "'");
  } catch (const UsageError& e) {
    rep.error(e.what());
    return kExitUsage;
  } catch (const ScenarioFileError& e) {
    rep.error(e.what());
    return kExitInvalidInput;
  } catch (const ScenarioError& e) {
    rep.error(e.what());
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    rep.error(e.what());
    return kExitInvalidInput;
  } catch (const std::logic_error& e) {
    rep.error(e.what());
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    rep.error(e.what());
    return kExitRuntime;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic-belief provision point crowdfunding: equilibria, simulation, checks"};
  app.require_subcommand(1);
  CommandArgs args;
  std::uint64_t seed = 0;
  int runs = 0;
  std::string variant;

  auto common = [&](CLI::App* sub, bool with_runs) {
    sub->add_option("--scenario", args.scenario, "Scenario YAML file")->required();
    sub->add_option("--seed", seed, "Master seed (overrides the scenario seed)");
    if (with_runs) sub->add_option("--runs", runs, "Number of runs / Monte Carlo paths");
    sub->add_option("--out", args.out, "Output directory (default pprx_out)");
    sub->add_option("--variant", variant, "Low cap variant")->check(CLI::IsMember({"paper", "rederived"}));
    sub->add_option("--threads", args.threads, "Worker threads (0 = hardware)");
  };
  auto* eq = app.add_subcommand("equilibrium", "Per-agent equilibrium strategy table");
  common(eq, false);
  auto* simc = app.add_subcommand("simulate", "Monte Carlo runs of the mechanism");
  common(simc, true);
  simc->add_option("--ledgers", args.ledger_limit, "Per-run ledger files to write (0 = all)");
  auto* ver = app.add_subcommand("verify", "Numerical checks of the equilibrium claims");
  common(ver, true);
  ver->add_option("--claims", args.claims, "all or a comma list of claim ids");
  auto* sw = app.add_subcommand("sweep", "Long-format parameter sweep");
  common(sw, true);
  sw->add_option("--param", args.param, "B_C, B_B, H0, b0 or drift_gain")->required();
  sw->add_option("--range", args.range, "a,b,c or start:stop:step")->required();
  auto* rp = app.add_subcommand("replay", "Re-run a manifest and compare output checksums");
  rp->add_option("--manifest", args.manifest, "manifest.json to replay")->required();
  rp->add_option("--out", args.out, "Output directory (default: the recorded one)");
  rp->add_option("--threads", args.threads, "Worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  for (auto* sub : {eq, simc, ver, sw, rp}) {
    if (sub->parsed()) {
      args.subcommand = sub->get_name();
      if (sub != rp && sub->count("--seed")) args.seed = seed;
      if (sub != rp && sub != eq && sub->count("--runs")) args.runs = runs;
      if (sub != rp && sub->count("--variant")) args.variant = variant;
    }
  }
  return run_command(args, out, err);
}

}  // namespace pprx::cli

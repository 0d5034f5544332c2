#include "pprx_cli/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "pprx/errors.hpp"
#include "pprx_cli/format.hpp"

namespace pprx::cli {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field,
                         const std::string& what) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) {
      os << ':' << node.Mark().line + 1 << ':' << node.Mark().column + 1;
    }
    os << ": " << field << ": " << what;
    throw ScenarioFileError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& field) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
  }

  // Rejects keys outside `allowed` so typos do not silently fall back to defaults.
  void check_keys(const YAML::Node& node, const std::string& field,
                  const std::set<std::string>& allowed) const {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, field, "unknown key '" + key + "'");
    }
  }

  YAML::Node child(const YAML::Node& parent, const std::string& key, const std::string& field,
                   bool required = true) const {
    YAML::Node n = parent[key];
    if (!n.IsDefined() && required) fail(parent, field + "." + key, "missing");
    return n;
  }

  double number(const YAML::Node& parent, const std::string& key, const std::string& field) const {
    const YAML::Node n = child(parent, key, field);
    if (!n.IsScalar()) fail(n, field + "." + key, "expected a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, field + "." + key, "expected a number, got '" + n.Scalar() + "'");
    }
  }

  double number_or(const YAML::Node& parent, const std::string& key, const std::string& field,
                   double fallback) const {
    return parent[key].IsDefined() ? number(parent, key, field) : fallback;
  }

  long long integer(const YAML::Node& parent, const std::string& key,
                    const std::string& field) const {
    const YAML::Node n = child(parent, key, field);
    if (!n.IsScalar()) fail(n, field + "." + key, "expected an integer");
    try {
      return n.as<long long>();
    } catch (const YAML::Exception&) {
      fail(n, field + "." + key, "expected an integer, got '" + n.Scalar() + "'");
    }
  }

  std::uint64_t unsigned_integer(const YAML::Node& parent, const std::string& key,
                                 const std::string& field) const {
    const YAML::Node n = child(parent, key, field);
    if (!n.IsScalar() || n.Scalar().empty() || n.Scalar().front() == '-') {
      fail(n, field + "." + key, "expected a non-negative integer");
    }
    try {
      return n.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail(n, field + "." + key, "expected a non-negative integer, got '" + n.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& parent, const std::string& key,
                   const std::string& field) const {
    const YAML::Node n = child(parent, key, field);
    if (!n.IsScalar()) fail(n, field + "." + key, "expected a string");
    return n.Scalar();
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

belief::StepGenerator read_walk(const Reader& r, const YAML::Node& node, const std::string& field) {
  r.require_map(node, field);
  const std::string family = r.text(node, "family", field);
  if (family == "symmetric_bernoulli") {
    r.check_keys(node, field, {"family", "p", "step_up", "step_down"});
    return belief::SymmetricBernoulli{r.number(node, "p", field), r.number(node, "step_up", field),
                                      r.number(node, "step_down", field)};
  }
  if (family == "contribution_drift" || family == "deadline_drift") {
    r.check_keys(node, field, {"family", "gain", "noise_scale"});
    const double gain = r.number(node, "gain", field);
    const double noise = r.number(node, "noise_scale", field);
    if (family == "contribution_drift") return belief::ContributionDrift{gain, noise};
    return belief::DeadlineDrift{gain, noise};
  }
  r.fail(node["family"], field + ".family",
         "unknown family '" + family +
             "' (symmetric_bernoulli, contribution_drift, deadline_drift)");
}

sim::Policy read_policy(const Reader& r, const YAML::Node& node, const std::string& field) {
  if (!node.IsDefined()) return sim::EquilibriumPolicy{};
  r.require_map(node, field);
  const std::string kind = r.text(node, "kind", field);
  if (kind == "equilibrium") {
    r.check_keys(node, field, {"kind"});
    return sim::EquilibriumPolicy{};
  }
  if (kind == "fixed") {
    r.check_keys(node, field, {"kind", "amount", "epoch"});
    return sim::FixedPolicy{r.number(node, "amount", field),
                            static_cast<Epoch>(r.integer(node, "epoch", field))};
  }
  if (kind == "greedy") {
    r.check_keys(node, field, {"kind", "fraction"});
    return sim::GreedyPolicy{r.number(node, "fraction", field)};
  }
  r.fail(node["kind"], field + ".kind", "unknown policy '" + kind + "' (equilibrium, fixed, greedy)");
}

// Runs a core check and pins its message to the node it came from.
template <typename F>
void at(const Reader& r, const YAML::Node& node, const std::string& field, F&& check) {
  try {
    check();
  } catch (const ScenarioError& e) {
    r.fail(node, field, e.what());
  } catch (const std::invalid_argument& e) {
    r.fail(node, field, e.what());
  } catch (const std::logic_error& e) {
    r.fail(node, field, e.what());
  }
}

}  // namespace

LoadedScenario parse_scenario(const std::string& text, const std::string& source) {
  const Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw ScenarioFileError(os.str());
  }
  if (!root.IsDefined() || root.IsNull()) r.fail(root, "<root>", "empty scenario file");
  r.require_map(root, "<root>");
  r.check_keys(root, "<root>", {"schema_version", "name", "seed", "project", "scorer", "agents"});

  const auto version = r.integer(root, "schema_version", "<root>");
  if (version != kScenarioSchemaVersion) {
    r.fail(root["schema_version"], "schema_version",
           "unsupported version " + std::to_string(version) + " (expected " +
               std::to_string(kScenarioSchemaVersion) + ")");
  }

  LoadedScenario out;
  sim::Scenario& sc = out.scenario;
  if (root["name"].IsDefined()) sc.name = r.text(root, "name", "<root>");
  if (root["seed"].IsDefined()) {
    sc.master_seed = r.unsigned_integer(root, "seed", "<root>");
    out.has_seed = true;
  }

  const YAML::Node project = r.child(root, "project", "<root>");
  r.require_map(project, "project");
  r.check_keys(project, "project",
               {"provision_point", "contribution_budget", "belief_budget", "belief_deadline",
                "contribution_deadline", "low_cap_variant"});
  ProjectConfig& cfg = sc.cfg;
  cfg.provision_point = r.number(project, "provision_point", "project");
  cfg.contribution_budget = r.number(project, "contribution_budget", "project");
  cfg.belief_budget = r.number(project, "belief_budget", "project");
  cfg.belief_deadline = static_cast<Epoch>(r.integer(project, "belief_deadline", "project"));
  cfg.contribution_deadline =
      static_cast<Epoch>(r.integer(project, "contribution_deadline", "project"));
  if (project["low_cap_variant"].IsDefined()) {
    at(r, project["low_cap_variant"], "project.low_cap_variant", [&] {
      cfg.low_cap_variant =
          parse_low_cap_variant(r.text(project, "low_cap_variant", "project"));
    });
  }
  at(r, project, "project", [&] { validate(cfg); });

  if (const YAML::Node scorer = root["scorer"]; scorer.IsDefined()) {
    r.require_map(scorer, "scorer");
    r.check_keys(scorer, "scorer", {"kind", "reference_funded_rate"});
    const std::string kind = r.text(scorer, "kind", "scorer");
    if (kind == "uniform") {
      sc.scorer.kind = sim::ScorerSpec::Kind::Uniform;
    } else if (kind == "quadratic") {
      sc.scorer.kind = sim::ScorerSpec::Kind::Quadratic;
    } else {
      r.fail(scorer["kind"], "scorer.kind", "unknown scorer '" + kind + "' (uniform, quadratic)");
    }
    sc.scorer.reference_funded_rate =
        r.number_or(scorer, "reference_funded_rate", "scorer", sc.scorer.reference_funded_rate);
    at(r, scorer, "scorer", [&] { (void)sim::make_scorer(sc.scorer); });
  }

  const YAML::Node agents = r.child(root, "agents", "<root>");
  if (!agents.IsSequence()) r.fail(agents, "agents", "expected a list");
  if (agents.size() == 0) r.fail(agents, "agents", "no agents");
  std::set<int> ids;
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const YAML::Node node = agents[k];
    const std::string field = "agents[" + std::to_string(k) + "]";
    r.require_map(node, field);
    r.check_keys(node, field,
                 {"id", "valuation", "prior_belief", "arrival_belief_phase",
                  "arrival_contribution_phase", "walk", "policy"});
    sim::AgentSpec spec;
    Agent& a = spec.agent;
    a.id = static_cast<int>(r.integer(node, "id", field));
    if (!ids.insert(a.id).second) {
      r.fail(node["id"], field + ".id", "duplicate agent id " + std::to_string(a.id));
    }
    a.valuation = r.number(node, "valuation", field);
    a.prior_belief = r.number(node, "prior_belief", field);
    a.arrival_belief_phase = static_cast<Epoch>(r.integer(node, "arrival_belief_phase", field));
    a.arrival_contribution_phase =
        static_cast<Epoch>(r.integer(node, "arrival_contribution_phase", field));
    at(r, node, field, [&] { validate(a, cfg); });
    spec.walk = read_walk(r, r.child(node, "walk", field), field + ".walk");
    at(r, node["walk"], field + ".walk", [&] { belief::validate(spec.walk); });
    spec.policy = read_policy(r, node["policy"], field + ".policy");
    sc.agents.push_back(std::move(spec));
  }

  // Cross-field checks (total valuation, policy epochs).
  try {
    sim::validate(sc);
  } catch (const ScenarioError& e) {
    throw ScenarioFileError(source + ": " + e.what());
  } catch (const std::logic_error& e) {
    throw ScenarioFileError(source + ": " + e.what());
  }
  return out;
}

LoadedScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioFileError(path.string() + ": cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

namespace {

std::string walk_line(const belief::StepGenerator& gen) {
  std::ostringstream os;
  os << "{family: " << belief::family_name(gen);
  if (const auto* g = std::get_if<belief::SymmetricBernoulli>(&gen)) {
    os << ", p: " << format_number(g->p) << ", step_up: " << format_number(g->step_up)
       << ", step_down: " << format_number(g->step_down);
  } else if (const auto* g = std::get_if<belief::ContributionDrift>(&gen)) {
    os << ", gain: " << format_number(g->gain) << ", noise_scale: " << format_number(g->noise_scale);
  } else if (const auto* g = std::get_if<belief::DeadlineDrift>(&gen)) {
    os << ", gain: " << format_number(g->gain) << ", noise_scale: " << format_number(g->noise_scale);
  } else {
    throw ValidationError("emit_scenario: custom step generators have no file form");
  }
  os << '}';
  return os.str();
}

std::string policy_line(const sim::Policy& policy) {
  std::ostringstream os;
  if (std::holds_alternative<sim::EquilibriumPolicy>(policy)) {
    os << "{kind: equilibrium}";
  } else if (const auto* p = std::get_if<sim::FixedPolicy>(&policy)) {
    os << "{kind: fixed, amount: " << format_number(p->amount) << ", epoch: " << p->epoch << '}';
  } else if (const auto* p = std::get_if<sim::GreedyPolicy>(&policy)) {
    os << "{kind: greedy, fraction: " << format_number(p->fraction) << '}';
  }
  return os.str();
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string emit_scenario(const sim::Scenario& sc, bool with_seed) {
  std::ostringstream os;
  const auto& cfg = sc.cfg;
  os << "schema_version: " << kScenarioSchemaVersion << '\n';
  os << "name: " << quoted(sc.name) << '\n';
  if (with_seed) os << "seed: " << sc.master_seed << '\n';
  os << "project:\n"
     << "  provision_point: " << format_number(cfg.provision_point) << '\n'
     << "  contribution_budget: " << format_number(cfg.contribution_budget) << '\n'
     << "  belief_budget: " << format_number(cfg.belief_budget) << '\n'
     << "  belief_deadline: " << cfg.belief_deadline << '\n'
     << "  contribution_deadline: " << cfg.contribution_deadline << '\n'
     << "  low_cap_variant: " << to_string(cfg.low_cap_variant) << '\n';
  os << "scorer:\n"
     << "  kind: " << (sc.scorer.kind == sim::ScorerSpec::Kind::Uniform ? "uniform" : "quadratic")
     << '\n'
     << "  reference_funded_rate: " << format_number(sc.scorer.reference_funded_rate) << '\n';
  os << "agents:\n";
  for (const auto& spec : sc.agents) {
    const Agent& a = spec.agent;
    os << "  - id: " << a.id << '\n'
       << "    valuation: " << format_number(a.valuation) << '\n'
       << "    prior_belief: " << format_number(a.prior_belief) << '\n'
       << "    arrival_belief_phase: " << a.arrival_belief_phase << '\n'
       << "    arrival_contribution_phase: " << a.arrival_contribution_phase << '\n'
       << "    walk: " << walk_line(spec.walk) << '\n'
       << "    policy: " << policy_line(spec.policy) << '\n';
  }
  return os.str();
}

}  // namespace pprx::cli

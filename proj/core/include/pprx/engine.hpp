#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pprx/bbr.hpp"
#include "pprx/belief.hpp"
#include "pprx/equilibrium.hpp"
#include "pprx/model.hpp"

namespace pprx::sim {

// Contribution behaviour of one agent in the contribution phase. Every agent
// reports its prior at its belief-phase arrival regardless of policy.
struct EquilibriumPolicy {};
struct FixedPolicy {
  Money amount = 0.0;
  Epoch epoch = 1;
};
// Contributes fraction * theta on arrival.
struct GreedyPolicy {
  double fraction = 1.0;
};
using Policy = std::variant<EquilibriumPolicy, FixedPolicy, GreedyPolicy>;

std::string describe(const Policy& policy);

struct ScorerSpec {
  enum class Kind { Uniform, Quadratic };
  Kind kind = Kind::Uniform;
  double reference_funded_rate = 0.5;
};

std::unique_ptr<bbr::PeerScorer> make_scorer(const ScorerSpec& spec);

struct AgentSpec {
  Agent agent;
  belief::StepGenerator walk;
  Policy policy;
};

struct Scenario {
  std::string name;
  ProjectConfig cfg;
  std::vector<AgentSpec> agents;
  std::uint64_t master_seed = 0;
  ScorerSpec scorer;
};

// Checks config, agents, generators and policies. Throws ScenarioError when
// the total valuation does not exceed H0.
void validate(const Scenario& scenario);

// Everything below is in scenario agent order.
struct BeliefPhaseResult {
  std::vector<bbr::BeliefReport> reports;
  bbr::ScoreVector scores;  // report order
  std::vector<BeliefClass> classes;
  std::vector<Money> rewards;
};

BeliefPhaseResult run_belief_phase(const Scenario& scenario);

// A scenario after the belief phase: agents carry their m_i and every agent
// whose drift is pure has an equilibrium strategy attached.
struct PreparedScenario {
  Scenario scenario;
  BeliefPhaseResult belief_phase;
  std::vector<belief::DriftClass> drifts;
  std::vector<std::optional<equilibrium::EquilibriumStrategy>> strategies;
  std::vector<std::string> warnings;

  std::size_t index_of(int agent_id) const;
};

PreparedScenario prepare(Scenario scenario);

struct ContributionEvent {
  Epoch epoch = 0;
  int agent_id = 0;
  Money amount = 0.0;
  Money total_after = 0.0;
  Probability belief = 0.0;
  Money cap = 0.0;        // pre-clipping amount the policy asked for
  bool fallback = false;  // FirstCrossing fired at the deadline fallback
};

struct Ledger {
  // totals[t] = C_t for t = 0..last_epoch.
  std::vector<Money> totals;
  std::vector<ContributionEvent> events;
  Epoch last_epoch = 0;
  bool funded = false;

  Money final_total() const { return totals.empty() ? 0.0 : totals.back(); }
};

// Replaces one agent's policy for a single run (deviation harness).
struct PolicyOverride {
  std::size_t agent_index = 0;
  Policy policy;
};

// Epochs 1..T_C. At each epoch every present walk steps with the start-of-
// epoch total, then agents whose rule fires contribute in agent order,
// clipped to H0 - C_t. The phase stops once C_t reaches H0.
Ledger run_contribution_phase(const PreparedScenario& prepared,
                              std::uint64_t run_index,
                              const PolicyOverride* override_policy = nullptr);

struct AgentOutcome {
  int agent_id = 0;
  BeliefClass cls = BeliefClass::High;
  Money contribution = 0.0;
  Epoch contribution_epoch = 0;  // 0 when the agent never contributed
  Money payoff = 0.0;
  Money refund_bonus = 0.0;
  Money returned = 0.0;  // contribution + refund bonus when unfunded
  Money bbr_paid = 0.0;
};

struct SimOutcome {
  bool funded = false;
  Money final_total = 0.0;
  Epoch end_epoch = 0;
  std::vector<AgentOutcome> agents;
  Money refund_outlay = 0.0;
  Money bbr_outlay = 0.0;
  // Share of the final total contributed in epoch T_C.
  double race_fraction = 0.0;
};

SimOutcome settle(const Ledger& ledger, const PreparedScenario& prepared);

struct RunResult {
  std::uint64_t run_index = 0;
  Ledger ledger;
  SimOutcome outcome;
};

RunResult run_full(const PreparedScenario& prepared, std::uint64_t run_index = 0,
                   const PolicyOverride* override_policy = nullptr);

struct AgentSummary {
  int agent_id = 0;
  double mean_payoff = 0.0;
  double payoff_stderr = 0.0;
  double contribution_rate = 0.0;
  double mean_contribution = 0.0;
  double mean_contribution_epoch = 0.0;  // over runs where it contributed
};

struct EnsembleSummary {
  int runs = 0;
  double funded_rate = 0.0;
  // Normal-approximation 95% interval, clipped to [0, 1].
  double funded_rate_ci_low = 0.0;
  double funded_rate_ci_high = 0.0;
  double mean_final_total = 0.0;
  double final_total_stddev = 0.0;
  double mean_race_fraction = 0.0;
  double mean_contribution_epoch = 0.0;
  double mean_payoff = 0.0;
  std::vector<AgentSummary> agents;
};

// Runs 0..n_runs-1; run r uses streams derived from (master_seed, r).
EnsembleSummary run_ensemble(const PreparedScenario& prepared, int n_runs,
                             unsigned threads = 0,
                             std::vector<RunResult>* runs_out = nullptr);

}  // namespace pprx::sim

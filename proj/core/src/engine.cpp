#include "pprx/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "overloaded.hpp"
#include "pprx/errors.hpp"
#include "pprx/numeric.hpp"
#include "pprx/parallel.hpp"
#include "pprx/payoff.hpp"
#include "pprx/rng.hpp"

namespace pprx::sim {
namespace {

using detail::overloaded;
using equilibrium::TimingKind;

void validate_policy(const Policy& policy, const Agent& agent, const ProjectConfig& cfg) {
  std::visit(overloaded{
                 [](const EquilibriumPolicy&) {},
                 [&](const FixedPolicy& p) {
                   if (!(p.amount >= 0.0) || !std::isfinite(p.amount)) {
                     throw PolicyContractError("agent " + std::to_string(agent.id) +
                                               ": fixed contribution must be >= 0");
                   }
                   if (p.epoch < agent.arrival_contribution_phase ||
                       p.epoch > cfg.contribution_deadline) {
                     throw PolicyContractError("agent " + std::to_string(agent.id) +
                                               ": fixed contribution epoch must lie in "
                                               "[arrival, T_C]");
                   }
                 },
                 [&](const GreedyPolicy& p) {
                   if (!(p.fraction >= 0.0) || !std::isfinite(p.fraction)) {
                     throw PolicyContractError("agent " + std::to_string(agent.id) +
                                               ": greedy fraction must be >= 0");
                   }
                 },
             },
             policy);
}

}  // namespace

std::string describe(const Policy& policy) {
  return std::visit(overloaded{
                        [](const EquilibriumPolicy&) { return std::string("equilibrium"); },
                        [](const FixedPolicy& p) {
                          std::ostringstream os;
                          os << "fixed(" << p.amount << "," << p.epoch << ")";
                          return os.str();
                        },
                        [](const GreedyPolicy& p) {
                          std::ostringstream os;
                          os << "greedy(" << p.fraction << ")";
                          return os.str();
                        },
                    },
                    policy);
}

std::unique_ptr<bbr::PeerScorer> make_scorer(const ScorerSpec& spec) {
  if (spec.kind == ScorerSpec::Kind::Quadratic) {
    return std::make_unique<bbr::QuadraticOutcomeScorer>(spec.reference_funded_rate);
  }
  return std::make_unique<bbr::UniformScorer>();
}

void validate(const Scenario& scenario) {
  validate(scenario.cfg);
  if (scenario.agents.empty()) throw ValidationError("scenario has no agents");
  std::set<int> ids;
  std::vector<Agent> agents;
  for (const auto& spec : scenario.agents) {
    validate(spec.agent, scenario.cfg);
    if (!ids.insert(spec.agent.id).second) {
      throw ValidationError("duplicate agent id " + std::to_string(spec.agent.id));
    }
    belief::validate(spec.walk);
    validate_policy(spec.policy, spec.agent, scenario.cfg);
    agents.push_back(spec.agent);
  }
  if (!(total_valuation(agents) > scenario.cfg.provision_point)) {
    throw ScenarioError("insufficient interest: total valuation must exceed H0");
  }
}

BeliefPhaseResult run_belief_phase(const Scenario& scenario) {
  validate(scenario.cfg);
  BeliefPhaseResult out;
  out.reports.reserve(scenario.agents.size());
  for (const auto& spec : scenario.agents) {
    out.reports.push_back(
        {spec.agent.id, spec.agent.prior_belief, spec.agent.arrival_belief_phase});
    out.classes.push_back(classify_agent(spec.agent.prior_belief));
  }
  const auto scorer = make_scorer(scenario.scorer);
  out.scores = bbr::score_reports(out.reports, *scorer);

  std::vector<BeliefClass> report_classes;
  for (int id : out.scores.agent_ids) {
    const auto it = std::find_if(out.reports.begin(), out.reports.end(),
                                 [id](const auto& r) { return r.agent_id == id; });
    report_classes.push_back(out.classes[static_cast<std::size_t>(it - out.reports.begin())]);
  }
  const auto rewards =
      bbr::compute_bbr(out.scores, report_classes, scenario.cfg.belief_budget);

  out.rewards.assign(scenario.agents.size(), 0.0);
  for (std::size_t k = 0; k < out.scores.size(); ++k) {
    for (std::size_t i = 0; i < out.reports.size(); ++i) {
      if (out.reports[i].agent_id == out.scores.agent_ids[k]) out.rewards[i] = rewards[k];
    }
  }
  return out;
}

std::size_t PreparedScenario::index_of(int agent_id) const {
  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    if (scenario.agents[i].agent.id == agent_id) return i;
  }
  throw ValidationError("unknown agent id " + std::to_string(agent_id));
}

PreparedScenario prepare(Scenario scenario) {
  validate(scenario);
  PreparedScenario out;
  out.belief_phase = run_belief_phase(scenario);
  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    scenario.agents[i].agent.bbr_reward = out.belief_phase.rewards[i];
  }

  const auto probes = belief::default_probes(scenario.cfg);
  for (const auto& spec : scenario.agents) {
    const auto drift = belief::classify_generator(spec.walk, probes);
    out.drifts.push_back(drift);
    if (drift == belief::DriftClass::Mixed) {
      if (std::holds_alternative<EquilibriumPolicy>(spec.policy)) {
        throw UnsupportedDriftError("agent " + std::to_string(spec.agent.id) +
                                    ": equilibrium policy needs a pure drift class, got "
                                    "mixed");
      }
      out.strategies.emplace_back(std::nullopt);
      continue;
    }
    auto strategy = equilibrium::equilibrium_strategy(spec.agent, drift, scenario.cfg);
    if (!strategy.timing_precondition_met) {
      out.warnings.push_back("agent " + std::to_string(spec.agent.id) +
                             ": low-belief timing condition fails; contributing at T_C");
    }
    if (strategy.zero_belief_limit) {
      out.warnings.push_back("agent " + std::to_string(spec.agent.id) +
                             ": cap evaluated at belief 0");
    }
    out.strategies.emplace_back(strategy);
  }
  out.scenario = std::move(scenario);
  return out;
}

Ledger run_contribution_phase(const PreparedScenario& prepared, std::uint64_t run_index,
                              const PolicyOverride* override_policy) {
  const Scenario& sc = prepared.scenario;
  const ProjectConfig& cfg = sc.cfg;
  const std::size_t n = sc.agents.size();
  const Epoch deadline = cfg.contribution_deadline;
  const Money target = cfg.provision_point;

  if (override_policy != nullptr) {
    if (override_policy->agent_index >= n) throw ValidationError("override: bad agent index");
    validate_policy(override_policy->policy, sc.agents[override_policy->agent_index].agent,
                    cfg);
  }

  std::vector<belief::BeliefWalk> walks;
  walks.reserve(n);
  for (const auto& spec : sc.agents) {
    walks.emplace_back(spec.agent.id, spec.agent.prior_belief, spec.walk,
                       derive_seed(sc.master_seed, run_index,
                                   static_cast<std::uint64_t>(spec.agent.id)),
                       spec.agent.arrival_contribution_phase);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sc.agents[a].agent.id < sc.agents[b].agent.id;
  });

  Ledger ledger;
  ledger.totals.push_back(0.0);
  std::vector<bool> acted(n, false);
  Money total = 0.0;

  for (Epoch t = 1; t <= deadline && !ledger.funded; ++t) {
    const belief::WalkEnv env{total, deadline - t, deadline, target};
    for (std::size_t i = 0; i < n; ++i) {
      if (sc.agents[i].agent.arrival_contribution_phase < t) walks[i].step(env);
    }

    for (std::size_t i : order) {
      const Agent& agent = sc.agents[i].agent;
      if (acted[i] || t < agent.arrival_contribution_phase) continue;
      const Policy& policy = (override_policy != nullptr && override_policy->agent_index == i)
                                 ? override_policy->policy
                                 : sc.agents[i].policy;
      const Probability b = walks[i].current();
      bool fire = false;
      bool fallback = false;
      Money amount = 0.0;
      std::visit(overloaded{
                     [&](const EquilibriumPolicy&) {
                       const auto& strategy = prepared.strategies[i];
                       if (!strategy) {
                         throw UnsupportedDriftError("agent " + std::to_string(agent.id) +
                                                     " has no equilibrium strategy");
                       }
                       const auto& rule = strategy->timing;
                       switch (rule.kind) {
                         case TimingKind::Immediate: fire = t >= rule.epoch; break;
                         case TimingKind::AtDeadline: fire = t == deadline; break;
                         case TimingKind::FirstCrossing:
                           fire = rule.crossed(b) || t == deadline;
                           fallback = !rule.crossed(b);
                           break;
                       }
                       amount = equilibrium::contribution_cap(strategy->cls, b, agent.valuation,
                                                              agent.bbr_reward, cfg);
                     },
                     [&](const FixedPolicy& p) {
                       fire = t == p.epoch;
                       amount = p.amount;
                     },
                     [&](const GreedyPolicy& p) {
                       fire = true;
                       amount = p.fraction * agent.valuation;
                     },
                 },
                 policy);
      if (!fire) continue;

      acted[i] = true;
      const Money deficit = target - total;
      Money x = amount;
      if (amount >= deficit) {
        x = deficit;
        total = target;  // exact, no rounding drift at the provision point
        ledger.funded = true;
      } else {
        total += x;
      }
      ledger.events.push_back({t, agent.id, x, total, b, amount, fallback});
      if (ledger.funded) break;
    }
    ledger.totals.push_back(total);
    ledger.last_epoch = t;
  }
  return ledger;
}

SimOutcome settle(const Ledger& ledger, const PreparedScenario& prepared) {
  const Scenario& sc = prepared.scenario;
  const ProjectConfig& cfg = sc.cfg;
  SimOutcome out;
  out.funded = ledger.funded;
  out.final_total = ledger.final_total();
  out.end_epoch = ledger.last_epoch;

  CompensatedSum refunds;
  CompensatedSum bbr_paid;
  Money final_epoch_mass = 0.0;
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    const Agent& agent = sc.agents[i].agent;
    AgentOutcome a;
    a.agent_id = agent.id;
    a.cls = prepared.belief_phase.classes[i];
    for (const auto& e : ledger.events) {
      if (e.agent_id == agent.id) {
        a.contribution = e.amount;
        a.contribution_epoch = e.epoch;
      }
    }
    a.payoff = realized_payoff(a.cls, agent.valuation, a.contribution, agent.bbr_reward,
                               out.final_total, out.funded, cfg);
    if (!out.funded) {
      a.refund_bonus =
          a.contribution > 0.0 ? a.contribution / out.final_total * cfg.contribution_budget : 0.0;
      a.returned = a.contribution + a.refund_bonus;
    }
    const bool class_rewarded = out.funded ? a.cls == BeliefClass::High : a.cls == BeliefClass::Low;
    a.bbr_paid = class_rewarded ? agent.bbr_reward : 0.0;
    refunds.add(a.refund_bonus);
    bbr_paid.add(a.bbr_paid);
    if (a.contribution_epoch == cfg.contribution_deadline) final_epoch_mass += a.contribution;
    out.agents.push_back(a);
  }
  out.refund_outlay = refunds.value();
  out.bbr_outlay = bbr_paid.value();
  out.race_fraction = out.final_total > 0.0 ? final_epoch_mass / out.final_total : 0.0;
  return out;
}

RunResult run_full(const PreparedScenario& prepared, std::uint64_t run_index,
                   const PolicyOverride* override_policy) {
  RunResult r;
  r.run_index = run_index;
  r.ledger = run_contribution_phase(prepared, run_index, override_policy);
  r.outcome = settle(r.ledger, prepared);
  return r;
}

EnsembleSummary run_ensemble(const PreparedScenario& prepared, int n_runs, unsigned threads,
                             std::vector<RunResult>* runs_out) {
  if (n_runs < 1) throw ValidationError("run_ensemble: n_runs must be >= 1");
  std::vector<RunResult> runs(static_cast<std::size_t>(n_runs));
  parallel_for(runs.size(), threads, [&](std::size_t r) { runs[r] = run_full(prepared, r); });

  const std::size_t n_agents = prepared.scenario.agents.size();
  EnsembleSummary s;
  s.runs = n_runs;
  RunningStats totals;
  CompensatedSum funded;
  CompensatedSum race;
  RunningStats epochs;
  RunningStats payoffs;
  std::vector<RunningStats> agent_payoff(n_agents);
  std::vector<RunningStats> agent_epoch(n_agents);
  std::vector<CompensatedSum> agent_contribution(n_agents);
  std::vector<int> agent_contributed(n_agents, 0);

  for (const auto& run : runs) {
    const auto& o = run.outcome;
    funded.add(o.funded ? 1.0 : 0.0);
    totals.add(o.final_total);
    race.add(o.race_fraction);
    for (std::size_t i = 0; i < n_agents; ++i) {
      const auto& a = o.agents[i];
      agent_payoff[i].add(a.payoff);
      payoffs.add(a.payoff);
      agent_contribution[i].add(a.contribution);
      if (a.contribution > 0.0) {
        ++agent_contributed[i];
        agent_epoch[i].add(a.contribution_epoch);
        epochs.add(a.contribution_epoch);
      }
    }
  }

  const double n = static_cast<double>(n_runs);
  s.funded_rate = funded.value() / n;
  const double half = 1.959963984540054 * std::sqrt(s.funded_rate * (1.0 - s.funded_rate) / n);
  s.funded_rate_ci_low = std::max(0.0, s.funded_rate - half);
  s.funded_rate_ci_high = std::min(1.0, s.funded_rate + half);
  s.mean_final_total = totals.mean();
  s.final_total_stddev = totals.stddev();
  s.mean_race_fraction = race.value() / n;
  s.mean_contribution_epoch = epochs.mean();
  s.mean_payoff = payoffs.mean();
  for (std::size_t i = 0; i < n_agents; ++i) {
    AgentSummary a;
    a.agent_id = prepared.scenario.agents[i].agent.id;
    a.mean_payoff = agent_payoff[i].mean();
    a.payoff_stderr = agent_payoff[i].standard_error();
    a.contribution_rate = agent_contributed[i] / n;
    a.mean_contribution = agent_contribution[i].value() / n;
    a.mean_contribution_epoch = agent_epoch[i].mean();
    s.agents.push_back(a);
  }
  if (runs_out != nullptr) *runs_out = std::move(runs);
  return s;
}

}  // namespace pprx::sim

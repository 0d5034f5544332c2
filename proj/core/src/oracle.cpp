#include "pprx/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "pprx/equilibrium.hpp"
#include "pprx/errors.hpp"
#include "pprx/numeric.hpp"
#include "pprx/parallel.hpp"
#include "pprx/payoff.hpp"
#include "pprx/rng.hpp"

namespace pprx::oracle {
namespace {

using equilibrium::TimingKind;

std::vector<double> belief_grid(double step) {
  if (!(step > 0.0 && step < 0.5)) throw ValidationError("grid: belief step must lie in (0, 0.5)");
  const auto cells = static_cast<long>(std::llround(1.0 / step));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(cells));
  for (long k = 1; k < cells; ++k) grid.push_back(static_cast<double>(k) * step);
  return grid;
}

// High-belief unfunded payoff at the High cap, C0 = H0.
double high_unfunded_at_cap(double b, Money theta, Money m, const ProjectConfig& cfg) {
  return (1.0 - b) * (cfg.contribution_budget / cfg.provision_point) *
         equilibrium::contribution_cap_high(b, theta, m, cfg);
}

std::size_t argmax_index(const std::vector<double>& grid, Money theta, Money m,
                         const ProjectConfig& cfg) {
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = high_unfunded_at_cap(grid[k], theta, m, cfg);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  return best;
}

std::string subject_of(BeliefClass cls, Probability b, Money theta, Money m) {
  std::ostringstream os;
  os << to_string(cls) << " b=" << b << " theta=" << theta << " m=" << m;
  return os.str();
}

}  // namespace

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::ExpectedDocumented: return "expected-documented";
    case Status::Skipped: return "skipped";
    case Status::Infeasible: return "infeasible";
    case Status::Refused: return "refused";
  }
  return "skipped";
}

OracleReport verify_bstar(const ProjectConfig& cfg, Money theta, Money m,
                          const GridSpec& grid_spec) {
  validate(cfg);
  if (!(theta + m > 0.0) || theta < 0.0 || m < 0.0) {
    throw ValidationError("verify_bstar: need theta, m >= 0 with theta + m > 0");
  }
  OracleReport report;
  report.claim = "bstar";
  {
    std::ostringstream os;
    os << "B_C/H0=" << cfg.contribution_budget / cfg.provision_point << " theta=" << theta
       << " m=" << m;
    report.subject = os.str();
  }
  const auto grid = belief_grid(grid_spec.belief_step);
  const std::size_t best = argmax_index(grid, theta, m, cfg);
  report.measured = grid[best];
  report.predicted = equilibrium::belief_threshold(cfg);
  report.tolerance = grid_spec.belief_step;
  const bool located = std::abs(report.measured - report.predicted) <= report.tolerance + 1e-15;
  if (!located) {
    report.counterexamples.push_back(
        {"grid argmax away from b*", {{"argmax", report.measured}, {"bstar", report.predicted}}});
  }

  const std::pair<double, double> pairs[] = {
      {theta * 0.5, m * 0.5}, {theta * 2.0, m * 2.0}, {theta * 10.0, m * 10.0},
      {theta * 100.0, m * 100.0}, {1.0, 0.0}, {0.0, 1.0}, {theta + 5.0, m},
      {theta, m + 3.0}, {3.0 * theta + 1.0, 0.1 * m}, {50.0, 7.0}};
  bool invariant = true;
  for (const auto& [t2, m2] : pairs) {
    const std::size_t k = argmax_index(grid, t2, m2, cfg);
    if (k != best) {
      invariant = false;
      report.counterexamples.push_back(
          {"argmax moved with (theta, m)", {{"theta", t2}, {"m", m2}, {"argmax", grid[k]}}});
    }
  }
  report.metrics["pairs_checked"] = static_cast<double>(std::size(pairs));
  report.metrics["argmax_value"] = high_unfunded_at_cap(grid[best], theta, m, cfg);
  report.status = located && invariant ? Status::Pass : Status::Fail;
  return report;
}

OracleReport verify_low_monotonicity(const ProjectConfig& cfg_in, Money theta, Money m,
                                     LowCapVariant variant, const GridSpec& grid_spec) {
  ProjectConfig cfg = cfg_in;
  cfg.low_cap_variant = variant;
  validate(cfg);
  OracleReport report;
  report.claim = "low_monotonicity";
  report.gating = false;
  {
    std::ostringstream os;
    os << "variant=" << to_string(variant) << " theta=" << theta << " m=" << m
       << " H0=" << cfg.provision_point << " B_C=" << cfg.contribution_budget;
    report.subject = os.str();
  }
  report.tolerance = 1e-12;
  if (!equilibrium::low_timing_condition(theta, m, cfg)) {
    report.status = Status::Skipped;
    report.notes.push_back("precondition theta > m and theta < m H0 / B_C does not hold");
    return report;
  }

  const auto grid = belief_grid(grid_spec.belief_step);
  std::vector<double> values;
  values.reserve(grid.size());
  for (double b : grid) {
    const Money x = equilibrium::contribution_cap_low(b, theta, m, cfg);
    values.push_back(
        expected_unfunded_payoff(BeliefClass::Low, b, x, cfg.provision_point, m, cfg));
  }

  std::size_t increasing_steps = 0;
  std::size_t low_region_drops = 0;
  std::size_t k = 1;
  while (k < values.size()) {
    if (values[k] - values[k - 1] > -report.tolerance) {
      ++increasing_steps;
      ++k;
      continue;
    }
    const std::size_t start = k - 1;
    while (k < values.size() && values[k] - values[k - 1] <= -report.tolerance) ++k;
    const std::size_t end = k - 1;
    if (grid[start] < 0.5) ++low_region_drops;
    report.counterexamples.push_back({"expected unfunded payoff decreases",
                                      {{"b_from", grid[start]},
                                       {"b_to", grid[end]},
                                       {"value_from", values[start]},
                                       {"value_to", values[end]}}});
  }
  report.measured = static_cast<double>(increasing_steps) / static_cast<double>(values.size() - 1);
  report.predicted = 1.0;
  report.metrics["increasing_fraction"] = report.measured;
  report.metrics["decreasing_regions"] = static_cast<double>(report.counterexamples.size());
  report.metrics["increasing_below_half"] = low_region_drops == 0 ? 1.0 : 0.0;
  report.series["belief"] = grid;
  report.series["expected_unfunded"] = values;
  report.status = report.counterexamples.empty() ? Status::Pass : Status::Fail;
  return report;
}

OracleReport verify_indifference(const ProjectConfig& cfg_in, BeliefClass cls, Probability b,
                                 Money theta, Money m, LowCapVariant variant) {
  ProjectConfig cfg = cfg_in;
  cfg.low_cap_variant = variant;
  validate(cfg);
  if (!(b > 0.0 && b < 1.0)) throw ValidationError("verify_indifference: b must lie in (0, 1)");
  OracleReport report;
  report.claim = "indifference";
  report.subject = subject_of(cls, b, theta, m);
  if (cls == BeliefClass::Low) report.subject += " variant=" + std::string(to_string(variant));
  report.tolerance = 1e-9;

  const Money x = equilibrium::contribution_cap(cls, b, theta, m, cfg);
  const double funded = expected_funded_payoff(cls, b, theta, x, m);
  const double unfunded =
      expected_unfunded_payoff(cls, b, x, cfg.provision_point, m, cfg);
  const double scale = std::max({std::abs(funded), std::abs(unfunded)});
  const double rel = scale > 0.0 ? std::abs(funded - unfunded) / scale : 0.0;
  report.measured = funded;
  report.predicted = unfunded;
  report.metrics["cap"] = x;
  report.metrics["relative_gap"] = rel;
  const bool equal = rel <= report.tolerance;

  if (cls == BeliefClass::Low && variant == LowCapVariant::Rederived &&
      b * theta < (1.0 - b) * m) {
    report.status = Status::Skipped;
    report.notes.push_back("rederived cap floored at 0: no non-negative indifference point");
    return report;
  }
  if (equal) {
    report.status = Status::Pass;
  } else if (cls == BeliefClass::Low && variant == LowCapVariant::PaperVerbatim) {
    report.status = Status::ExpectedDocumented;
    report.notes.push_back("printed low cap keeps +H0 m (1-b); indifference needs the minus sign");
  } else {
    report.status = Status::Fail;
  }
  if (!equal) {
    report.counterexamples.push_back(
        {"E[pi^F] != E[pi^UF] at the cap", {{"b", b}, {"funded", funded}, {"unfunded", unfunded}}});
  }
  return report;
}

OracleReport verify_timing(const ProjectConfig& cfg, BeliefClass cls,
                           const belief::StepGenerator& generator, Probability prior,
                           Money theta, Money m, const TimingOptions& options) {
  validate(cfg);
  if (options.mc_runs < 10'000) throw ValidationError("verify_timing: mc_runs must be >= 1e4");
  if (!(prior >= 0.0 && prior <= 1.0)) throw ValidationError("verify_timing: bad prior");
  const auto drift = belief::classify_generator(generator, belief::default_probes(cfg));
  if (drift == belief::DriftClass::Mixed) {
    throw UnsupportedDriftError("verify_timing: mixed drift has no predicted timing");
  }

  OracleReport report;
  report.claim = "timing";
  report.subject = subject_of(cls, prior, theta, m) + " drift=" +
                   std::string(belief::to_string(drift)) + " family=" +
                   std::string(belief::family_name(generator));

  equilibrium::TimingRule rule;
  if (cls == BeliefClass::High) {
    rule = equilibrium::timing_high(prior, drift, cfg, 1);
  } else {
    const auto low = equilibrium::timing_low(theta, m, drift, cfg, 1);
    rule = low.rule;
    if (!low.precondition_met) {
      report.notes.push_back("low timing precondition fails; checking the deadline fallback");
    }
  }
  report.notes.push_back("rule=" + equilibrium::to_string(rule));

  const Epoch horizon = cfg.contribution_deadline;
  const auto paths = static_cast<std::size_t>(options.mc_runs);
  const auto width = static_cast<std::size_t>(horizon) + 1;  // epochs 1..T_C, then tau value
  std::vector<double> values(paths * width);
  std::vector<double> beliefs(paths * static_cast<std::size_t>(horizon));
  std::vector<Epoch> tau(paths);
  std::vector<char> touched(paths);
  auto payoff_at = [&](double b) {
    const Money x = equilibrium::contribution_cap(cls, b, theta, m, cfg);
    return expected_unfunded_payoff(cls, b, x, cfg.provision_point, m, cfg);
  };

  parallel_for(paths, options.threads, [&](std::size_t r) {
    belief::BeliefWalk walk(0, prior, generator, derive_seed(options.seed, r, 0), 1);
    double* row = &values[r * width];
    Epoch stop = 0;
    for (Epoch t = 1; t <= horizon; ++t) {
      if (t > 1) walk.step({0.0, horizon - t, horizon, cfg.provision_point});
      const double b = walk.current();
      beliefs[r * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(t - 1)] = b;
      row[t - 1] = payoff_at(b);
      if (stop == 0 && rule.kind == TimingKind::FirstCrossing && rule.crossed(b)) stop = t;
    }
    if (stop == 0) stop = horizon;
    tau[r] = stop;
    row[horizon] = row[stop - 1];
    touched[r] = walk.touched_boundary() ? 1 : 0;
  });

  std::vector<double> profile(static_cast<std::size_t>(horizon));
  std::vector<double> profile_se(static_cast<std::size_t>(horizon));
  std::vector<double> mean_belief(static_cast<std::size_t>(horizon));
  std::vector<double> mean_path_value(static_cast<std::size_t>(horizon));
  for (Epoch t = 0; t < horizon; ++t) {
    RunningStats s;
    RunningStats bs;
    for (std::size_t r = 0; r < paths; ++r) {
      s.add(values[r * width + static_cast<std::size_t>(t)]);
      bs.add(beliefs[r * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(t)]);
    }
    profile[static_cast<std::size_t>(t)] = s.mean();
    profile_se[static_cast<std::size_t>(t)] = s.standard_error();
    mean_belief[static_cast<std::size_t>(t)] = bs.mean();
    mean_path_value[static_cast<std::size_t>(t)] = payoff_at(bs.mean());
  }
  const auto best = static_cast<std::size_t>(
      std::max_element(profile.begin(), profile.end()) - profile.begin());
  const double eps = 1e-12 * (1.0 + std::abs(profile[best]));

  // Paired comparison of the empirical best epoch against column `col`.
  auto shortfall = [&](std::size_t col) {
    RunningStats d;
    for (std::size_t r = 0; r < paths; ++r) {
      d.add(values[r * width + best] - values[r * width + col]);
    }
    return std::pair{d.mean(), d.standard_error()};
  };
  auto indistinguishable = [&](std::size_t col) {
    const auto [gap, se] = shortfall(col);
    return gap <= options.sigma * se + eps;
  };

  std::vector<double> in_set(static_cast<std::size_t>(horizon));
  for (std::size_t t = 0; t < in_set.size(); ++t) in_set[t] = indistinguishable(t) ? 1.0 : 0.0;

  report.measured = static_cast<double>(best + 1);
  report.tolerance = options.sigma;
  bool pass = false;
  auto record_gap = [&](std::size_t col, const std::string& what) {
    const auto [gap, se] = shortfall(col);
    report.counterexamples.push_back({what,
                                      {{"best_epoch", static_cast<double>(best + 1)},
                                       {"checked_epoch", static_cast<double>(col + 1)},
                                       {"gap", gap},
                                       {"gap_stderr", se}}});
  };

  switch (rule.kind) {
    case TimingKind::Immediate: {
      report.predicted = rule.epoch;
      pass = in_set[0] > 0.0;
      if (!pass) record_gap(0, "a later epoch beats contributing on arrival");
      break;
    }
    case TimingKind::AtDeadline: {
      report.predicted = horizon;
      const std::size_t last = static_cast<std::size_t>(horizon - 1);
      pass = in_set[last] > 0.0;
      if (!pass) record_gap(last, "an earlier epoch beats contributing at the deadline");
      if (drift == belief::DriftClass::Martingale) {
        for (std::size_t t = 0; t < in_set.size(); ++t) {
          if (in_set[t] == 0.0) {
            pass = false;
            record_gap(t, "profile not flat under a martingale");
          }
        }
        report.metrics["flat"] = pass ? 1.0 : 0.0;
      }
      break;
    }
    case TimingKind::FirstCrossing: {
      RunningStats stop_epoch;
      double crossed = 0.0;
      for (std::size_t r = 0; r < paths; ++r) {
        stop_epoch.add(tau[r]);
        if (rule.crossed(beliefs[r * static_cast<std::size_t>(horizon) +
                                 static_cast<std::size_t>(tau[r] - 1)])) {
          crossed += 1.0;
        }
      }
      report.predicted = stop_epoch.mean();
      report.metrics["crossing_rate"] = crossed / static_cast<double>(paths);
      const auto [gap, se] = shortfall(static_cast<std::size_t>(horizon));
      report.metrics["rule_value"] = profile[best] - gap;
      report.metrics["rule_gap"] = gap;
      report.metrics["rule_gap_stderr"] = se;
      pass = gap <= options.sigma * se + eps;
      if (!pass) {
        report.counterexamples.push_back({"a fixed epoch beats the crossing rule",
                                          {{"best_epoch", static_cast<double>(best + 1)},
                                           {"gap", gap},
                                           {"gap_stderr", se}}});
      }
      break;
    }
  }

  double touched_count = 0.0;
  for (char c : touched) touched_count += c;
  report.metrics["boundary_touch_rate"] = touched_count / static_cast<double>(paths);
  report.metrics["best_fixed_value"] = profile[best];
  report.metrics["drift_class"] = static_cast<double>(drift);
  report.series["profile"] = std::move(profile);
  report.series["profile_stderr"] = std::move(profile_se);
  report.series["indistinguishable"] = std::move(in_set);
  report.series["mean_belief"] = std::move(mean_belief);
  // First-order view: payoff at the mean belief. Flat under a martingale
  // even when the profile itself is not (Jensen gap of a concave payoff).
  report.series["mean_path_value"] = std::move(mean_path_value);
  report.status = pass ? Status::Pass : Status::Fail;
  return report;
}

sim::Scenario with_equilibrium_policies(sim::Scenario scenario) {
  for (auto& a : scenario.agents) a.policy = sim::EquilibriumPolicy{};
  return scenario;
}

OracleReport best_response_check(const sim::PreparedScenario& prepared, int agent_id,
                                 const DeviationGrid& grid, const BestResponseOptions& options) {
  OracleReport report;
  report.claim = "best_response";
  report.subject = "agent " + std::to_string(agent_id);
  report.tolerance = options.sigma;
  const auto& cfg = prepared.scenario.cfg;
  const std::size_t n = prepared.scenario.agents.size();
  if (n > options.max_agents || cfg.contribution_deadline > options.max_deadline) {
    report.status = Status::Refused;
    std::ostringstream os;
    os << "instance too large for exhaustive deviation sweeps: n=" << n
       << " T_C=" << cfg.contribution_deadline << " (limits n <= " << options.max_agents
       << ", T_C <= " << options.max_deadline << ")";
    report.notes.push_back(os.str());
    return report;
  }
  if (options.mc_runs < 10'000) {
    throw ValidationError("best_response_check: mc_runs must be >= 1e4");
  }
  if (grid.contribution_points < 1) {
    throw ValidationError("best_response_check: need at least one contribution point");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!prepared.strategies[i]) {
      report.status = Status::Refused;
      report.notes.push_back("agent " + std::to_string(prepared.scenario.agents[i].agent.id) +
                             " has no equilibrium strategy (mixed drift)");
      return report;
    }
  }

  sim::PreparedScenario base = prepared;
  base.scenario = with_equilibrium_policies(prepared.scenario);
  const std::size_t idx = base.index_of(agent_id);
  const Agent& agent = base.scenario.agents[idx].agent;

  std::vector<sim::FixedPolicy> deviations;
  std::vector<Epoch> epochs = grid.epochs;
  if (epochs.empty()) {
    for (Epoch t = agent.arrival_contribution_phase; t <= cfg.contribution_deadline; ++t) {
      epochs.push_back(t);
    }
  }
  const double upper = agent.valuation + agent.bbr_reward;
  for (Epoch t : epochs) {
    if (t < agent.arrival_contribution_phase || t > cfg.contribution_deadline) continue;
    for (int k = 0; k < grid.contribution_points; ++k) {
      const double x = grid.contribution_points == 1
                           ? 0.0
                           : upper * k / static_cast<double>(grid.contribution_points - 1);
      deviations.push_back({x, t});
    }
  }

  const auto runs = static_cast<std::size_t>(options.mc_runs);
  std::vector<double> equilibrium_payoff(runs);
  parallel_for(runs, options.threads, [&](std::size_t r) {
    equilibrium_payoff[r] = sim::run_full(base, r).outcome.agents[idx].payoff;
  });

  struct Cell {
    double gain = 0.0;
    double se = 0.0;
  };
  std::vector<Cell> cells(deviations.size());
  parallel_for(deviations.size(), options.threads, [&](std::size_t d) {
    const sim::PolicyOverride override_policy{idx, deviations[d]};
    RunningStats diff;
    for (std::size_t r = 0; r < runs; ++r) {
      const double p = sim::run_full(base, r, &override_policy).outcome.agents[idx].payoff;
      diff.add(p - equilibrium_payoff[r]);
    }
    cells[d] = {diff.mean(), diff.standard_error()};
  });

  // Replaying one cell must reproduce its payoffs exactly.
  bool replay_identical = true;
  if (!deviations.empty()) {
    const sim::PolicyOverride probe{idx, deviations.front()};
    for (std::size_t r = 0; r < std::min<std::size_t>(runs, 64); ++r) {
      const double a = sim::run_full(base, r, &probe).outcome.agents[idx].payoff;
      const double b = sim::run_full(base, r, &probe).outcome.agents[idx].payoff;
      replay_identical &= a == b;
    }
  }

  RunningStats eq_stats;
  for (double p : equilibrium_payoff) eq_stats.add(p);
  double worst_gain = -std::numeric_limits<double>::infinity();
  double worst_se = 0.0;
  std::size_t violations = 0;
  std::vector<std::size_t> violating;
  for (std::size_t d = 0; d < cells.size(); ++d) {
    if (cells[d].gain > worst_gain) {
      worst_gain = cells[d].gain;
      worst_se = cells[d].se;
    }
    if (cells[d].gain > options.sigma * cells[d].se + 1e-9) {
      ++violations;
      violating.push_back(d);
    }
  }
  std::sort(violating.begin(), violating.end(),
            [&](std::size_t a, std::size_t b) { return cells[a].gain > cells[b].gain; });
  for (std::size_t k = 0; k < std::min<std::size_t>(violating.size(), 10); ++k) {
    const std::size_t d = violating[k];
    report.counterexamples.push_back({"deviation beats the equilibrium strategy",
                                      {{"x", deviations[d].amount},
                                       {"t", static_cast<double>(deviations[d].epoch)},
                                       {"gain", cells[d].gain},
                                       {"gain_stderr", cells[d].se}}});
  }

  report.measured = deviations.empty() ? 0.0 : worst_gain;
  report.predicted = 0.0;
  report.metrics["equilibrium_payoff"] = eq_stats.mean();
  report.metrics["equilibrium_payoff_stderr"] = eq_stats.standard_error();
  report.metrics["max_gain_stderr"] = worst_se;
  report.metrics["deviations"] = static_cast<double>(deviations.size());
  report.metrics["violations"] = static_cast<double>(violations);
  report.metrics["crn_replay_identical"] = replay_identical ? 1.0 : 0.0;
  report.status = violations == 0 && replay_identical ? Status::Pass : Status::Fail;
  return report;
}

OracleReport verify_funded_at_equilibrium(const sim::PreparedScenario& prepared,
                                          std::uint64_t run_index) {
  OracleReport report;
  report.claim = "funded";
  report.subject = prepared.scenario.name.empty() ? "scenario" : prepared.scenario.name;
  for (const auto& s : prepared.strategies) {
    if (!s) {
      report.status = Status::Refused;
      report.notes.push_back("an agent has no equilibrium strategy (mixed drift)");
      return report;
    }
  }
  sim::PreparedScenario base = prepared;
  base.scenario = with_equilibrium_policies(prepared.scenario);
  const auto run = sim::run_full(base, run_index);
  const Money target = base.scenario.cfg.provision_point;
  report.measured = run.outcome.final_total;
  report.predicted = target;
  report.tolerance = 0.0;

  double cap_sum = 0.0;
  for (const auto& e : run.ledger.events) cap_sum += e.cap;
  report.metrics["cap_sum"] = cap_sum;
  report.metrics["end_epoch"] = run.outcome.end_epoch;

  if (run.outcome.funded) {
    report.status = run.outcome.final_total == target ? Status::Pass : Status::Fail;
    if (report.status == Status::Fail) {
      report.counterexamples.push_back(
          {"funded with C0 != H0", {{"C0", run.outcome.final_total}, {"H0", target}}});
    }
  } else if (cap_sum < target) {
    report.status = Status::Infeasible;
    report.notes.push_back("equilibrium infeasible at these beliefs: caps sum below H0");
  } else {
    report.status = Status::Fail;
    report.counterexamples.push_back(
        {"caps cover H0 but the run ended unfunded", {{"cap_sum", cap_sum}, {"H0", target}}});
  }
  return report;
}

}  // namespace pprx::oracle

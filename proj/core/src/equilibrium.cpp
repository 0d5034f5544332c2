#include "pprx/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "pprx/errors.hpp"

namespace pprx::equilibrium {
namespace {

void check_cap_inputs(Probability b, Money theta, Money m) {
  if (!(b >= 0.0 && b <= 1.0)) throw ValidationError("cap: belief must lie in [0, 1]");
  if (!(theta >= 0.0) || !(m >= 0.0)) throw ValidationError("cap: theta and m must be >= 0");
}

void reject_mixed(DriftClass drift) {
  if (drift == DriftClass::Mixed) {
    throw UnsupportedDriftError(
        "timing is only defined for martingale, super- and sub-martingale beliefs");
  }
}

}  // namespace

std::string_view to_string(TimingKind k) {
  switch (k) {
    case TimingKind::Immediate: return "immediate";
    case TimingKind::AtDeadline: return "at_deadline";
    case TimingKind::FirstCrossing: return "first_crossing";
  }
  return "at_deadline";
}

std::string_view to_string(RaceVerdict v) {
  return v == RaceVerdict::Persists ? "persists" : "avoided";
}

std::string to_string(const TimingRule& rule) {
  std::ostringstream os;
  switch (rule.kind) {
    case TimingKind::Immediate: os << "immediate(" << rule.epoch << ")"; break;
    case TimingKind::AtDeadline: os << "at_deadline(" << rule.epoch << ")"; break;
    case TimingKind::FirstCrossing:
      os << "first_crossing("
         << (rule.direction == CrossingDirection::Downward ? "down" : "up") << ","
         << rule.threshold << ",fallback=" << rule.epoch << ")";
      break;
  }
  return os.str();
}

Money contribution_cap_high(Probability b, Money theta, Money m, const ProjectConfig& cfg) {
  check_cap_inputs(b, theta, m);
  const double h0 = cfg.provision_point;
  const double bc = cfg.contribution_budget;
  if (b == 0.0) return 0.0;
  return h0 * b * (theta + m) / (bc * (1.0 - b) + h0 * b);
}

Money contribution_cap_low(Probability b, Money theta, Money m, const ProjectConfig& cfg) {
  check_cap_inputs(b, theta, m);
  const double h0 = cfg.provision_point;
  const double bc = cfg.contribution_budget;
  const double denominator = bc * (1.0 - b) + h0 * b;
  if (cfg.low_cap_variant == LowCapVariant::PaperVerbatim) {
    return (h0 * b * theta + h0 * m * (1.0 - b)) / denominator;
  }
  return std::max(0.0, (h0 * b * theta - h0 * m * (1.0 - b)) / denominator);
}

Money contribution_cap(BeliefClass cls, Probability b, Money theta, Money m,
                       const ProjectConfig& cfg) {
  return cls == BeliefClass::High ? contribution_cap_high(b, theta, m, cfg)
                                  : contribution_cap_low(b, theta, m, cfg);
}

Probability belief_threshold(const ProjectConfig& cfg) {
  if (!(cfg.provision_point > 0.0) || !(cfg.contribution_budget > 0.0)) {
    throw ValidationError("belief_threshold: H0 and B_C must be > 0");
  }
  const double r = std::sqrt(cfg.contribution_budget / cfg.provision_point);
  return r / (1.0 + r);
}

TimingRule timing_high(Probability prior, DriftClass drift, const ProjectConfig& cfg,
                       Epoch arrival) {
  reject_mixed(drift);
  const Epoch deadline = cfg.contribution_deadline;
  const Probability threshold = belief_threshold(cfg);
  switch (drift) {
    case DriftClass::Martingale:
      return {TimingKind::AtDeadline, deadline};
    case DriftClass::SuperMartingale:
      if (prior <= threshold) return {TimingKind::Immediate, arrival};
      return {TimingKind::FirstCrossing, deadline, threshold, CrossingDirection::Downward};
    case DriftClass::SubMartingale:
      if (prior >= threshold) return {TimingKind::Immediate, arrival};
      return {TimingKind::FirstCrossing, deadline, threshold, CrossingDirection::Upward};
    case DriftClass::Mixed:
      break;
  }
  throw UnsupportedDriftError("unreachable drift class");
}

bool low_timing_condition(Money theta, Money m, const ProjectConfig& cfg) {
  return theta > m && theta < m * cfg.provision_point / cfg.contribution_budget;
}

LowTiming timing_low(Money theta, Money m, DriftClass drift, const ProjectConfig& cfg,
                     Epoch arrival) {
  reject_mixed(drift);
  const Epoch deadline = cfg.contribution_deadline;
  if (!low_timing_condition(theta, m, cfg)) {
    return {{TimingKind::AtDeadline, deadline}, false};
  }
  if (drift == DriftClass::SuperMartingale) return {{TimingKind::Immediate, arrival}, true};
  return {{TimingKind::AtDeadline, deadline}, true};
}

RaceVerdict race_verdict(const TimingRule& rule) {
  return rule.kind == TimingKind::AtDeadline ? RaceVerdict::Persists : RaceVerdict::Avoided;
}

EquilibriumStrategy equilibrium_strategy(const Agent& agent, DriftClass drift,
                                         const ProjectConfig& cfg) {
  EquilibriumStrategy s;
  s.agent_id = agent.id;
  s.cls = classify_agent(agent.prior_belief);
  s.belief_report = agent.prior_belief;
  s.report_epoch = agent.arrival_belief_phase;
  s.drift = drift;
  if (s.cls == BeliefClass::High) {
    s.timing = timing_high(agent.prior_belief, drift, cfg, agent.arrival_contribution_phase);
  } else {
    const auto low = timing_low(agent.valuation, agent.bbr_reward, drift, cfg,
                                agent.arrival_contribution_phase);
    s.timing = low.rule;
    s.timing_precondition_met = low.precondition_met;
  }
  s.verdict = race_verdict(s.timing);
  s.nominal_cap_belief =
      s.timing.kind == TimingKind::FirstCrossing ? s.timing.threshold : agent.prior_belief;
  s.nominal_cap =
      contribution_cap(s.cls, s.nominal_cap_belief, agent.valuation, agent.bbr_reward, cfg);
  s.zero_belief_limit = s.nominal_cap_belief == 0.0;
  return s;
}

std::vector<EquilibriumStrategy> assemble_spe(std::span<const Agent> agents,
                                              std::span<const DriftClass> drifts,
                                              const ProjectConfig& cfg) {
  validate(cfg);
  if (agents.size() != drifts.size()) {
    throw ValidationError("assemble_spe: one drift class per agent is required");
  }
  if (!(total_valuation(agents) > cfg.provision_point)) {
    throw ScenarioError("insufficient interest: total valuation must exceed H0");
  }
  std::vector<EquilibriumStrategy> out;
  out.reserve(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    validate(agents[i], cfg);
    out.push_back(equilibrium_strategy(agents[i], drifts[i], cfg));
  }
  return out;
}

}  // namespace pprx::equilibrium

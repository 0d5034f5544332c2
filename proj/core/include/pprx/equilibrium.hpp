#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pprx/belief.hpp"
#include "pprx/model.hpp"

namespace pprx::equilibrium {

using belief::DriftClass;

enum class TimingKind { Immediate, AtDeadline, FirstCrossing };
enum class CrossingDirection { Downward, Upward };
enum class RaceVerdict { Avoided, Persists };

struct TimingRule {
  TimingKind kind = TimingKind::AtDeadline;
  // Immediate: the arrival epoch. AtDeadline and FirstCrossing: T_C, which
  // is also the fallback when no crossing happens.
  Epoch epoch = 1;
  Probability threshold = 0.0;  // FirstCrossing only
  CrossingDirection direction = CrossingDirection::Downward;

  // Whether a walk sitting at `belief` triggers the crossing condition.
  bool crossed(Probability belief) const {
    return direction == CrossingDirection::Downward ? belief <= threshold
                                                    : belief >= threshold;
  }
};

std::string to_string(const TimingRule& rule);
std::string_view to_string(TimingKind k);
std::string_view to_string(RaceVerdict v);

/// Largest contribution at which a High agent still weakly prefers the
/// funded outcome at C0 = H0:  H0 b (theta + m) / (B_C (1 - b) + H0 b).
/// Returns the limit value 0 at b = 0.
Money contribution_cap_high(Probability b, Money theta, Money m,
                            const ProjectConfig& cfg);

/// Low-belief cap. PaperVerbatim keeps the printed "+ H0 m (1 - b)" term;
/// Rederived solves b(theta - x) >= (1 - b)(x B_C / H0 + m), which gives a
/// minus sign, and floors the result at 0.
Money contribution_cap_low(Probability b, Money theta, Money m,
                           const ProjectConfig& cfg);

Money contribution_cap(BeliefClass cls, Probability b, Money theta, Money m,
                       const ProjectConfig& cfg);

// b* = sqrt(B_C/H0) / (1 + sqrt(B_C/H0)).
Probability belief_threshold(const ProjectConfig& cfg);

TimingRule timing_high(Probability prior, DriftClass drift,
                       const ProjectConfig& cfg, Epoch arrival);

struct LowTiming {
  TimingRule rule;
  // false: the Low timing result does not apply and the rule is the
  // AtDeadline fallback.
  bool precondition_met = true;
};

LowTiming timing_low(Money theta, Money m, DriftClass drift,
                     const ProjectConfig& cfg, Epoch arrival);

// theta > m and theta < m H0 / B_C.
bool low_timing_condition(Money theta, Money m, const ProjectConfig& cfg);

RaceVerdict race_verdict(const TimingRule& rule);

struct EquilibriumStrategy {
  int agent_id = 0;
  BeliefClass cls = BeliefClass::High;
  Probability belief_report = 0.0;  // the prior, reported truthfully
  Epoch report_epoch = 1;           // the belief-phase arrival
  DriftClass drift = DriftClass::Martingale;
  TimingRule timing;
  RaceVerdict verdict = RaceVerdict::Persists;
  // Cap evaluated at the belief expected at the contribution epoch: b* for
  // FirstCrossing, the prior otherwise. The engine re-evaluates the cap at
  // the realized belief.
  Money nominal_cap = 0.0;
  Probability nominal_cap_belief = 0.0;
  bool timing_precondition_met = true;
  bool zero_belief_limit = false;
};

EquilibriumStrategy equilibrium_strategy(const Agent& agent, DriftClass drift,
                                         const ProjectConfig& cfg);

// Strategy profile for a whole population. Throws ScenarioError unless the
// total valuation exceeds H0.
std::vector<EquilibriumStrategy> assemble_spe(std::span<const Agent> agents,
                                              std::span<const DriftClass> drifts,
                                              const ProjectConfig& cfg);

}  // namespace pprx::equilibrium

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pprx {

using Money = double;
using Probability = double;
using Epoch = int;

inline constexpr double kMoneyPrecision = 1e-9;

enum class LowCapVariant { PaperVerbatim, Rederived };

enum class BeliefClass { High, Low };

struct ProjectConfig {
  Money provision_point = 0.0;      // H0
  Money contribution_budget = 0.0;  // B_C, refund bonus pool
  Money belief_budget = 0.0;        // B_B, belief based reward pool
  Epoch belief_deadline = 1;        // T_B
  Epoch contribution_deadline = 1;  // T_C
  LowCapVariant low_cap_variant = LowCapVariant::PaperVerbatim;

  Epoch horizon() const { return belief_deadline + contribution_deadline; }
};

// Throws ValidationError on the first violated field.
void validate(const ProjectConfig& cfg);

struct Agent {
  int id = 0;
  Money valuation = 0.0;            // theta
  Probability prior_belief = 0.0;   // b_{i,0}
  Epoch arrival_belief_phase = 1;   // a_{i,1}
  Epoch arrival_contribution_phase = 1;  // a_{i,2}
  Money bbr_reward = 0.0;           // m_i, filled in after the belief phase
};

void validate(const Agent& agent, const ProjectConfig& cfg);

// Sum of valuations (vartheta).
Money total_valuation(std::span<const Agent> agents);

// High iff the reported belief is at least 1/2.
BeliefClass classify_agent(Probability reported_belief);

std::string_view to_string(BeliefClass c);
std::string_view to_string(LowCapVariant v);
LowCapVariant parse_low_cap_variant(std::string_view s);

// Rounds to the ledger precision. Only used when values leave the engine.
Money round_money(Money value, double precision = kMoneyPrecision);

}  // namespace pprx

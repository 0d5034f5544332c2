#include "pprx/model.hpp"

#include <cmath>
#include <string>

#include "pprx/errors.hpp"

namespace pprx {
namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const ProjectConfig& cfg) {
  if (!finite_positive(cfg.provision_point)) {
    throw ValidationError("provision_point must be > 0");
  }
  if (!finite_positive(cfg.contribution_budget)) {
    throw ValidationError("contribution_budget must be > 0");
  }
  if (!finite_positive(cfg.belief_budget)) {
    throw ValidationError("belief_budget must be > 0");
  }
  if (cfg.belief_deadline < 1) throw ValidationError("belief_deadline must be >= 1");
  if (cfg.contribution_deadline < 1) {
    throw ValidationError("contribution_deadline must be >= 1");
  }
}

void validate(const Agent& agent, const ProjectConfig& cfg) {
  const std::string who = "agent " + std::to_string(agent.id) + ": ";
  if (!std::isfinite(agent.valuation) || agent.valuation < 0.0) {
    throw ValidationError(who + "valuation must be >= 0");
  }
  if (!(agent.prior_belief >= 0.0 && agent.prior_belief <= 1.0)) {
    throw ValidationError(who + "prior_belief must lie in [0, 1]");
  }
  if (agent.arrival_belief_phase < 1 || agent.arrival_belief_phase > cfg.belief_deadline) {
    throw ValidationError(who + "arrival_belief_phase must lie in [1, T_B]");
  }
  if (agent.arrival_contribution_phase < 1 ||
      agent.arrival_contribution_phase > cfg.contribution_deadline) {
    throw ValidationError(who + "arrival_contribution_phase must lie in [1, T_C]");
  }
  if (!std::isfinite(agent.bbr_reward) || agent.bbr_reward < 0.0) {
    throw ValidationError(who + "bbr_reward must be >= 0");
  }
}

Money total_valuation(std::span<const Agent> agents) {
  Money total = 0.0;
  for (const auto& a : agents) total += a.valuation;
  return total;
}

BeliefClass classify_agent(Probability reported_belief) {
  if (!(reported_belief >= 0.0 && reported_belief <= 1.0)) {
    throw ValidationError("reported belief must lie in [0, 1]");
  }
  return reported_belief >= 0.5 ? BeliefClass::High : BeliefClass::Low;
}

std::string_view to_string(BeliefClass c) {
  return c == BeliefClass::High ? "high" : "low";
}

std::string_view to_string(LowCapVariant v) {
  return v == LowCapVariant::PaperVerbatim ? "paper" : "rederived";
}

LowCapVariant parse_low_cap_variant(std::string_view s) {
  if (s == "paper" || s == "paper_verbatim") return LowCapVariant::PaperVerbatim;
  if (s == "rederived") return LowCapVariant::Rederived;
  throw ValidationError("unknown low cap variant '" + std::string(s) +
                        "' (expected paper|rederived)");
}

Money round_money(Money value, double precision) {
  const double r = std::round(value / precision) * precision;
  return r == 0.0 ? 0.0 : r;  // no negative zero in output
}

}  // namespace pprx

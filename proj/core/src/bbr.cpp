#include "pprx/bbr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "pprx/errors.hpp"

namespace pprx::bbr {

QuadraticOutcomeScorer::QuadraticOutcomeScorer(double reference_funded_rate)
    : rate_(reference_funded_rate) {
  if (!(rate_ >= 0.0 && rate_ <= 1.0)) {
    throw ValidationError("quadratic scorer: reference funded rate must lie in [0, 1]");
  }
}

double QuadraticOutcomeScorer::score(const BeliefReport& report,
                                     std::span<const BeliefReport>) const {
  const double b = report.reported_belief;
  // Mean of 1 - (b - o)^2 over outcomes o ~ Bernoulli(rate).
  return 1.0 - (rate_ * (1.0 - b) * (1.0 - b) + (1.0 - rate_) * b * b);
}

ScoreVector score_reports(std::span<const BeliefReport> reports, const PeerScorer& scorer) {
  std::vector<BeliefReport> sorted(reports.begin(), reports.end());
  std::set<int> seen;
  for (const auto& r : sorted) {
    if (!(r.reported_belief >= 0.0 && r.reported_belief <= 1.0)) {
      throw ValidationError("belief report outside [0, 1] for agent " +
                            std::to_string(r.agent_id));
    }
    if (r.report_epoch < 1) throw ValidationError("belief report epoch must be >= 1");
    if (!seen.insert(r.agent_id).second) {
      throw ValidationError("duplicate belief report for agent " + std::to_string(r.agent_id));
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.report_epoch != b.report_epoch ? a.report_epoch < b.report_epoch
                                            : a.agent_id < b.agent_id;
  });

  ScoreVector out;
  const std::size_t n = sorted.size();
  out.agent_ids.reserve(n);
  out.report_epochs.reserve(n);
  out.raw.reserve(n);
  for (const auto& r : sorted) {
    const double y = scorer.score(r, sorted);
    if (!(y >= 0.0) || !std::isfinite(y)) {
      throw ScorerContractError("scorer '" + scorer.name() + "' returned an invalid score " +
                                std::to_string(y) + " for agent " +
                                std::to_string(r.agent_id));
    }
    out.agent_ids.push_back(r.agent_id);
    out.report_epochs.push_back(r.report_epoch);
    out.raw.push_back(y);
  }

  // S_t is defined by epoch, so every report in an epoch shares the
  // denominator that includes the whole epoch.
  out.weights.assign(n, 0.0);
  double running = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && out.report_epochs[j] == out.report_epochs[i]) running += out.raw[j++];
    for (std::size_t k = i; k < j; ++k) {
      out.weights[k] = running > 0.0 ? out.raw[k] / running : 0.0;
    }
    i = j;
  }
  return out;
}

std::vector<Money> compute_bbr(const ScoreVector& scores, std::span<const BeliefClass> classes,
                               Money belief_budget) {
  if (classes.size() != scores.size()) {
    throw ValidationError("compute_bbr: every scored agent needs a belief class");
  }
  if (!(belief_budget >= 0.0)) throw ValidationError("compute_bbr: B_B must be >= 0");

  std::vector<Money> rewards(scores.size(), 0.0);
  for (BeliefClass cls : {BeliefClass::High, BeliefClass::Low}) {
    double class_weight = 0.0;
    std::size_t members = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (classes[i] != cls) continue;
      class_weight += scores.weights[i];
      ++members;
    }
    if (members == 0) continue;
    if (!(class_weight > 0.0)) {
      throw DegenerateScoresError(std::string("all weights are zero in the ") +
                                  std::string(to_string(cls)) + " belief class");
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (classes[i] == cls) rewards[i] = scores.weights[i] / class_weight * belief_budget;
    }
  }
  return rewards;
}

}  // namespace pprx::bbr

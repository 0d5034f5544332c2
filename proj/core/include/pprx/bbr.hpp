#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pprx/model.hpp"

namespace pprx::bbr {

struct BeliefReport {
  int agent_id = 0;
  Probability reported_belief = 0.0;
  Epoch report_epoch = 1;
};

// Raw score y_i for one report. Implementations must return y >= 0.
class PeerScorer {
 public:
  virtual ~PeerScorer() = default;
  virtual double score(const BeliefReport& report,
                       std::span<const BeliefReport> all_reports) const = 0;
  virtual std::string name() const = 0;
};

// y == 1 for every report.
class UniformScorer final : public PeerScorer {
 public:
  double score(const BeliefReport&, std::span<const BeliefReport>) const override {
    return 1.0;
  }
  std::string name() const override { return "uniform"; }
};

// Expected quadratic score 1 - (b - o)^2 against a reference ensemble whose
// funding outcome o is 1 with frequency `reference_funded_rate`.
class QuadraticOutcomeScorer final : public PeerScorer {
 public:
  explicit QuadraticOutcomeScorer(double reference_funded_rate);
  double score(const BeliefReport& report,
               std::span<const BeliefReport> all_reports) const override;
  std::string name() const override { return "quadratic"; }
  double reference_funded_rate() const { return rate_; }

 private:
  double rate_;
};

// Parallel arrays in report order (epoch ascending, then agent id).
struct ScoreVector {
  std::vector<int> agent_ids;
  std::vector<Epoch> report_epochs;
  std::vector<double> raw;
  std::vector<double> weights;

  std::size_t size() const { return agent_ids.size(); }
};

// w_i = y_i / sum of y_j over every report with t_j <= t_i.
ScoreVector score_reports(std::span<const BeliefReport> reports,
                          const PeerScorer& scorer);

// m_i = w_i / (sum of w over i's class) * B_B. `classes` is aligned with
// `scores`. An empty class receives nothing.
std::vector<Money> compute_bbr(const ScoreVector& scores,
                               std::span<const BeliefClass> classes,
                               Money belief_budget);

}  // namespace pprx::bbr

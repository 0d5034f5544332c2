#include <gtest/gtest.h>

#include <numeric>
#include <vector>

#include "pprx/bbr.hpp"
#include "pprx/errors.hpp"

using namespace pprx;
using namespace pprx::bbr;

namespace {

class ConstScorer final : public PeerScorer {
 public:
  explicit ConstScorer(double y) : y_(y) {}
  double score(const BeliefReport&, std::span<const BeliefReport>) const override { return y_; }
  std::string name() const override { return "const"; }

 private:
  double y_;
};

double class_sum(const std::vector<Money>& m, const std::vector<BeliefClass>& cls, BeliefClass c) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (cls[i] == c) s += m[i];
  }
  return s;
}

}  // namespace

TEST(Scores, RunningNormalization) {
  const std::vector<BeliefReport> reports = {{1, 0.7, 1}, {2, 0.6, 2}, {3, 0.2, 3}};
  const auto s = score_reports(reports, UniformScorer{});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s.weights[0], 1.0);
  EXPECT_DOUBLE_EQ(s.weights[1], 0.5);
  EXPECT_DOUBLE_EQ(s.weights[2], 1.0 / 3.0);
}

TEST(Scores, SingleAndEmpty) {
  const std::vector<BeliefReport> one = {{4, 0.9, 2}};
  EXPECT_EQ(score_reports(one, UniformScorer{}).weights, std::vector<double>{1.0});
  EXPECT_EQ(score_reports({}, UniformScorer{}).size(), 0u);
}

TEST(Scores, SimultaneousShareDenominator) {
  const std::vector<BeliefReport> reports = {{2, 0.7, 1}, {1, 0.6, 1}};
  const auto s = score_reports(reports, UniformScorer{});
  EXPECT_EQ(s.agent_ids, (std::vector<int>{1, 2}));
  EXPECT_DOUBLE_EQ(s.weights[0], 0.5);
  EXPECT_DOUBLE_EQ(s.weights[1], 0.5);
}

TEST(Scores, SortedByEpochThenId) {
  const std::vector<BeliefReport> reports = {{5, 0.7, 3}, {2, 0.6, 1}, {1, 0.6, 3}};
  const auto s = score_reports(reports, UniformScorer{});
  EXPECT_EQ(s.agent_ids, (std::vector<int>{2, 1, 5}));
  EXPECT_EQ(s.report_epochs, (std::vector<Epoch>{1, 3, 3}));
}

TEST(Scores, Contracts) {
  const std::vector<BeliefReport> reports = {{1, 0.7, 1}};
  EXPECT_THROW(score_reports(reports, ConstScorer(-1.0)), ScorerContractError);
  const std::vector<BeliefReport> dup = {{1, 0.7, 1}, {1, 0.6, 2}};
  EXPECT_THROW(score_reports(dup, UniformScorer{}), ValidationError);
}

TEST(Scores, QuadraticProxy) {
  const QuadraticOutcomeScorer q(0.75);
  const BeliefReport r{1, 0.6, 1};
  // 1 - [0.75 * 0.16 + 0.25 * 0.36]
  EXPECT_NEAR(q.score(r, {}), 1.0 - (0.75 * 0.16 + 0.25 * 0.36), 1e-15);
  EXPECT_THROW(QuadraticOutcomeScorer(1.5), ValidationError);
}

TEST(Bbr, Examples) {
  const std::vector<BeliefReport> one = {{1, 0.8, 1}};
  const std::vector<BeliefClass> high = {BeliefClass::High};
  EXPECT_DOUBLE_EQ(compute_bbr(score_reports(one, UniformScorer{}), high, 10.0)[0], 10.0);

  const std::vector<BeliefReport> two = {{1, 0.8, 1}, {2, 0.9, 2}};
  const std::vector<BeliefClass> hh = {BeliefClass::High, BeliefClass::High};
  const auto m = compute_bbr(score_reports(two, UniformScorer{}), hh, 9.0);
  EXPECT_DOUBLE_EQ(m[0], 6.0);
  EXPECT_DOUBLE_EQ(m[1], 3.0);
  EXPECT_DOUBLE_EQ(class_sum(m, hh, BeliefClass::Low), 0.0);
}

TEST(Bbr, BudgetPerClass) {
  const std::vector<BeliefReport> reports = {{1, 0.8, 1}, {2, 0.2, 1}, {3, 0.6, 2},
                                             {4, 0.1, 3}, {5, 0.9, 3}};
  std::vector<BeliefClass> cls;
  for (const auto& r : reports) cls.push_back(classify_agent(r.reported_belief));
  const auto s = score_reports(reports, UniformScorer{});
  std::vector<BeliefClass> aligned;
  for (int id : s.agent_ids) aligned.push_back(cls[static_cast<std::size_t>(id - 1)]);
  const auto m = compute_bbr(s, aligned, 7.5);
  EXPECT_NEAR(class_sum(m, aligned, BeliefClass::High), 7.5, 1e-9);
  EXPECT_NEAR(class_sum(m, aligned, BeliefClass::Low), 7.5, 1e-9);
  for (double v : m) EXPECT_GE(v, 0.0);
}

TEST(Bbr, DegenerateClass) {
  const std::vector<BeliefReport> two = {{1, 0.8, 1}, {2, 0.9, 2}};
  const std::vector<BeliefClass> hh = {BeliefClass::High, BeliefClass::High};
  EXPECT_THROW(compute_bbr(score_reports(two, ConstScorer(0.0)), hh, 9.0), DegenerateScoresError);
}

TEST(Bbr, EarlierReportWeaklyLarger) {
  std::vector<BeliefReport> reports;
  for (int k = 1; k <= 6; ++k) reports.push_back({k, 0.7, k});
  const auto s = score_reports(reports, UniformScorer{});
  for (std::size_t k = 1; k < s.size(); ++k) EXPECT_GE(s.weights[k - 1], s.weights[k]);
}

TEST(Bbr, SymmetricUnderIdPermutation) {
  const std::vector<BeliefReport> a = {{1, 0.7, 1}, {2, 0.7, 1}, {3, 0.6, 2}};
  const std::vector<BeliefReport> b = {{2, 0.7, 1}, {1, 0.7, 1}, {3, 0.6, 2}};
  const std::vector<BeliefClass> cls(3, BeliefClass::High);
  const auto ma = compute_bbr(score_reports(a, UniformScorer{}), cls, 12.0);
  const auto mb = compute_bbr(score_reports(b, UniformScorer{}), cls, 12.0);
  EXPECT_EQ(ma, mb);
  EXPECT_DOUBLE_EQ(ma[0], ma[1]);
}

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pprx/equilibrium.hpp"
#include "pprx/errors.hpp"
#include "pprx/payoff.hpp"

using namespace pprx;
using namespace pprx::equilibrium;

namespace {

ProjectConfig cfg(Money h0, Money bc, LowCapVariant v = LowCapVariant::PaperVerbatim) {
  return {h0, bc, 10.0, 3, 10, v};
}

}  // namespace

TEST(CapHigh, Examples) {
  EXPECT_NEAR(contribution_cap_high(0.6, 10, 2, cfg(100, 50)), 9.0, 1e-12);
  EXPECT_NEAR(contribution_cap_high(1.0, 10, 2, cfg(100, 50)), 12.0, 1e-12);
  EXPECT_NEAR(contribution_cap_high(0.5, 10, 2, cfg(100, 100)), 6.0, 1e-12);
  EXPECT_EQ(contribution_cap_high(0.0, 10, 2, cfg(100, 100)), 0.0);
}

TEST(CapHigh, BoundedAndIncreasing) {
  const auto c = cfg(80, 30);
  double prev = -1.0;
  for (int k = 1; k < 1000; ++k) {
    const double b = k / 1000.0;
    const double x = contribution_cap_high(b, 7, 3, c);
    EXPECT_LE(x, 10.0 + 1e-12);
    EXPECT_GT(x, prev);
    prev = x;
  }
}

TEST(CapLow, Variants) {
  EXPECT_NEAR(contribution_cap_low(0.25, 10, 2, cfg(100, 100)), 4.0, 1e-12);
  EXPECT_NEAR(contribution_cap_low(0.25, 10, 2, cfg(100, 100, LowCapVariant::Rederived)), 1.0,
              1e-12);
  for (auto v : {LowCapVariant::PaperVerbatim, LowCapVariant::Rederived}) {
    const double b = 0.3;
    EXPECT_NEAR(contribution_cap_low(b, 10, 0, cfg(100, 40, v)),
                100 * b * 10 / (40 * (1 - b) + 100 * b), 1e-12);
  }
  // Rederived floors at zero.
  EXPECT_EQ(contribution_cap_low(0.05, 1, 5, cfg(100, 100, LowCapVariant::Rederived)), 0.0);
}

TEST(CapLow, RederivedIndifference) {
  const auto c = cfg(100, 100, LowCapVariant::Rederived);
  const double x = contribution_cap_low(0.25, 10, 2, c);
  EXPECT_NEAR(expected_funded_payoff(BeliefClass::Low, 0.25, 10, x, 2), 2.25, 1e-12);
  EXPECT_NEAR(expected_unfunded_payoff(BeliefClass::Low, 0.25, x, 100, 2, c), 2.25, 1e-12);
}

TEST(Threshold, Examples) {
  EXPECT_DOUBLE_EQ(belief_threshold(cfg(100, 100)), 0.5);
  EXPECT_NEAR(belief_threshold(cfg(100, 25)), 1.0 / 3.0, 1e-15);
  EXPECT_LT(belief_threshold(cfg(100, 1e-8)), 1e-4);
  for (double r : {0.01, 0.3, 1.0, 7.0}) {
    const double b = belief_threshold(cfg(100, 100 * r));
    EXPECT_GT(b, 0.0);
    EXPECT_LT(b, 1.0);
  }
}

TEST(TimingHigh, Cases) {
  const auto c = cfg(100, 25);  // b* = 1/3
  EXPECT_EQ(timing_high(0.7, DriftClass::Martingale, c, 2).kind, TimingKind::AtDeadline);
  EXPECT_EQ(timing_high(0.7, DriftClass::Martingale, c, 2).epoch, 10);
  const auto imm = timing_high(0.2, DriftClass::SuperMartingale, c, 3);
  EXPECT_EQ(imm.kind, TimingKind::Immediate);
  EXPECT_EQ(imm.epoch, 3);
  const auto cross = timing_high(0.2, DriftClass::SubMartingale, c, 1);
  EXPECT_EQ(cross.kind, TimingKind::FirstCrossing);
  EXPECT_EQ(cross.direction, CrossingDirection::Upward);
  EXPECT_NEAR(cross.threshold, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(cross.epoch, 10);
  const auto down = timing_high(0.5, DriftClass::SuperMartingale, c, 1);
  EXPECT_EQ(down.kind, TimingKind::FirstCrossing);
  EXPECT_EQ(down.direction, CrossingDirection::Downward);
  EXPECT_TRUE(down.crossed(1.0 / 3.0));
  EXPECT_FALSE(down.crossed(0.34));
  EXPECT_EQ(timing_high(0.5, DriftClass::SubMartingale, c, 4).kind, TimingKind::Immediate);
  EXPECT_THROW(timing_high(0.5, DriftClass::Mixed, c, 1), UnsupportedDriftError);
}

TEST(TimingLow, Cases) {
  const auto c = cfg(100, 10);
  EXPECT_TRUE(low_timing_condition(10, 2, c));
  EXPECT_FALSE(low_timing_condition(2, 2, c));
  EXPECT_FALSE(low_timing_condition(10, 2, cfg(100, 100)));
  EXPECT_FALSE(low_timing_condition(10, 2, cfg(100, 150)));
  EXPECT_EQ(timing_low(10, 2, DriftClass::SuperMartingale, c, 2).rule.kind, TimingKind::Immediate);
  EXPECT_EQ(timing_low(10, 2, DriftClass::Martingale, c, 2).rule.kind, TimingKind::AtDeadline);
  EXPECT_EQ(timing_low(10, 2, DriftClass::SubMartingale, c, 2).rule.kind, TimingKind::AtDeadline);
  const auto fallback = timing_low(2, 2, DriftClass::SuperMartingale, c, 2);
  EXPECT_FALSE(fallback.precondition_met);
  EXPECT_EQ(fallback.rule.kind, TimingKind::AtDeadline);
  EXPECT_THROW(timing_low(10, 2, DriftClass::Mixed, c, 1), UnsupportedDriftError);
}

TEST(Verdict, PersistsOnlyAtDeadline) {
  EXPECT_EQ(race_verdict({TimingKind::AtDeadline, 10}), RaceVerdict::Persists);
  EXPECT_EQ(race_verdict({TimingKind::Immediate, 1}), RaceVerdict::Avoided);
  EXPECT_EQ(race_verdict({TimingKind::FirstCrossing, 10, 0.5}), RaceVerdict::Avoided);
}

TEST(Spe, Populations) {
  const auto c = cfg(100, 25);
  std::vector<Agent> agents = {{1, 60, 0.7, 1, 1, 5}, {2, 60, 0.8, 2, 1, 5}};
  std::vector<DriftClass> mart(2, DriftClass::Martingale);
  for (const auto& s : assemble_spe(agents, mart, c)) {
    EXPECT_EQ(s.verdict, RaceVerdict::Persists);
    EXPECT_EQ(s.belief_report, agents[static_cast<std::size_t>(s.agent_id - 1)].prior_belief);
  }
  const auto c2 = cfg(100, 400);  // b* = 2/3
  std::vector<Agent> high_below = {{1, 60, 0.6, 1, 1, 5}, {2, 60, 0.55, 2, 3, 5}};
  std::vector<DriftClass> sup(2, DriftClass::SuperMartingale);
  const auto spe = assemble_spe(high_below, sup, c2);
  EXPECT_EQ(spe[0].timing.kind, TimingKind::Immediate);
  EXPECT_EQ(spe[1].timing.epoch, 3);
  for (const auto& s : spe) EXPECT_EQ(s.verdict, RaceVerdict::Avoided);

  std::vector<Agent> thin = {{1, 40, 0.7, 1, 1, 5}, {2, 40, 0.8, 2, 1, 5}};
  EXPECT_THROW(assemble_spe(thin, mart, c), ScenarioError);
  std::vector<DriftClass> one(1, DriftClass::Martingale);
  EXPECT_THROW(assemble_spe(agents, one, c), ValidationError);
}

TEST(Spe, SingleRichAgent) {
  const auto c = cfg(100, 25);
  std::vector<Agent> agents = {{1, 150, 1.0, 1, 1, 5}};
  std::vector<DriftClass> d = {DriftClass::SubMartingale};
  const auto s = assemble_spe(agents, d, c).front();
  EXPECT_EQ(s.timing.kind, TimingKind::Immediate);
  EXPECT_NEAR(s.nominal_cap, 155.0, 1e-12);
}

TEST(Spe, TableTotality) {
  // Every (class, drift, b0 vs b*) cell gets exactly one rule.
  const auto c = cfg(100, 400);
  const double bstar = belief_threshold(c);
  for (double b0 : {0.55, bstar, 0.8, 0.2, 0.45}) {
    for (auto d : {DriftClass::Martingale, DriftClass::SuperMartingale, DriftClass::SubMartingale}) {
      Agent a{1, 50, b0, 1, 1, 3};
      const auto s = equilibrium_strategy(a, d, c);
      EXPECT_EQ(s.verdict == RaceVerdict::Persists, s.timing.kind == TimingKind::AtDeadline);
      EXPECT_GE(s.nominal_cap, 0.0);
    }
  }
}

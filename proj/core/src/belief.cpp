#include "pprx/belief.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pprx/errors.hpp"
#include "pprx/numeric.hpp"
#include "overloaded.hpp"

namespace pprx::belief {
namespace {

using detail::overloaded;

double two_point(double mean, double noise, Rng& rng) {
  return rng.uniform() < 0.5 ? mean + noise : mean - noise;
}

// Magnitude below which an analytical expected step counts as zero.
double zero_tolerance(const StepGenerator& gen) {
  return std::visit(
      overloaded{
          [](const SymmetricBernoulli& g) {
            return 1e-12 * std::max(std::abs(g.step_up), std::abs(g.step_down));
          },
          [](const ContributionDrift& g) { return 1e-12 * std::max(1.0, std::abs(g.gain)); },
          [](const DeadlineDrift& g) { return 1e-12 * std::max(1.0, std::abs(g.gain)); },
          [](const CustomStep&) { return 0.0; },
      },
      gen);
}

enum class Sign { Negative, Zero, Positive };

DriftClass combine(const std::vector<Sign>& signs) {
  bool neg = false;
  bool pos = false;
  for (Sign s : signs) {
    neg |= s == Sign::Negative;
    pos |= s == Sign::Positive;
  }
  if (neg && pos) return DriftClass::Mixed;
  if (neg) return DriftClass::SuperMartingale;
  if (pos) return DriftClass::SubMartingale;
  return DriftClass::Martingale;
}

}  // namespace

void validate(const WalkEnv& env) {
  if (!(env.current_total >= 0.0)) throw ValidationError("walk env: C_t must be >= 0");
  if (env.horizon < 1) throw ValidationError("walk env: horizon must be >= 1");
  if (env.remaining_epochs < 0 || env.remaining_epochs > env.horizon) {
    throw ValidationError("walk env: remaining epochs must lie in [0, T_C]");
  }
  if (!(env.provision_point > 0.0)) throw ValidationError("walk env: H0 must be > 0");
}

std::string_view to_string(DriftClass d) {
  switch (d) {
    case DriftClass::Martingale: return "martingale";
    case DriftClass::SuperMartingale: return "supermartingale";
    case DriftClass::SubMartingale: return "submartingale";
    case DriftClass::Mixed: return "mixed";
  }
  return "mixed";
}

std::string_view family_name(const StepGenerator& gen) {
  return std::visit(overloaded{
                        [](const SymmetricBernoulli&) { return std::string_view("symmetric_bernoulli"); },
                        [](const ContributionDrift&) { return std::string_view("contribution_drift"); },
                        [](const DeadlineDrift&) { return std::string_view("deadline_drift"); },
                        [](const CustomStep&) { return std::string_view("custom"); },
                    },
                    gen);
}

void validate(const StepGenerator& gen) {
  std::visit(overloaded{
                 [](const SymmetricBernoulli& g) {
                   if (!(g.p >= 0.0 && g.p <= 1.0)) {
                     throw ValidationError("symmetric_bernoulli: p must lie in [0, 1]");
                   }
                   if (!(g.step_up > 0.0)) {
                     throw ValidationError("symmetric_bernoulli: step_up must be > 0");
                   }
                   if (!(g.step_down < 0.0)) {
                     throw ValidationError("symmetric_bernoulli: step_down must be < 0");
                   }
                 },
                 [](const ContributionDrift& g) {
                   if (!std::isfinite(g.gain) || !(g.noise_scale >= 0.0)) {
                     throw ValidationError("contribution_drift: need finite gain, noise >= 0");
                   }
                 },
                 [](const DeadlineDrift& g) {
                   if (!std::isfinite(g.gain) || !(g.noise_scale >= 0.0)) {
                     throw ValidationError("deadline_drift: need finite gain, noise >= 0");
                   }
                 },
                 [](const CustomStep& g) {
                   if (!g.draw) throw ValidationError("custom step: no draw function");
                 },
             },
             gen);
}

std::optional<double> expected_step(const StepGenerator& gen, Probability belief,
                                    const WalkEnv& env) {
  return std::visit(
      overloaded{
          [](const SymmetricBernoulli& g) -> std::optional<double> {
            return g.p * g.step_up + (1.0 - g.p) * g.step_down;
          },
          [&](const ContributionDrift& g) -> std::optional<double> {
            return g.gain * (env.current_total / env.provision_point - belief);
          },
          [&](const DeadlineDrift& g) -> std::optional<double> {
            const double elapsed =
                1.0 - static_cast<double>(env.remaining_epochs) / env.horizon;
            return -g.gain * elapsed;
          },
          [](const CustomStep&) -> std::optional<double> { return std::nullopt; },
      },
      gen);
}

double draw_step(const StepGenerator& gen, Probability belief, const WalkEnv& env,
                 Rng& rng) {
  return std::visit(overloaded{
                        [&](const SymmetricBernoulli& g) {
                          return rng.uniform() < g.p ? g.step_up : g.step_down;
                        },
                        [&](const ContributionDrift& g) {
                          return two_point(*expected_step(gen, belief, env), g.noise_scale, rng);
                        },
                        [&](const DeadlineDrift& g) {
                          return two_point(*expected_step(gen, belief, env), g.noise_scale, rng);
                        },
                        [&](const CustomStep& g) { return g.draw(belief, env, rng); },
                    },
                    gen);
}

DriftClass classify_generator(const StepGenerator& gen, std::span<const WalkProbe> probes,
                              const ClassifyOptions& options) {
  validate(gen);
  if (probes.empty()) throw ValidationError("classify_generator: empty probe set");
  std::vector<Sign> signs;
  signs.reserve(probes.size());

  if (!std::holds_alternative<CustomStep>(gen)) {
    const double tol = zero_tolerance(gen);
    for (const auto& probe : probes) {
      const double mu = *expected_step(gen, probe.belief, probe.env);
      signs.push_back(mu > tol ? Sign::Positive : (mu < -tol ? Sign::Negative : Sign::Zero));
    }
    return combine(signs);
  }

  Rng rng(options.seed);
  for (const auto& probe : probes) {
    RunningStats stats;
    for (std::size_t k = 0; k < options.samples_per_probe; ++k) {
      stats.add(draw_step(gen, probe.belief, probe.env, rng));
    }
    const double half_width = options.z_critical * stats.standard_error();
    if (stats.mean() - half_width > 0.0) {
      signs.push_back(Sign::Positive);
    } else if (stats.mean() + half_width < 0.0) {
      signs.push_back(Sign::Negative);
    } else {
      signs.push_back(Sign::Zero);
    }
  }
  return combine(signs);
}

std::vector<WalkProbe> default_probes(const ProjectConfig& cfg) {
  std::vector<WalkProbe> probes;
  const int horizon = cfg.contribution_deadline;
  for (int q = 0; q <= 4; ++q) {
    for (int remaining = 0; remaining <= horizon; ++remaining) {
      for (int k = 0; k < 10; ++k) {
        WalkEnv env{cfg.provision_point * q / 4.0, remaining, horizon, cfg.provision_point};
        probes.push_back({env, 0.05 + 0.1 * k});
      }
    }
  }
  return probes;
}

BeliefWalk::BeliefWalk(int agent_id, Probability prior, StepGenerator generator,
                       std::uint64_t seed, Epoch start_epoch)
    : agent_id_(agent_id),
      start_epoch_(start_epoch),
      generator_(std::move(generator)),
      rng_(seed) {
  if (!(prior >= 0.0 && prior <= 1.0)) {
    throw ValidationError("belief walk: prior must lie in [0, 1]");
  }
  validate(generator_);
  trajectory_.push_back(prior);
  touched_boundary_ = prior == 0.0 || prior == 1.0;
}

Probability BeliefWalk::belief_at(Epoch epoch) const {
  if (epoch < start_epoch_ || epoch > current_epoch()) {
    throw ValidationError("belief walk: epoch outside the sampled trajectory");
  }
  return trajectory_[static_cast<std::size_t>(epoch - start_epoch_)];
}

Probability BeliefWalk::step(const WalkEnv& env) {
  const Probability prev = trajectory_.back();
  const double raw = prev + draw_step(generator_, prev, env, rng_);
  const Probability next = std::clamp(raw, 0.0, 1.0);
  if (raw != next || next == 0.0 || next == 1.0) touched_boundary_ = true;
  trajectory_.push_back(next);
  return next;
}

std::vector<Probability> sample_path(BeliefWalk& walk, std::span<const WalkEnv> env_stream,
                                     int horizon) {
  if (horizon < 0) throw ValidationError("sample_path: negative horizon");
  if (env_stream.empty()) throw ValidationError("sample_path: empty env stream");
  for (const auto& env : env_stream) validate(env);
  if (horizon > env_stream.front().horizon) {
    throw ValidationError("sample_path: horizon exceeds T_C");
  }
  if (env_stream.size() != 1 && env_stream.size() < static_cast<std::size_t>(horizon)) {
    throw ValidationError("sample_path: env stream shorter than horizon");
  }
  std::vector<Probability> path;
  path.reserve(static_cast<std::size_t>(horizon));
  for (int k = 0; k < horizon; ++k) {
    const auto& env = env_stream.size() == 1 ? env_stream.front()
                                             : env_stream[static_cast<std::size_t>(k)];
    path.push_back(walk.step(env));
  }
  return path;
}

}  // namespace pprx::belief

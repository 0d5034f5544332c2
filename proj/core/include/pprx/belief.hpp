#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pprx/model.hpp"
#include "pprx/rng.hpp"

namespace pprx::belief {

// Information an agent sees when its belief moves: the running total at the
// start of the epoch and the time left in the contribution phase.
struct WalkEnv {
  Money current_total = 0.0;
  int remaining_epochs = 0;
  int horizon = 1;  // T_C
  Money provision_point = 1.0;
};

void validate(const WalkEnv& env);

// X = step_up with probability p, step_down otherwise.
struct SymmetricBernoulli {
  double p = 0.5;
  double step_up = 0.01;
  double step_down = -0.01;
};

// Two-point step around a mean that pulls the belief toward C_t / H0:
// X = mu +/- noise_scale with equal probability, mu = gain * (C_t/H0 - b).
struct ContributionDrift {
  double gain = 0.0;
  double noise_scale = 0.0;
};

// Two-point step whose mean grows with elapsed time:
// mu = -gain * (1 - remaining / T_C).
struct DeadlineDrift {
  double gain = 0.0;
  double noise_scale = 0.0;
};

// Arbitrary step law. Its conditional mean is estimated by sampling.
struct CustomStep {
  std::string name;
  std::function<double(Probability belief, const WalkEnv& env, Rng& rng)> draw;
};

using StepGenerator =
    std::variant<SymmetricBernoulli, ContributionDrift, DeadlineDrift, CustomStep>;

enum class DriftClass { Martingale, SuperMartingale, SubMartingale, Mixed };

std::string_view to_string(DriftClass d);
std::string_view family_name(const StepGenerator& gen);

void validate(const StepGenerator& gen);

// Analytical E[X | belief, env]; nullopt for CustomStep.
std::optional<double> expected_step(const StepGenerator& gen, Probability belief,
                                    const WalkEnv& env);

// One step draw. Built-in families consume exactly one uniform per call so
// that streams stay aligned across alternative histories.
double draw_step(const StepGenerator& gen, Probability belief, const WalkEnv& env,
                 Rng& rng);

// A point at which the drift sign is evaluated.
struct WalkProbe {
  WalkEnv env;
  Probability belief = 0.5;
};

struct ClassifyOptions {
  std::size_t samples_per_probe = 100'000;
  double z_critical = 3.2905267314919255;  // two-sided, alpha = 1e-3
  std::uint64_t seed = 0x5eed'c1a5'51f7ULL;
};

DriftClass classify_generator(const StepGenerator& gen,
                              std::span<const WalkProbe> probes,
                              const ClassifyOptions& options = {});

// Probe grid over C_t in {0, H0/4, ..., H0}, every remaining-epoch count and
// interior beliefs 0.05, 0.15, ..., 0.95.
std::vector<WalkProbe> default_probes(const ProjectConfig& cfg);

// Belief random walk of a single agent. trajectory()[k] is the belief k
// epochs after arrival; the arrival value equals the prior.
class BeliefWalk {
 public:
  BeliefWalk(int agent_id, Probability prior, StepGenerator generator,
             std::uint64_t seed, Epoch start_epoch = 1);

  int agent_id() const { return agent_id_; }
  Probability prior() const { return trajectory_.front(); }
  Probability current() const { return trajectory_.back(); }
  Epoch start_epoch() const { return start_epoch_; }
  Epoch current_epoch() const {
    return start_epoch_ + static_cast<Epoch>(trajectory_.size()) - 1;
  }
  const std::vector<Probability>& trajectory() const { return trajectory_; }
  const StepGenerator& generator() const { return generator_; }

  // Belief held at an absolute epoch in [start_epoch, current_epoch].
  Probability belief_at(Epoch epoch) const;

  // True once a step was clamped or the walk sat on 0 or 1.
  bool touched_boundary() const { return touched_boundary_; }

  // clamp(b + X, 0, 1); appends to the trajectory.
  Probability step(const WalkEnv& env);

 private:
  int agent_id_;
  Epoch start_epoch_;
  StepGenerator generator_;
  Rng rng_;
  std::vector<Probability> trajectory_;
  bool touched_boundary_ = false;
};

// Advances the walk `horizon` times and returns the new beliefs. env_stream
// holds either one environment (held fixed) or at least `horizon` entries.
std::vector<Probability> sample_path(BeliefWalk& walk,
                                     std::span<const WalkEnv> env_stream,
                                     int horizon);

}  // namespace pprx::belief

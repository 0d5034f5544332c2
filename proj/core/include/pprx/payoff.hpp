#pragma once

#include "pprx/model.hpp"

namespace pprx {

/// Realized payoff of one agent once the outcome is known.
///
/// High: funded -> theta - x + m, unfunded -> (x / C0) * B_C.
/// Low:  funded -> theta - x,     unfunded -> (x / C0) * B_C + m.
///
/// The Low agent's m is paid on the unfunded branch whenever it reported in
/// the belief phase, including when x == 0. `funded` must agree with
/// `total >= H0`; the function checks this instead of recomputing it.
Money realized_payoff(BeliefClass cls, Money theta, Money x, Money m,
                      Money total, bool funded, const ProjectConfig& cfg,
                      bool reported_belief = true);

/// b * (theta - x + m) for High, b * (theta - x) for Low.
Money expected_funded_payoff(BeliefClass cls, Probability b, Money theta,
                             Money x, Money m);

/// (1 - b) * (x / C0) * B_C for High, (1 - b) * ((x / C0) * B_C + m) for Low.
/// The equilibrium analysis evaluates this at C0 = H0.
Money expected_unfunded_payoff(BeliefClass cls, Probability b, Money x,
                               Money total, Money m, const ProjectConfig& cfg);

}  // namespace pprx

#include "pprx/payoff.hpp"

#include <cmath>

#include "pprx/errors.hpp"

namespace pprx {
namespace {

void check_probability(Probability b) {
  if (!(b >= 0.0 && b <= 1.0)) throw ValidationError("belief must lie in [0, 1]");
}

void check_amount(Money v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ValidationError(std::string(what) + " must be finite and >= 0");
  }
}

Money refund_bonus(Money x, Money total, const ProjectConfig& cfg) {
  if (x == 0.0) return 0.0;
  if (total == 0.0) throw ArithmeticError("refund share x / C0 with C0 = 0 and x > 0");
  return x / total * cfg.contribution_budget;
}

}  // namespace

Money realized_payoff(BeliefClass cls, Money theta, Money x, Money m, Money total,
                      bool funded, const ProjectConfig& cfg, bool reported_belief) {
  check_amount(theta, "theta");
  check_amount(x, "contribution");
  check_amount(m, "bbr reward");
  check_amount(total, "total contribution");
  if (funded != (total >= cfg.provision_point)) {
    throw ContractError("funded flag disagrees with C0 >= H0");
  }
  if (x > 0.0 && total > 0.0 && x > total * (1.0 + 1e-12)) {
    throw ContractError("contribution exceeds the total contribution");
  }
  if (funded) {
    return cls == BeliefClass::High ? theta - x + m : theta - x;
  }
  const Money bonus = refund_bonus(x, total, cfg);
  if (cls == BeliefClass::High) return bonus;
  return reported_belief ? bonus + m : bonus;
}

Money expected_funded_payoff(BeliefClass cls, Probability b, Money theta, Money x,
                             Money m) {
  check_probability(b);
  return cls == BeliefClass::High ? b * (theta - x + m) : b * (theta - x);
}

Money expected_unfunded_payoff(BeliefClass cls, Probability b, Money x, Money total,
                               Money m, const ProjectConfig& cfg) {
  check_probability(b);
  const Money bonus = refund_bonus(x, total, cfg);
  return cls == BeliefClass::High ? (1.0 - b) * bonus : (1.0 - b) * (bonus + m);
}

}  // namespace pprx

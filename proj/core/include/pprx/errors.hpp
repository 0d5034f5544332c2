#pragma once

#include <stdexcept>
#include <string>

namespace pprx {

// Input outside a documented domain (probability > 1, negative budget, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A scenario that breaks a model assumption, e.g. total valuation <= H0.
class ScenarioError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The caller broke a precondition the callee asserts rather than recomputes.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class PolicyContractError : public ContractError {
 public:
  using ContractError::ContractError;
};

class ScorerContractError : public ContractError {
 public:
  using ContractError::ContractError;
};

class ArithmeticError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DegenerateScoresError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a drift class outside {Martingale, Super, Sub} reaches a rule
// that is only defined for the pure cases.
class UnsupportedDriftError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pprx

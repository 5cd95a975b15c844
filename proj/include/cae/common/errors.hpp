#pragma once

#include <stdexcept>
#include <string>

namespace cae {

// Caller violated an operation's precondition (shapes, ranges, sizes).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid or inconsistent configuration / dataset layout.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation requested on an object that is not ready (unloaded model, no index).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Adapter lacks a capability the caller asked for (e.g. gradients).
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::string last_good_checkpoint)
      : std::runtime_error(what), last_good_checkpoint_(std::move(last_good_checkpoint)) {}

  const std::string& last_good_checkpoint() const noexcept { return last_good_checkpoint_; }

 private:
  std::string last_good_checkpoint_;
};

}  // namespace cae

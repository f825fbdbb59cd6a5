#pragma once

#include <stdexcept>
#include <string>

namespace htsim {

// Malformed inputs: wrong lengths, out-of-range values, unknown references.
class StructuralError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// A caller broke an operation's precondition during a simulation
// (e.g. the line went busy but no plaintext was supplied).
class ContractError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

// Scenario configuration rejected; the message names the offending field.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace htsim

#pragma once

#include <stdexcept>
#include <string>

namespace gda {

// Error taxonomy. Shape/contract violations are programming errors; the
// remaining types map to CLI exit codes (config=2, io/parse=3, numeric=4).

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { train, eval };

}  // namespace gda

#pragma once

#include <stdexcept>
#include <string>

namespace gridood {

// Error taxonomy shared across modules. The CLI maps config/validation
// errors to exit code 2 and runtime failures to exit code 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct UsageError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace gridood

#pragma once

#include <stdexcept>
#include <string>

namespace gapcomp {

// Error taxonomy, mapped to CLI exit codes:
//   ConfigError  -> 1 (usage, bad parameters, malformed config)
//   DataError    -> 2 (file format, integrity, non-finite data, I/O)
//   NumericError -> 3 (degenerate vectors, training divergence)
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gapcomp

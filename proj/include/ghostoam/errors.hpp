#pragma once

#include <stdexcept>
#include <string>

namespace ghostoam {

/// Raised when a numerical self-check (PSD, reconstruction, budget) fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written, or has the wrong layout.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ghostoam

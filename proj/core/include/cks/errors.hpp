#pragma once

#include <stdexcept>
#include <string>

namespace cks {

/// Input rejected by a constructor or precondition check.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A truncated series could not certify its neglected tail. Raise n_max.
class TailNotCertified : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A log-space quantity left the representable double range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Cauchy/DFT extraction saw energy above the declared degree.
class DegreeOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// a e^2 ||i_{p,q}||_HS^2 L >= 1: the reconstruction series is not summable.
class NotAdmissible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cks

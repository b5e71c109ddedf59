#pragma once

#include <stdexcept>
#include <string>

namespace bullwhip {

// Invalid model parameters (|rho| >= 1, sigma_D <= 0, unnormalized pmf, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Formula evaluated outside its domain, e.g. rho on the unit circle.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A forecast or simulation step asked for periods that are not in the series.
struct HistoryError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Inconsistent run setup: mismatched moments, too-short series, bad windows.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bullwhip

#ifndef SGF_ERRORS_HPP
#define SGF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sgf {

// Argument outside the mathematical domain of an operation (strip violations,
// poles, invalid parameters with a mathematical meaning).
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A numerical procedure failed to reach its accuracy target.
struct NumericError : std::runtime_error {
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual estimate " +
                           std::to_string(residual) + ")"),
        residual_estimate(residual) {}
  double residual_estimate;
};

// User-facing configuration problem (bad spec fields, unusable settings).
struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A Monte Carlo routine could not produce a sample within its budget.
struct SamplingError : std::runtime_error {
  explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

// Resource limits (node budgets and the like).
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sgf

#endif

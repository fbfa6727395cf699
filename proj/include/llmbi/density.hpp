#pragma once

#include <span>
#include <string>
#include <vector>

namespace llmbi {

/// A log-density over unconstrained coordinates, as consumed by the
/// samplers. Implementations must be safe to call concurrently.
class DifferentiableDensity {
 public:
  virtual ~DifferentiableDensity() = default;

  virtual std::size_t dimension() const = 0;
  virtual const std::vector<std::string>& parameter_names() const = 0;

  /// Finite or -inf, never NaN.
  virtual double log_density(std::span<const double> z) const = 0;

  /// Writes the gradient into `grad` (same length as `z`) and returns the
  /// log-density.
  virtual double log_density_gradient(std::span<const double> z, std::span<double> grad) const = 0;

  /// Maps unconstrained coordinates to parameter values, in
  /// `parameter_names()` order.
  virtual std::vector<double> constrain(std::span<const double> z) const = 0;
};

}  // namespace llmbi

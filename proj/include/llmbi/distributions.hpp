#pragma once

#include <string_view>
#include <variant>

#include "llmbi/rng.hpp"

namespace llmbi {

struct NormalDist {
  double mu;
  double sigma;  // standard deviation
};

/// Supported on [0, inf) with density sqrt(2/pi)/sigma * exp(-x^2 / (2 sigma^2)).
struct HalfNormalDist {
  double sigma;
};

struct UniformDist {
  double lower;
  double upper;
};

/// Rate parameterization; mean = 1/lam.
struct ExponentialDist {
  double lam;
};

using PriorDistribution = std::variant<NormalDist, HalfNormalDist, UniformDist, ExponentialDist>;

std::string_view distribution_name(const PriorDistribution& dist);

/// -inf outside the support.
double log_pdf(const PriorDistribution& dist, double x);

/// Throws Error(OutsideSupport) unless x is strictly inside the support.
double dlogpdf_dx(const PriorDistribution& dist, double x);

/// Same formula as dlogpdf_dx, continued onto closed support boundaries
/// without checking; for callers that already guarantee x is in support.
double dlogpdf_dx_unchecked(const PriorDistribution& dist, double x);

double sample(const PriorDistribution& dist, Rng& rng);

/// True for distributions whose support is a subset of [0, inf).
bool has_positive_support(const PriorDistribution& dist);

bool in_support(const PriorDistribution& dist, double x);

/// Bijection from the real line onto the interior of a prior's support.
class Transform {
 public:
  enum class Kind { Identity, Log, Logit };

  static Transform identity() { return Transform(Kind::Identity, 0.0, 1.0); }
  static Transform log() { return Transform(Kind::Log, 0.0, 1.0); }
  static Transform logit(double lower, double upper) { return Transform(Kind::Logit, lower, upper); }

  Kind kind() const { return kind_; }

  double forward(double z) const;
  double inverse(double x) const;
  double log_jacobian(double z) const;
  /// d forward / dz
  double dforward(double z) const;
  /// d log_jacobian / dz
  double dlog_jacobian(double z) const;

 private:
  Transform(Kind kind, double lower, double upper) : kind_(kind), lower_(lower), upper_(upper) {}

  Kind kind_;
  double lower_;
  double upper_;
};

Transform transform_for(const PriorDistribution& dist);

/// Normal log-density with standard deviation `sigma`.
double normal_logpdf(double y, double mu, double sigma);

/// Stable log(1 / (1 + exp(-z))).
double log_logistic(double z);
double logistic(double z);

}  // namespace llmbi

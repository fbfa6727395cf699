#include "llmbi/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "llmbi/error.hpp"
#include "llmbi/numfmt.hpp"

namespace llmbi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
const double kHalfLogTwoOverPi = 0.5 * std::log(2.0 / std::numbers::pi);

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

std::string_view distribution_name(const PriorDistribution& dist) {
  return std::visit(overloaded{
                        [](const NormalDist&) { return std::string_view("Normal"); },
                        [](const HalfNormalDist&) { return std::string_view("HalfNormal"); },
                        [](const UniformDist&) { return std::string_view("Uniform"); },
                        [](const ExponentialDist&) { return std::string_view("Exponential"); },
                    },
                    dist);
}

double normal_logpdf(double y, double mu, double sigma) {
  const double r = (y - mu) / sigma;
  return -kHalfLog2Pi - std::log(sigma) - 0.5 * r * r;
}

double log_pdf(const PriorDistribution& dist, double x) {
  return std::visit(
      overloaded{
          [x](const NormalDist& d) { return normal_logpdf(x, d.mu, d.sigma); },
          [x](const HalfNormalDist& d) {
            if (x < 0.0) return kNegInf;
            const double r = x / d.sigma;
            return kHalfLogTwoOverPi - std::log(d.sigma) - 0.5 * r * r;
          },
          [x](const UniformDist& d) {
            if (x < d.lower || x > d.upper) return kNegInf;
            return -std::log(d.upper - d.lower);
          },
          [x](const ExponentialDist& d) {
            if (x < 0.0) return kNegInf;
            return std::log(d.lam) - d.lam * x;
          },
      },
      dist);
}

bool in_support(const PriorDistribution& dist, double x) {
  return std::visit(overloaded{
                        [x](const NormalDist&) { return std::isfinite(x); },
                        [x](const HalfNormalDist&) { return x >= 0.0 && std::isfinite(x); },
                        [x](const UniformDist& d) { return x >= d.lower && x <= d.upper; },
                        [x](const ExponentialDist&) { return x >= 0.0 && std::isfinite(x); },
                    },
                    dist);
}

bool has_positive_support(const PriorDistribution& dist) {
  return std::visit(overloaded{
                        [](const NormalDist&) { return false; },
                        [](const HalfNormalDist&) { return true; },
                        [](const UniformDist& d) { return d.lower >= 0.0; },
                        [](const ExponentialDist&) { return true; },
                    },
                    dist);
}

double dlogpdf_dx(const PriorDistribution& dist, double x) {
  auto outside = [&]() -> double {
    throw Error(ErrorCode::OutsideSupport, std::string(distribution_name(dist)) +
                                               " derivative requested at x=" + format_double(x) +
                                               ", which is not strictly inside the support");
  };
  return std::visit(overloaded{
                        [x](const NormalDist& d) { return -(x - d.mu) / (d.sigma * d.sigma); },
                        [&](const HalfNormalDist& d) {
                          if (!(x > 0.0)) return outside();
                          return -x / (d.sigma * d.sigma);
                        },
                        [&](const UniformDist& d) {
                          if (!(x > d.lower && x < d.upper)) return outside();
                          return 0.0;
                        },
                        [&](const ExponentialDist& d) {
                          if (!(x > 0.0)) return outside();
                          return -d.lam;
                        },
                    },
                    dist);
}

double dlogpdf_dx_unchecked(const PriorDistribution& dist, double x) {
  return std::visit(overloaded{
                        [x](const NormalDist& d) { return -(x - d.mu) / (d.sigma * d.sigma); },
                        [x](const HalfNormalDist& d) { return -x / (d.sigma * d.sigma); },
                        [](const UniformDist&) { return 0.0; },
                        [](const ExponentialDist& d) { return -d.lam; },
                    },
                    dist);
}

double sample(const PriorDistribution& dist, Rng& rng) {
  return std::visit(overloaded{
                        [&](const NormalDist& d) { return rng.normal(d.mu, d.sigma); },
                        [&](const HalfNormalDist& d) { return std::fabs(rng.normal(0.0, d.sigma)); },
                        [&](const UniformDist& d) { return rng.uniform(d.lower, d.upper); },
                        [&](const ExponentialDist& d) { return rng.exponential() / d.lam; },
                    },
                    dist);
}

double log_logistic(double z) {
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Transform::forward(double z) const {
  switch (kind_) {
    case Kind::Identity: return z;
    case Kind::Log: return std::exp(z);
    case Kind::Logit: return lower_ + (upper_ - lower_) * logistic(z);
  }
  return z;
}

double Transform::inverse(double x) const {
  switch (kind_) {
    case Kind::Identity: return x;
    case Kind::Log: return std::log(x);
    case Kind::Logit: {
      const double p = (x - lower_) / (upper_ - lower_);
      return std::log(p) - std::log1p(-p);
    }
  }
  return x;
}

double Transform::log_jacobian(double z) const {
  switch (kind_) {
    case Kind::Identity: return 0.0;
    case Kind::Log: return z;
    case Kind::Logit: return std::log(upper_ - lower_) + log_logistic(z) + log_logistic(-z);
  }
  return 0.0;
}

double Transform::dforward(double z) const {
  switch (kind_) {
    case Kind::Identity: return 1.0;
    case Kind::Log: return std::exp(z);
    case Kind::Logit: return (upper_ - lower_) * std::exp(log_logistic(z) + log_logistic(-z));
  }
  return 1.0;
}

double Transform::dlog_jacobian(double z) const {
  switch (kind_) {
    case Kind::Identity: return 0.0;
    case Kind::Log: return 1.0;
    // 1 - 2 logistic(z), written to stay accurate in both tails
    case Kind::Logit: return logistic(-z) - logistic(z);
  }
  return 0.0;
}

Transform transform_for(const PriorDistribution& dist) {
  return std::visit(overloaded{
                        [](const NormalDist&) { return Transform::identity(); },
                        [](const HalfNormalDist&) { return Transform::log(); },
                        [](const UniformDist& d) { return Transform::logit(d.lower, d.upper); },
                        [](const ExponentialDist&) { return Transform::log(); },
                    },
                    dist);
}

}  // namespace llmbi

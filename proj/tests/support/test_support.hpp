#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "llmbi/density.hpp"
#include "llmbi/error.hpp"
#include "llmbi/formula.hpp"

namespace llmbi::testing {

inline std::filesystem::path source_dir() { return LLMBI_SOURCE_DIR; }
inline std::filesystem::path fixtures_dir() { return source_dir() / "fixtures"; }
inline std::filesystem::path experiments_dir() { return source_dir() / "experiments"; }

/// Runs `fn` and returns the code of the llmbi::Error it throws, or nullopt.
template <class Fn>
std::optional<ErrorCode> error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Random formula trees over the given variable names. Literals are
/// non-negative so the canonical printer round-trips exactly.
class AstGenerator {
 public:
  AstGenerator(std::uint64_t seed, std::vector<std::string> names) : rng_(seed), names_(std::move(names)) {}

  formula::Ast operator()(int max_depth) {
    std::uniform_int_distribution<int> pick(0, max_depth <= 0 ? 1 : 5);
    const int choice = pick(rng_);
    if (choice == 0) {
      std::uniform_int_distribution<int> digits(0, 4);
      std::uniform_real_distribution<double> u(0.0, 100.0);
      const int kind = digits(rng_);
      if (kind == 0) return formula::number(std::floor(u(rng_)));
      if (kind == 1) return formula::number(u(rng_) * 1e-7);
      return formula::number(u(rng_));
    }
    if (choice == 1) {
      std::uniform_int_distribution<std::size_t> n(0, names_.size() - 1);
      return formula::variable(names_[n(rng_)]);
    }
    if (choice == 2) return formula::negate((*this)(max_depth - 1));
    static constexpr formula::BinaryOp ops[] = {formula::BinaryOp::Add, formula::BinaryOp::Sub, formula::BinaryOp::Mul,
                                                formula::BinaryOp::Div};
    std::uniform_int_distribution<int> op(0, 3);
    auto lhs = (*this)(max_depth - 1);
    auto rhs = (*this)(max_depth - 1);
    return formula::binary(ops[op(rng_)], lhs, rhs);
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> names_;
};

/// Independent Gaussian target with per-coordinate mean and sd, identity
/// constraint.
class GaussianTarget final : public DifferentiableDensity {
 public:
  GaussianTarget(std::vector<double> mean, std::vector<double> sd) : mean_(std::move(mean)), sd_(std::move(sd)) {
    for (std::size_t i = 0; i < mean_.size(); ++i) names_.push_back("x" + std::to_string(i));
  }
  static GaussianTarget standard(std::size_t dim) { return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}; }

  std::size_t dimension() const override { return mean_.size(); }
  const std::vector<std::string>& parameter_names() const override { return names_; }
  double log_density(std::span<const double> z) const override {
    double lp = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double u = (z[i] - mean_[i]) / sd_[i];
      lp -= 0.5 * u * u;
    }
    return lp;
  }
  double log_density_gradient(std::span<const double> z, std::span<double> grad) const override {
    for (std::size_t i = 0; i < z.size(); ++i) grad[i] = -(z[i] - mean_[i]) / (sd_[i] * sd_[i]);
    return log_density(z);
  }
  std::vector<double> constrain(std::span<const double> z) const override { return {z.begin(), z.end()}; }

 private:
  std::vector<double> mean_, sd_;
  std::vector<std::string> names_;
};

/// Central difference with step h.
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace llmbi::testing

#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "llmbi/dataset.hpp"
#include "llmbi/density.hpp"
#include "llmbi/distributions.hpp"
#include "llmbi/formula.hpp"
#include "llmbi/spec_schema.hpp"

namespace llmbi {

struct BuildOptions {
  std::string response = "y";
  /// Parameters held at a known constrained value instead of sampled.
  /// They drop out of the parameter vector and contribute no prior term.
  std::map<std::string, double> fixed;
  /// Test hook: permits a zero-row dataset (prior-only density).
  bool allow_empty_data = false;
};

/// Unconstrained-space log posterior of a Normal-likelihood model:
///
///   sum_i [log p_i(x_i) + log|J_i(z_i)|] + sum_r log N(y_r | mu_r, sigma)
///
/// with x_i = forward_i(z_i) and mu_r the mean formula evaluated with the
/// row's data columns bound. Parameters are ordered as declared in the model.
class PosteriorFn final : public DifferentiableDensity {
 public:
  std::size_t dimension() const override { return names_.size(); }
  const std::vector<std::string>& parameter_names() const override { return names_; }

  double log_density(std::span<const double> z) const override;
  double log_density_gradient(std::span<const double> z, std::span<double> grad) const override;
  std::vector<double> constrain(std::span<const double> z) const override;

  std::vector<std::pair<std::string, double>> constrain_named(std::span<const double> z) const;
  std::vector<double> unconstrain(std::span<const double> values) const;

  const std::vector<PriorDistribution>& priors() const { return priors_; }
  const std::vector<Transform>& transforms() const { return transforms_; }
  std::size_t n_rows() const { return n_rows_; }

 private:
  friend PosteriorFn build_posterior(const ValidatedModel&, const Dataset&, const BuildOptions&);

  PosteriorFn() = default;
  double evaluate(std::span<const double> z, double* grad) const;

  std::vector<std::string> names_;
  std::vector<PriorDistribution> priors_;
  std::vector<Transform> transforms_;

  // Formula slots: sampled parameters, then fixed parameters, then columns.
  std::size_t n_slots_ = 0;
  std::vector<double> fixed_values_;
  formula::CompiledFormula mean_;
  // (sampled parameter index, compiled d mean / d parameter)
  std::vector<std::pair<std::size_t, formula::CompiledFormula>> mean_partials_;

  // Noise: sampled index, or the fixed value when not sampled.
  std::ptrdiff_t noise_index_ = -1;
  double noise_fixed_ = 0.0;

  std::size_t n_rows_ = 0;
  std::size_t n_data_slots_ = 0;
  std::vector<double> data_;  // row-major, n_rows_ x n_data_slots_
  std::vector<double> response_;
};

/// Requires `model` to have been validated against `data`'s column names.
/// Throws Error(MissingResponseColumn), Error(InvalidDataset) for a
/// zero-row dataset, Error(UnresolvedVariable) for a fixed name that is not
/// a prior.
PosteriorFn build_posterior(const ValidatedModel& model, const Dataset& data,
                            const BuildOptions& options = {});

}  // namespace llmbi

#include "llmbi/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "llmbi/error.hpp"

namespace llmbi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

PosteriorFn build_posterior(const ValidatedModel& model, const Dataset& data,
                            const BuildOptions& options) {
  const ModelSpec& spec = model.spec;
  for (const auto& [name, value] : options.fixed) {
    if (!spec.find_prior(name)) {
      throw Error(ErrorCode::UnresolvedVariable, "fixed parameter '" + name + "' has no prior");
    }
  }
  if (!data.has_column(options.response)) {
    throw Error(ErrorCode::MissingResponseColumn, "dataset has no response column '" + options.response + "'");
  }
  if (data.n_rows() == 0 && !options.allow_empty_data) {
    throw Error(ErrorCode::InvalidDataset, "dataset has no rows");
  }

  PosteriorFn pf;
  std::vector<std::string> slot_names;
  std::vector<std::string> fixed_names;
  for (const auto& [name, prior] : spec.priors) {
    if (options.fixed.count(name)) {
      fixed_names.push_back(name);
      continue;
    }
    pf.names_.push_back(name);
    pf.priors_.push_back(prior.to_distribution());
    pf.transforms_.push_back(transform_for(pf.priors_.back()));
  }
  slot_names = pf.names_;
  for (const auto& name : fixed_names) {
    slot_names.push_back(name);
    pf.fixed_values_.push_back(options.fixed.at(name));
  }

  std::vector<std::string> columns;
  for (const auto& [name, role] : model.variables) {
    if (role != VariableRole::Column) continue;
    if (!data.has_column(name)) {
      throw Error(ErrorCode::UnresolvedVariable, "formula column '" + name + "' is not in the dataset");
    }
    columns.push_back(name);
    slot_names.push_back(name);
  }
  pf.n_slots_ = slot_names.size();

  pf.mean_ = formula::CompiledFormula(model.mean, slot_names);
  const auto vars = formula::free_vars(model.mean);
  for (std::size_t i = 0; i < pf.names_.size(); ++i) {
    if (!vars.count(pf.names_[i])) continue;
    pf.mean_partials_.emplace_back(
        i, formula::CompiledFormula(formula::differentiate(model.mean, pf.names_[i]), slot_names));
  }

  const std::string& noise = spec.likelihood.noise_param;
  if (auto it = options.fixed.find(noise); it != options.fixed.end()) {
    pf.noise_fixed_ = it->second;
  } else {
    for (std::size_t i = 0; i < pf.names_.size(); ++i) {
      if (pf.names_[i] == noise) pf.noise_index_ = static_cast<std::ptrdiff_t>(i);
    }
    if (pf.noise_index_ < 0) {
      throw Error(ErrorCode::UnresolvedVariable, "noise parameter '" + noise + "' has no prior");
    }
  }

  pf.n_rows_ = data.n_rows();
  pf.n_data_slots_ = columns.size();
  pf.data_.resize(pf.n_rows_ * pf.n_data_slots_);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto col = data.column(columns[c]);
    for (std::size_t r = 0; r < pf.n_rows_; ++r) pf.data_[r * pf.n_data_slots_ + c] = col[r];
  }
  const auto y = data.column(options.response);
  pf.response_.assign(y.begin(), y.end());
  return pf;
}

double PosteriorFn::evaluate(std::span<const double> z, double* grad) const {
  const std::size_t k = names_.size();
  if (z.size() != k) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(k) + " coordinates, got " + std::to_string(z.size()));
  }
  if (grad) std::fill(grad, grad + k, 0.0);

  std::vector<double> slots(n_slots_);
  std::vector<double> dx(k);
  double lp = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = transforms_[i].forward(z[i]);
    const double prior_lp = log_pdf(priors_[i], x);
    if (prior_lp == kNegInf || std::isnan(x)) return kNegInf;
    lp += prior_lp + transforms_[i].log_jacobian(z[i]);
    slots[i] = x;
    if (grad) {
      dx[i] = transforms_[i].dforward(z[i]);
      grad[i] = dlogpdf_dx_unchecked(priors_[i], x) * dx[i] + transforms_[i].dlog_jacobian(z[i]);
    }
  }
  std::copy(fixed_values_.begin(), fixed_values_.end(), slots.begin() + static_cast<std::ptrdiff_t>(k));

  if (n_rows_ > 0) {
    const double sigma = noise_index_ >= 0 ? slots[static_cast<std::size_t>(noise_index_)] : noise_fixed_;
    if (!(sigma > 0.0) || !std::isfinite(sigma)) return kNegInf;
    const std::size_t data_offset = k + fixed_values_.size();
    std::vector<double> dmean(mean_partials_.size(), 0.0);
    double sum_sq = 0.0;
    for (std::size_t r = 0; r < n_rows_; ++r) {
      const double* row = data_.data() + r * n_data_slots_;
      std::copy(row, row + n_data_slots_, slots.begin() + static_cast<std::ptrdiff_t>(data_offset));
      const double mu = mean_(slots);
      if (!std::isfinite(mu)) {
        throw Error(ErrorCode::NonFiniteDensity,
                    "likelihood mean is not finite at data row " + std::to_string(r + 1));
      }
      const double resid = response_[r] - mu;
      sum_sq += resid * resid;
      if (grad) {
        for (std::size_t j = 0; j < mean_partials_.size(); ++j) dmean[j] += resid * mean_partials_[j].second(slots);
      }
    }
    const double n = static_cast<double>(n_rows_);
    const double inv_var = 1.0 / (sigma * sigma);
    lp += -n * (kHalfLog2Pi + std::log(sigma)) - 0.5 * sum_sq * inv_var;
    if (grad) {
      for (std::size_t j = 0; j < mean_partials_.size(); ++j) {
        const std::size_t i = mean_partials_[j].first;
        grad[i] += dmean[j] * inv_var * dx[i];
      }
      if (noise_index_ >= 0) {
        const auto i = static_cast<std::size_t>(noise_index_);
        grad[i] += (-n / sigma + sum_sq * inv_var / sigma) * dx[i];
      }
    }
  }

  if (std::isnan(lp)) throw Error(ErrorCode::NonFiniteDensity, "log density evaluated to NaN");
  return lp;
}

double PosteriorFn::log_density(std::span<const double> z) const { return evaluate(z, nullptr); }

double PosteriorFn::log_density_gradient(std::span<const double> z, std::span<double> grad) const {
  if (grad.size() != names_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "gradient buffer has wrong length");
  }
  return evaluate(z, grad.data());
}

std::vector<double> PosteriorFn::constrain(std::span<const double> z) const {
  if (z.size() != names_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(names_.size()) + " coordinates, got " + std::to_string(z.size()));
  }
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = transforms_[i].forward(z[i]);
  return out;
}

std::vector<std::pair<std::string, double>> PosteriorFn::constrain_named(std::span<const double> z) const {
  const auto values = constrain(z);
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.emplace_back(names_[i], values[i]);
  return out;
}

std::vector<double> PosteriorFn::unconstrain(std::span<const double> values) const {
  if (values.size() != names_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(names_.size()) + " values");
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = transforms_[i].inverse(values[i]);
  return out;
}

}  // namespace llmbi

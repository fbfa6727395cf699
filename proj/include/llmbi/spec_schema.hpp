#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "llmbi/distributions.hpp"
#include "llmbi/formula.hpp"

namespace llmbi {

enum class DistKind { Normal, HalfNormal, Uniform, Exponential };

std::string_view to_string(DistKind kind);

/// A prior as it appears in the JSON contract. Parameters are held under
/// their canonical names in canonical order:
/// Normal{mu, sigma}, HalfNormal{sigma}, Uniform{lower, upper}, Exponential{lam}.
struct DistributionSpec {
  DistKind kind;
  std::vector<std::pair<std::string, double>> params;

  double param(std::string_view name) const;
  PriorDistribution to_distribution() const;

  bool operator==(const DistributionSpec&) const = default;
};

DistributionSpec make_spec(const PriorDistribution& dist);

enum class LikelihoodKind { Normal };

struct LikelihoodSpec {
  LikelihoodKind distribution = LikelihoodKind::Normal;
  std::string formula_source;
  std::string noise_param = "sigma";

  bool operator==(const LikelihoodSpec&) const = default;
};

struct ModelSpec {
  std::vector<std::pair<std::string, DistributionSpec>> priors;
  LikelihoodSpec likelihood;

  const DistributionSpec* find_prior(std::string_view name) const;

  bool operator==(const ModelSpec&) const = default;
};

struct ParsedPrior {
  std::optional<std::string> name;
  DistributionSpec spec;
};

bool is_identifier(std::string_view text);

/// Cuts the first balanced top-level JSON object out of free-form LLM
/// output (code fences, leading or trailing prose). Braces inside JSON
/// strings are skipped. Throws Error(NoJsonObject).
std::string sanitize_llm_text(std::string_view raw);

/// Parses `{"distribution": ..., "params": {...}}`. Parameter aliases are
/// normalized; unknown top-level keys are reported through `warnings`.
ParsedPrior parse_prior_json(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Parses `{"priors": {...}, "likelihood": {"distribution", "formula"}}`.
ModelSpec parse_model_json(std::string_view text, std::vector<std::string>* warnings = nullptr);

std::string serialize_prior(const DistributionSpec& spec);
/// `indent` < 0 gives compact output.
std::string serialize_model(const ModelSpec& spec, int indent = -1);

enum class VariableRole { Parameter, Column };

struct ValidatedModel {
  ModelSpec spec;
  formula::Ast mean;
  /// Every formula variable with its role, in name order.
  std::vector<std::pair<std::string, VariableRole>> variables;
};

/// Resolves formula variables against prior names and data columns and
/// checks the noise prior has positive support.
ValidatedModel validate_model(const ModelSpec& spec, const std::set<std::string>& data_columns);

}  // namespace llmbi

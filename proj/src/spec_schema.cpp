#include "llmbi/spec_schema.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "llmbi/error.hpp"
#include "llmbi/numfmt.hpp"

namespace llmbi {

using json = nlohmann::ordered_json;

namespace {

struct ParamAlias {
  std::string_view alias;
  std::string_view canonical;
};

// Alias table per distribution; canonical names listed first, in order.
constexpr std::array<ParamAlias, 6> kNormalAliases{{
    {"mu", "mu"}, {"sigma", "sigma"}, {"loc", "mu"}, {"mean", "mu"}, {"sd", "sigma"}, {"scale", "sigma"},
}};
constexpr std::array<ParamAlias, 3> kHalfNormalAliases{{
    {"sigma", "sigma"}, {"sd", "sigma"}, {"scale", "sigma"},
}};
constexpr std::array<ParamAlias, 6> kUniformAliases{{
    {"lower", "lower"}, {"upper", "upper"}, {"low", "lower"}, {"a", "lower"}, {"high", "upper"}, {"b", "upper"},
}};
constexpr std::array<ParamAlias, 3> kExponentialAliases{{
    {"lam", "lam"}, {"rate", "lam"}, {"lambda", "lam"},
}};

std::span<const ParamAlias> aliases_for(DistKind kind) {
  switch (kind) {
    case DistKind::Normal: return kNormalAliases;
    case DistKind::HalfNormal: return kHalfNormalAliases;
    case DistKind::Uniform: return kUniformAliases;
    case DistKind::Exponential: return kExponentialAliases;
  }
  return {};
}

std::vector<std::string_view> canonical_params(DistKind kind) {
  switch (kind) {
    case DistKind::Normal: return {"mu", "sigma"};
    case DistKind::HalfNormal: return {"sigma"};
    case DistKind::Uniform: return {"lower", "upper"};
    case DistKind::Exponential: return {"lam"};
  }
  return {};
}

std::string lower_case(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool looks_positional(std::string_view name) {
  if (name.size() <= 5 || name.substr(0, 5) != "param") return false;
  return std::all_of(name.begin() + 5, name.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

void warn(std::vector<std::string>* warnings, std::string message) {
  if (warnings) warnings->push_back(std::move(message));
}

DistKind parse_kind(const json& value) {
  if (!value.is_string()) {
    throw Error(ErrorCode::UnknownDistribution, "\"distribution\" must be a string");
  }
  const std::string name = value.get<std::string>();
  const std::string lowered = lower_case(name);
  for (DistKind kind : {DistKind::Normal, DistKind::HalfNormal, DistKind::Uniform, DistKind::Exponential}) {
    if (lower_case(to_string(kind)) == lowered) return kind;
  }
  throw Error(ErrorCode::UnknownDistribution,
              "'" + name + "' is not one of Normal, HalfNormal, Uniform, Exponential");
}

void check_constraints(const DistributionSpec& spec) {
  auto require_positive = [&](std::string_view name) {
    const double v = spec.param(name);
    if (!(v > 0.0)) {
      throw Error(ErrorCode::InvalidParamValue, std::string(to_string(spec.kind)) + " " +
                                                    std::string(name) + " must be > 0, got " +
                                                    format_double(v));
    }
  };
  switch (spec.kind) {
    case DistKind::Normal:
    case DistKind::HalfNormal:
      require_positive("sigma");
      break;
    case DistKind::Exponential:
      require_positive("lam");
      break;
    case DistKind::Uniform:
      if (!(spec.param("lower") < spec.param("upper"))) {
        throw Error(ErrorCode::InvalidParamValue,
                    "Uniform requires lower < upper, got lower=" + format_double(spec.param("lower")) +
                        " upper=" + format_double(spec.param("upper")));
      }
      break;
  }
}

DistributionSpec distribution_from_json(const json& obj, std::string_view context,
                                        std::vector<std::string>* warnings) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::MalformedJson, std::string(context) + "prior must be a JSON object");
  }
  if (!obj.contains("distribution")) {
    throw Error(ErrorCode::MissingKey, std::string(context) + "\"distribution\"");
  }
  const DistKind kind = parse_kind(obj.at("distribution"));
  if (!obj.contains("params")) {
    throw Error(ErrorCode::MissingKey, std::string(context) + "\"params\"");
  }
  const json& params = obj.at("params");
  if (!params.is_object()) {
    throw Error(ErrorCode::MalformedJson, std::string(context) + "\"params\" must be an object");
  }

  const auto table = aliases_for(kind);
  std::vector<std::pair<std::string, double>> found;
  for (const auto& [raw_key, value] : params.items()) {
    const std::string key = lower_case(raw_key);
    auto it = std::find_if(table.begin(), table.end(), [&](const ParamAlias& a) { return a.alias == key; });
    if (it == table.end()) {
      if (looks_positional(key)) {
        throw Error(ErrorCode::UnknownParam, std::string(context) + "positional parameter '" + raw_key +
                                                 "' is not accepted; use named parameters");
      }
      throw Error(ErrorCode::UnknownParam, std::string(context) + "'" + raw_key + "' is not a parameter of " +
                                               std::string(to_string(kind)));
    }
    if (!value.is_number()) {
      throw Error(ErrorCode::InvalidParamValue,
                  std::string(context) + "parameter '" + raw_key + "' must be a number");
    }
    const std::string canonical(it->canonical);
    if (std::any_of(found.begin(), found.end(), [&](const auto& p) { return p.first == canonical; })) {
      throw Error(ErrorCode::InvalidParamValue,
                  std::string(context) + "parameter '" + canonical + "' given more than once");
    }
    found.emplace_back(canonical, value.get<double>());
  }

  DistributionSpec spec{kind, {}};
  for (std::string_view name : canonical_params(kind)) {
    auto it = std::find_if(found.begin(), found.end(), [&](const auto& p) { return p.first == name; });
    if (it == found.end()) {
      throw Error(ErrorCode::MissingParam, std::string(context) + std::string(to_string(kind)) +
                                               " requires parameter '" + std::string(name) + "'");
    }
    spec.params.emplace_back(std::string(name), it->second);
  }
  check_constraints(spec);

  for (const auto& [key, value] : obj.items()) {
    if (key != "distribution" && key != "params" && key != "name" && key != "parameter") {
      warn(warnings, std::string(context) + "ignoring unknown key \"" + key + "\"");
    }
  }
  return spec;
}

json prior_to_json(const DistributionSpec& spec) {
  json params = json::object();
  for (const auto& [name, value] : spec.params) params[name] = value;
  return json{{"distribution", std::string(to_string(spec.kind))}, {"params", params}};
}

}  // namespace

std::string_view to_string(DistKind kind) {
  switch (kind) {
    case DistKind::Normal: return "Normal";
    case DistKind::HalfNormal: return "HalfNormal";
    case DistKind::Uniform: return "Uniform";
    case DistKind::Exponential: return "Exponential";
  }
  return "?";
}

double DistributionSpec::param(std::string_view name) const {
  for (const auto& [key, value] : params) {
    if (key == name) return value;
  }
  throw Error(ErrorCode::MissingParam,
              std::string(to_string(kind)) + " has no parameter '" + std::string(name) + "'");
}

PriorDistribution DistributionSpec::to_distribution() const {
  switch (kind) {
    case DistKind::Normal: return NormalDist{param("mu"), param("sigma")};
    case DistKind::HalfNormal: return HalfNormalDist{param("sigma")};
    case DistKind::Uniform: return UniformDist{param("lower"), param("upper")};
    case DistKind::Exponential: return ExponentialDist{param("lam")};
  }
  return NormalDist{0.0, 1.0};
}

DistributionSpec make_spec(const PriorDistribution& dist) {
  if (const auto* d = std::get_if<NormalDist>(&dist)) {
    return {DistKind::Normal, {{"mu", d->mu}, {"sigma", d->sigma}}};
  }
  if (const auto* d = std::get_if<HalfNormalDist>(&dist)) {
    return {DistKind::HalfNormal, {{"sigma", d->sigma}}};
  }
  if (const auto* d = std::get_if<UniformDist>(&dist)) {
    return {DistKind::Uniform, {{"lower", d->lower}, {"upper", d->upper}}};
  }
  const auto& d = std::get<ExponentialDist>(dist);
  return {DistKind::Exponential, {{"lam", d.lam}}};
}

const DistributionSpec* ModelSpec::find_prior(std::string_view name) const {
  for (const auto& [key, spec] : priors) {
    if (key == name) return &spec;
  }
  return nullptr;
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  const auto first = static_cast<unsigned char>(text.front());
  if (!(std::isalpha(first) || first == '_')) return false;
  return std::all_of(text.begin() + 1, text.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

std::string sanitize_llm_text(std::string_view raw) {
  for (std::size_t start = raw.find('{'); start != std::string_view::npos;
       start = raw.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
      const char c = raw[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) return std::string(raw.substr(start, i - start + 1));
      }
    }
  }
  throw Error(ErrorCode::NoJsonObject, "no balanced JSON object found in LLM response");
}

ParsedPrior parse_prior_json(std::string_view text, std::vector<std::string>* warnings) {
  const json obj = parse_json_text(text);
  ParsedPrior result{std::nullopt, distribution_from_json(obj, "", warnings)};
  for (const char* key : {"name", "parameter"}) {
    if (obj.contains(key) && obj.at(key).is_string()) {
      std::string name = obj.at(key).get<std::string>();
      if (!is_identifier(name)) {
        throw Error(ErrorCode::InvalidIdentifier, "'" + name + "' is not a valid parameter name");
      }
      result.name = std::move(name);
      break;
    }
  }
  return result;
}

ModelSpec parse_model_json(std::string_view text, std::vector<std::string>* warnings) {
  const json obj = parse_json_text(text);
  if (!obj.is_object()) throw Error(ErrorCode::MalformedJson, "model must be a JSON object");
  if (!obj.contains("priors")) throw Error(ErrorCode::MissingKey, "\"priors\"");
  if (!obj.contains("likelihood")) throw Error(ErrorCode::MissingKey, "\"likelihood\"");
  for (const auto& [key, value] : obj.items()) {
    if (key != "priors" && key != "likelihood") warn(warnings, "ignoring unknown key \"" + key + "\"");
  }

  ModelSpec model;
  const json& priors = obj.at("priors");
  if (!priors.is_object()) throw Error(ErrorCode::MalformedJson, "\"priors\" must be an object");
  for (const auto& [name, prior] : priors.items()) {
    if (!is_identifier(name)) {
      throw Error(ErrorCode::InvalidIdentifier, "prior name '" + name + "' is not a valid identifier");
    }
    model.priors.emplace_back(name, distribution_from_json(prior, "priors." + name + ": ", warnings));
  }

  const json& likelihood = obj.at("likelihood");
  if (!likelihood.is_object()) throw Error(ErrorCode::MalformedJson, "\"likelihood\" must be an object");
  if (!likelihood.contains("distribution")) throw Error(ErrorCode::MissingKey, "\"likelihood.distribution\"");
  if (!likelihood.contains("formula")) throw Error(ErrorCode::MissingKey, "\"likelihood.formula\"");
  const json& dist = likelihood.at("distribution");
  if (!dist.is_string() || lower_case(dist.get<std::string>()) != "normal") {
    throw Error(ErrorCode::UnsupportedLikelihood,
                "likelihood distribution must be \"Normal\", got " + dist.dump());
  }
  const json& formula_value = likelihood.at("formula");
  if (!formula_value.is_string()) throw Error(ErrorCode::FormulaSyntax, "\"formula\" must be a string");
  model.likelihood.formula_source = formula_value.get<std::string>();
  try {
    formula::parse(model.likelihood.formula_source);
  } catch (const Error& e) {
    throw Error(ErrorCode::FormulaSyntax, "\"" + model.likelihood.formula_source + "\": " + e.what(),
                e.position());
  }
  if (likelihood.contains("noise_param")) {
    const json& noise = likelihood.at("noise_param");
    if (!noise.is_string() || !is_identifier(noise.get<std::string>())) {
      throw Error(ErrorCode::InvalidIdentifier, "\"noise_param\" must be an identifier");
    }
    model.likelihood.noise_param = noise.get<std::string>();
  }
  for (const auto& [key, value] : likelihood.items()) {
    if (key != "distribution" && key != "formula" && key != "noise_param") {
      warn(warnings, "likelihood: ignoring unknown key \"" + key + "\"");
    }
  }
  return model;
}

std::string serialize_prior(const DistributionSpec& spec) { return prior_to_json(spec).dump(); }

std::string serialize_model(const ModelSpec& spec, int indent) {
  json priors = json::object();
  for (const auto& [name, prior] : spec.priors) priors[name] = prior_to_json(prior);
  json likelihood{{"distribution", "Normal"}, {"formula", spec.likelihood.formula_source}};
  if (spec.likelihood.noise_param != "sigma") likelihood["noise_param"] = spec.likelihood.noise_param;
  return json{{"priors", priors}, {"likelihood", likelihood}}.dump(indent);
}

ValidatedModel validate_model(const ModelSpec& spec, const std::set<std::string>& data_columns) {
  ValidatedModel result{spec, nullptr, {}};
  try {
    result.mean = formula::parse(spec.likelihood.formula_source);
  } catch (const Error& e) {
    throw Error(ErrorCode::FormulaSyntax, "\"" + spec.likelihood.formula_source + "\": " + e.what(),
                e.position());
  }
  std::set<std::string> seen;
  for (const auto& [name, prior] : spec.priors) {
    if (!is_identifier(name)) {
      throw Error(ErrorCode::InvalidIdentifier, "prior name '" + name + "' is not a valid identifier");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::InvalidIdentifier, "prior '" + name + "' declared twice");
    }
    if (data_columns.count(name)) {
      throw Error(ErrorCode::ShadowedColumn, "prior '" + name + "' has the same name as a data column");
    }
  }
  for (const auto& name : formula::free_vars(result.mean)) {
    if (seen.count(name)) {
      result.variables.emplace_back(name, VariableRole::Parameter);
    } else if (data_columns.count(name)) {
      result.variables.emplace_back(name, VariableRole::Column);
    } else {
      throw Error(ErrorCode::UnresolvedVariable,
                  "'" + name + "' in formula is neither a prior nor a data column");
    }
  }
  const auto& noise = spec.likelihood.noise_param;
  const DistributionSpec* noise_prior = spec.find_prior(noise);
  if (!noise_prior) {
    throw Error(ErrorCode::UnresolvedVariable, "noise parameter '" + noise + "' has no prior");
  }
  if (!has_positive_support(noise_prior->to_distribution())) {
    throw Error(ErrorCode::NoiseNotPositiveSupport,
                "noise parameter '" + noise + "' has a " + std::string(to_string(noise_prior->kind)) +
                    " prior whose support includes negative values");
  }
  return result;
}

}  // namespace llmbi

#include "llmbi/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "llmbi/error.hpp"

namespace llmbi {

FitResult fit_model(const ModelSpec& model, const Dataset& data, const SamplerConfig& sampler, const BuildOptions& options,
                    double hdi_prob) {
  const auto start = std::chrono::steady_clock::now();
  const ValidatedModel validated = validate_model(model, data.name_set());
  const PosteriorFn posterior = build_posterior(validated, data, options);
  FitResult result;
  result.trace = sample_posterior(posterior, sampler);
  result.summary = summarize(result.trace, hdi_prob);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
}

PriorRunInputs load_prior_run_inputs(const std::filesystem::path& beliefs_path, const std::filesystem::path& manual_path) {
  using nlohmann::ordered_json;
  const std::string text = read_text_file(beliefs_path);
  ordered_json doc = ordered_json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::MalformedJson, beliefs_path.string() + " is not a JSON object");
  }
  if (!doc.contains("beliefs") || !doc["beliefs"].is_object()) {
    throw Error(ErrorCode::MissingKey, beliefs_path.string() + ": missing object \"beliefs\"");
  }
  if (!doc.contains("likelihood")) throw Error(ErrorCode::MissingKey, beliefs_path.string() + ": missing \"likelihood\"");

  PriorRunInputs inputs;
  for (const auto& [name, belief] : doc["beliefs"].items()) {
    if (!belief.is_string()) throw Error(ErrorCode::MalformedJson, "belief for '" + name + "' is not a string");
    inputs.beliefs.emplace_back(name, belief.get<std::string>());
  }
  ordered_json wrapper;
  wrapper["priors"] = ordered_json::object();
  wrapper["likelihood"] = doc["likelihood"];
  inputs.likelihood = parse_model_json(wrapper.dump()).likelihood;
  inputs.manual = parse_model_json(read_text_file(manual_path));
  return inputs;
}

PriorRunResult run_prior_elicitation(const PriorRunInputs& inputs, const Dataset& data, const LlmConfig& llm,
                                     const SamplerConfig& sampler) {
  PriorRunResult result;
  result.manual = inputs.manual;
  result.elicited.likelihood = inputs.likelihood;
  for (const auto& [name, belief] : inputs.beliefs) {
    result.elicited.priors.emplace_back(name, elicit_prior(name, belief, llm, &result.log));
  }
  result.manual_fit = fit_model(result.manual, data, sampler);
  result.elicited_fit = fit_model(result.elicited, data, sampler);
  return result;
}

ModelRunResult run_model_elicitation(const std::string& description, const Dataset& data, const LlmConfig& llm,
                                     const SamplerConfig& sampler) {
  ModelRunResult result;
  result.spec = elicit_model(description, llm, &result.log);
  result.fit = fit_model(result.spec, data, sampler);
  return result;
}

}  // namespace llmbi

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "llmbi/dataset.hpp"
#include "llmbi/diagnostics.hpp"
#include "llmbi/elicitation.hpp"
#include "llmbi/posterior.hpp"
#include "llmbi/sampler.hpp"
#include "llmbi/spec_schema.hpp"

namespace llmbi {

struct FitResult {
  Trace trace;
  SummaryTable summary;
  double seconds = 0.0;
};

/// validate -> build posterior -> sample -> summarize.
FitResult fit_model(const ModelSpec& model, const Dataset& data, const SamplerConfig& sampler,
                    const BuildOptions& options = {}, double hdi_prob = 0.94);

/// Prior-elicitation run inputs: one belief per parameter plus the fixed
/// likelihood the elicited priors are combined with, and the hand-written
/// model they are compared against.
struct PriorRunInputs {
  std::vector<std::pair<std::string, std::string>> beliefs;
  LikelihoodSpec likelihood;
  ModelSpec manual;
};

/// `beliefs_path`: {"beliefs": {name: text, ...}, "likelihood": {...}}.
/// `manual_path`: a model JSON.
PriorRunInputs load_prior_run_inputs(const std::filesystem::path& beliefs_path, const std::filesystem::path& manual_path);

struct PriorRunResult {
  ModelSpec manual;
  ModelSpec elicited;
  ElicitationLog log;
  FitResult manual_fit;
  FitResult elicited_fit;
};

/// Elicits each prior, composes them with the fixed likelihood, and fits
/// both models to the same data with the same sampler settings.
PriorRunResult run_prior_elicitation(const PriorRunInputs& inputs, const Dataset& data, const LlmConfig& llm,
                                     const SamplerConfig& sampler);

struct ModelRunResult {
  ModelSpec spec;
  ElicitationLog log;
  FitResult fit;
};

/// Elicits the whole model from a description and fits it.
ModelRunResult run_model_elicitation(const std::string& description, const Dataset& data, const LlmConfig& llm,
                                     const SamplerConfig& sampler);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace llmbi

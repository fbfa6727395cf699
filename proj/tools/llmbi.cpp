#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "llmbi/data_io.hpp"
#include "llmbi/diagnostics.hpp"
#include "llmbi/elicitation.hpp"
#include "llmbi/error.hpp"
#include "llmbi/pipeline.hpp"
#include "llmbi/report.hpp"
#include "llmbi/sampler.hpp"
#include "llmbi/util.hpp"

namespace fs = std::filesystem;
using namespace llmbi;
using nlohmann::ordered_json;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string llm_mode = "replay";
  fs::path fixtures_dir = "fixtures";
  fs::path out_dir = ".";
  std::string endpoint;
  std::string model_name;
  std::string api_key_env = "LLM_API_KEY";
  double temperature = 0.0;
  int timeout_s = 60;
  int max_retries = 2;
  std::string response_pointer;
};

LlmConfig llm_config(const Globals& g) {
  LlmConfig cfg;
  cfg.endpoint_url = g.endpoint;
  cfg.model_name = g.model_name;
  cfg.api_key_env = g.api_key_env;
  cfg.temperature = g.temperature;
  cfg.timeout = std::chrono::seconds(g.timeout_s);
  cfg.max_retries = g.max_retries;
  cfg.mode = parse_llm_mode(g.llm_mode);
  cfg.fixtures_dir = g.fixtures_dir;
  cfg.response_pointer = g.response_pointer;
  cfg.validate();
  return cfg;
}

ordered_json llm_json(const LlmConfig& cfg) {
  return {{"mode", to_string(cfg.mode)},
          {"endpoint_url", cfg.endpoint_url},
          {"model_name", cfg.model_name},
          {"api_key_env", cfg.api_key_env},
          {"temperature", cfg.temperature},
          {"timeout_s", cfg.timeout.count()},
          {"max_retries", cfg.max_retries},
          {"fixtures_dir", cfg.fixtures_dir.string()},
          {"prompt_template_version", kPromptTemplateVersion}};
}

ordered_json sampler_json(const SamplerConfig& cfg) {
  return {{"algorithm", to_string(cfg.algorithm)}, {"chains", cfg.chains},
          {"warmup", cfg.warmup_draws},          {"draws", cfg.kept_draws},
          {"seed", cfg.seed},                    {"target_accept", cfg.target_accept},
          {"max_tree_depth", cfg.max_tree_depth}};
}

ordered_json sim_json(const SimConfig& cfg) {
  return {{"alpha", cfg.alpha}, {"beta", cfg.beta},       {"sigma", cfg.sigma}, {"n", cfg.n},
          {"x_low", cfg.x_low}, {"x_high", cfg.x_high}, {"seed", cfg.seed}};
}

ordered_json log_json(const ElicitationLog& log) {
  ordered_json out;
  out["prompts"] = ordered_json::array();
  for (const auto& p : log.prompts) out["prompts"].push_back({{"prompt_hash", prompt_hash(p)}, {"prompt", p}});
  out["responses"] = log.responses;
  out["warnings"] = log.warnings;
  return out;
}

struct SamplerFlags {
  std::string algorithm = "nuts";
  std::size_t chains = 4;
  std::size_t warmup = 1000;
  std::size_t draws = 1000;
  double target_accept = 0.8;
  std::size_t max_tree_depth = 10;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--algorithm", algorithm, "nuts or rwm")->capture_default_str();
    cmd->add_option("--chains", chains)->capture_default_str();
    cmd->add_option("--warmup", warmup)->capture_default_str();
    cmd->add_option("--draws", draws)->capture_default_str();
    cmd->add_option("--target-accept", target_accept)->capture_default_str();
    cmd->add_option("--max-tree-depth", max_tree_depth)->capture_default_str();
  }

  SamplerConfig config(const Globals& g) const {
    SamplerConfig cfg;
    cfg.algorithm = parse_algorithm(algorithm);
    cfg.chains = chains;
    cfg.warmup_draws = warmup;
    cfg.kept_draws = draws;
    cfg.target_accept = target_accept;
    cfg.max_tree_depth = max_tree_depth;
    cfg.seed = g.seed.value_or(0);
    cfg.validate();
    return cfg;
  }
};

struct SimFlags {
  SimConfig cfg;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--alpha", cfg.alpha)->capture_default_str();
    cmd->add_option("--beta", cfg.beta)->capture_default_str();
    cmd->add_option("--sigma", cfg.sigma)->capture_default_str();
    cmd->add_option("--n", cfg.n)->capture_default_str();
    cmd->add_option("--x-low", cfg.x_low)->capture_default_str();
    cmd->add_option("--x-high", cfg.x_high)->capture_default_str();
  }
};

void write_fit_outputs(const FitResult& fit, const fs::path& dir, const std::string& prefix, RunManifest& manifest) {
  const fs::path csv = dir / (prefix + "trace.csv");
  const fs::path stats = dir / (prefix + "trace_stats.json");
  write_trace(fit.trace, csv, stats);
  manifest.add_output(csv);
  manifest.add_output(stats);
  for (auto [ext, text] : {std::pair{"txt", render_text(fit.summary)}, std::pair{"json", render_json(fit.summary)},
                           std::pair{"csv", render_csv(fit.summary)}}) {
    const fs::path path = dir / (prefix + "summary." + ext);
    write_text_file(path, text);
    manifest.add_output(path);
  }
}

Dataset data_from(const std::string& data_path, const SimConfig& sim, RunManifest& manifest, const fs::path& out_dir) {
  if (!data_path.empty()) {
    manifest.add_input("data", data_path);
    return load_csv(data_path);
  }
  Dataset data = simulate_linear(sim);
  manifest.config()["simulate"] = sim_json(sim);
  const fs::path path = out_dir / "data.csv";
  save_csv(data, path);
  manifest.add_output(path);
  return data;
}

std::string belief_text(const std::string& belief, const std::string& belief_file) {
  if (!belief_file.empty()) {
    std::string text = read_text_file(belief_file);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
  }
  return belief;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural-language Bayesian inference: elicit model specs from an LLM, fit them with MCMC, report."};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed (data simulation or sampler)");
  app.add_option("--llm-mode", g.llm_mode, "live, replay or record")->capture_default_str();
  app.add_option("--fixtures-dir", g.fixtures_dir, "Replay fixture directory")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--endpoint", g.endpoint, "Chat endpoint URL (live/record)");
  app.add_option("--model-name", g.model_name, "Model name sent to the endpoint");
  app.add_option("--api-key-env", g.api_key_env, "Environment variable holding the API key")->capture_default_str();
  app.add_option("--temperature", g.temperature)->capture_default_str();
  app.add_option("--timeout", g.timeout_s, "Request timeout in seconds")->capture_default_str();
  app.add_option("--max-retries", g.max_retries)->capture_default_str();
  app.add_option("--response-pointer", g.response_pointer, "JSON pointer to the reply text");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic linear-regression dataset");
  SimFlags sim_flags;
  sim_flags.add_to(simulate);
  std::string sim_out;
  simulate->add_option("--out", sim_out, "CSV path (default <out-dir>/data.csv)");

  // elicit-prior
  auto* elicit_prior_cmd = app.add_subcommand("elicit-prior", "Elicit one prior from a natural-language belief");
  std::string ep_param, ep_belief, ep_belief_file, ep_out;
  elicit_prior_cmd->add_option("--parameter", ep_param)->required();
  auto* ep_b = elicit_prior_cmd->add_option("--belief", ep_belief);
  auto* ep_bf = elicit_prior_cmd->add_option("--belief-file", ep_belief_file);
  ep_b->excludes(ep_bf);
  elicit_prior_cmd->add_option("--out", ep_out, "Prior JSON path (default <out-dir>/prior_<parameter>.json)");

  // elicit-model
  auto* elicit_model_cmd = app.add_subcommand("elicit-model", "Elicit a full model from a problem description");
  std::string em_desc_file, em_out;
  elicit_model_cmd->add_option("--description-file", em_desc_file)->required();
  elicit_model_cmd->add_option("--out", em_out, "Model JSON path (default <out-dir>/model.json)");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Sample the posterior of a model given data");
  std::string fit_model_path, fit_data_path, fit_response = "y";
  fit_cmd->add_option("--model", fit_model_path)->required();
  fit_cmd->add_option("--data", fit_data_path)->required();
  fit_cmd->add_option("--response", fit_response, "Response column")->capture_default_str();
  SamplerFlags fit_flags;
  fit_flags.add_to(fit_cmd);

  // summarize
  auto* summarize_cmd = app.add_subcommand("summarize", "Summary table of a trace");
  std::string sum_trace, sum_format = "text", sum_out;
  double sum_hdi = 0.94;
  summarize_cmd->add_option("--trace", sum_trace)->required();
  summarize_cmd->add_option("--format", sum_format)->check(CLI::IsMember({"text", "json", "csv"}))->capture_default_str();
  summarize_cmd->add_option("--hdi", sum_hdi)->capture_default_str();
  summarize_cmd->add_option("--out", sum_out, "Also write the table here");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "Per-parameter histograms (CSV counts + SVG)");
  std::string plot_trace, plot_compare, plot_label = "trace", plot_compare_label = "compare", plot_out;
  std::size_t plot_bins = 50;
  plot_cmd->add_option("--trace", plot_trace)->required();
  plot_cmd->add_option("--compare", plot_compare, "Second trace to overlay");
  plot_cmd->add_option("--label", plot_label)->capture_default_str();
  plot_cmd->add_option("--compare-label", plot_compare_label)->capture_default_str();
  plot_cmd->add_option("--out", plot_out, "Output directory (default <out-dir>)");
  plot_cmd->add_option("--bins", plot_bins)->capture_default_str();

  // run
  auto* run_cmd = app.add_subcommand("run", "End-to-end pipeline: elicit, validate, fit, summarize, plot");
  std::string run_experiment, run_desc_file, run_beliefs, run_manual, run_data;
  std::uint64_t run_data_seed = 42;
  run_cmd->add_option("--experiment", run_experiment, "priors: elicited priors + fixed likelihood; model: whole model")
      ->required()
      ->check(CLI::IsMember({"priors", "model"}));
  run_cmd->add_option("--description-file", run_desc_file, "Problem description (--experiment model)");
  run_cmd->add_option("--beliefs", run_beliefs, "Beliefs JSON (--experiment priors)");
  run_cmd->add_option("--manual-model", run_manual, "Hand-written model to compare against (--experiment priors)");
  run_cmd->add_option("--data", run_data, "Dataset CSV; simulated when omitted");
  run_cmd->add_option("--data-seed", run_data_seed, "Seed for simulated data")->capture_default_str();
  SimFlags run_sim;
  run_sim.add_to(run_cmd);
  SamplerFlags run_flags;
  run_flags.add_to(run_cmd);
  std::size_t run_bins = 50;
  run_cmd->add_option("--bins", run_bins)->capture_default_str();

  // fixture
  auto* fixture_cmd = app.add_subcommand("fixture", "Store a reply as a replay fixture for a rendered prompt");
  std::string fx_param, fx_belief, fx_belief_file, fx_desc_file, fx_response_file;
  fixture_cmd->add_option("--parameter", fx_param);
  fixture_cmd->add_option("--belief", fx_belief);
  fixture_cmd->add_option("--belief-file", fx_belief_file);
  fixture_cmd->add_option("--description-file", fx_desc_file);
  fixture_cmd->add_option("--response-file", fx_response_file)->required();

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  RunManifest manifest(command);
  fs::path manifest_path = g.out_dir / (command + ".manifest.json");

  try {
    fs::create_directories(g.out_dir);

    if (*simulate) {
      SimConfig cfg = sim_flags.cfg;
      cfg.seed = g.seed.value_or(cfg.seed);
      cfg.validate();
      manifest.config()["simulate"] = sim_json(cfg);
      const fs::path out = sim_out.empty() ? g.out_dir / "data.csv" : fs::path(sim_out);
      save_csv(simulate_linear(cfg), out);
      manifest.add_output(out);
      std::cout << "wrote " << out.string() << "\n";

    } else if (*elicit_prior_cmd) {
      const LlmConfig cfg = llm_config(g);
      manifest.config()["llm"] = llm_json(cfg);
      const std::string belief = belief_text(ep_belief, ep_belief_file);
      manifest.add_input_text("belief", belief);
      ElicitationLog log;
      const DistributionSpec spec = elicit_prior(ep_param, belief, cfg, &log);
      manifest.config()["elicitation"] = log_json(log);
      for (const auto& w : log.warnings) std::cerr << "warning: " << w << "\n";
      ordered_json doc = ordered_json::parse(serialize_prior(spec));
      const std::string text = doc.dump(2) + "\n";
      const fs::path out = ep_out.empty() ? g.out_dir / ("prior_" + ep_param + ".json") : fs::path(ep_out);
      write_text_file(out, text);
      manifest.add_output(out);
      std::cout << text;

    } else if (*elicit_model_cmd) {
      const LlmConfig cfg = llm_config(g);
      manifest.config()["llm"] = llm_json(cfg);
      manifest.add_input("description", em_desc_file);
      ElicitationLog log;
      const ModelSpec spec = elicit_model(read_text_file(em_desc_file), cfg, &log);
      manifest.config()["elicitation"] = log_json(log);
      for (const auto& w : log.warnings) std::cerr << "warning: " << w << "\n";
      const std::string text = serialize_model(spec, 2) + "\n";
      const fs::path out = em_out.empty() ? g.out_dir / "model.json" : fs::path(em_out);
      write_text_file(out, text);
      manifest.add_output(out);
      std::cout << text;

    } else if (*fit_cmd) {
      const SamplerConfig cfg = fit_flags.config(g);
      manifest.config()["sampler"] = sampler_json(cfg);
      manifest.add_input("model", fit_model_path);
      manifest.add_input("data", fit_data_path);
      const ModelSpec model = parse_model_json(read_text_file(fit_model_path));
      BuildOptions options;
      options.response = fit_response;
      const FitResult fit = fit_model(model, load_csv(fit_data_path), cfg, options);
      write_fit_outputs(fit, g.out_dir, "", manifest);
      manifest.config()["seconds"] = fit.seconds;
      std::cout << render_text(fit.summary);

    } else if (*summarize_cmd) {
      fs::path stats = fs::path(sum_trace).replace_extension().string() + "_stats.json";
      if (!fs::exists(stats)) stats.clear();
      const Trace trace = read_trace(sum_trace, stats);
      manifest.add_input("trace", sum_trace);
      const SummaryTable table = summarize(trace, sum_hdi);
      const std::string text = sum_format == "json" ? render_json(table) + "\n"
                               : sum_format == "csv" ? render_csv(table)
                                                     : render_text(table);
      std::cout << text;
      if (!sum_out.empty()) {
        write_text_file(sum_out, text);
        manifest.add_output(sum_out);
      }

    } else if (*plot_cmd) {
      const Trace a = read_trace(plot_trace);
      manifest.add_input("trace", plot_trace);
      std::vector<LabeledTrace> traces{{plot_label, &a}};
      Trace b;
      if (!plot_compare.empty()) {
        b = read_trace(plot_compare);
        manifest.add_input("compare", plot_compare);
        traces.push_back({plot_compare_label, &b});
      }
      const fs::path out = plot_out.empty() ? g.out_dir : fs::path(plot_out);
      for (const auto& p : write_histograms(traces, out, plot_bins)) {
        manifest.add_output(p);
        std::cout << "wrote " << p.string() << "\n";
      }

    } else if (*run_cmd) {
      manifest_path = g.out_dir / "manifest.json";
      const LlmConfig llm = llm_config(g);
      const SamplerConfig sampler = run_flags.config(g);
      manifest.config()["experiment"] = run_experiment;
      manifest.config()["llm"] = llm_json(llm);
      manifest.config()["sampler"] = sampler_json(sampler);
      SimConfig sim = run_sim.cfg;
      sim.seed = run_data_seed;

      if (run_experiment == "model") {
        if (run_desc_file.empty()) throw Error(ErrorCode::InvalidConfig, "--experiment model needs --description-file");
        const std::string description = read_text_file(run_desc_file);
        manifest.add_input("description", run_desc_file);
        const Dataset data = data_from(run_data, sim, manifest, g.out_dir);
        ElicitationLog log;
        const ModelSpec spec = elicit_model(description, llm, &log);
        manifest.config()["elicitation"] = log_json(log);
        write_text_file(g.out_dir / "model.json", serialize_model(spec, 2) + "\n");
        manifest.add_output(g.out_dir / "model.json");
        const FitResult fit = fit_model(spec, data, sampler);
        write_fit_outputs(fit, g.out_dir, "", manifest);
        const std::vector<LabeledTrace> traces{{"posterior", &fit.trace}};
        for (const auto& p : write_histograms(traces, g.out_dir / "plots", run_bins)) manifest.add_output(p);
        manifest.config()["seconds"] = fit.seconds;
        std::cout << render_text(fit.summary);
      } else {
        if (run_beliefs.empty() || run_manual.empty()) {
          throw Error(ErrorCode::InvalidConfig, "--experiment priors needs --beliefs and --manual-model");
        }
        manifest.add_input("beliefs", run_beliefs);
        manifest.add_input("manual_model", run_manual);
        const PriorRunInputs inputs = load_prior_run_inputs(run_beliefs, run_manual);
        const Dataset data = data_from(run_data, sim, manifest, g.out_dir);
        const PriorRunResult result = run_prior_elicitation(inputs, data, llm, sampler);
        manifest.config()["elicitation"] = log_json(result.log);
        write_text_file(g.out_dir / "manual_model.json", serialize_model(result.manual, 2) + "\n");
        write_text_file(g.out_dir / "llm_model.json", serialize_model(result.elicited, 2) + "\n");
        manifest.add_output(g.out_dir / "manual_model.json");
        manifest.add_output(g.out_dir / "llm_model.json");
        write_fit_outputs(result.manual_fit, g.out_dir, "manual_", manifest);
        write_fit_outputs(result.elicited_fit, g.out_dir, "llm_", manifest);
        const std::vector<LabeledTrace> traces{{"Manual Priors", &result.manual_fit.trace},
                                               {"LLM Priors", &result.elicited_fit.trace}};
        for (const auto& p : write_histograms(traces, g.out_dir / "plots", run_bins)) manifest.add_output(p);
        std::cout << "Manual priors\n" << render_text(result.manual_fit.summary) << "\nLLM priors\n"
                  << render_text(result.elicited_fit.summary);
      }

    } else if (*fixture_cmd) {
      std::string prompt;
      if (!fx_desc_file.empty()) {
        prompt = render_model_prompt(read_text_file(fx_desc_file));
      } else {
        prompt = render_prior_prompt(fx_param, belief_text(fx_belief, fx_belief_file));
      }
      const Fixture fixture{prompt_hash(prompt), read_text_file(fx_response_file), g.model_name, utc_now_iso8601()};
      FixtureStore store(g.fixtures_dir);
      store.save(fixture);
      manifest.add_output(store.path_for(fixture.prompt_hash));
      std::cout << store.path_for(fixture.prompt_hash).string() << "\n";
    }

    manifest.set_status("ok");
    manifest.write(manifest_path);
    return EXIT_SUCCESS;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    manifest.set_status("error", e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    manifest.set_status("error", e.what());
  }
  try {
    manifest.write(manifest_path);
  } catch (const std::exception&) {
  }
  return EXIT_FAILURE;
}

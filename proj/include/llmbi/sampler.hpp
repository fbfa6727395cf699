#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "llmbi/density.hpp"

namespace llmbi {

enum class Algorithm { Nuts, Rwm };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct SamplerConfig {
  Algorithm algorithm = Algorithm::Nuts;
  std::size_t chains = 4;
  std::size_t warmup_draws = 1000;
  std::size_t kept_draws = 1000;
  std::uint64_t seed = 0;
  double target_accept = 0.8;
  std::size_t max_tree_depth = 10;
  double step_size_init = 1.0;
  /// Run chains on separate threads. Output is identical either way.
  bool parallel = true;

  /// Throws Error(InvalidConfig).
  void validate() const;

  bool operator==(const SamplerConfig&) const = default;
};

struct DrawStats {
  double accept_prob = 0.0;
  /// NUTS tree depth; for RWM, 1 if the proposal was accepted, else 0.
  int tree_depth = 0;
  int n_leapfrog = 0;
  bool divergent = false;
  double step_size = 0.0;
  double energy = 0.0;

  bool operator==(const DrawStats&) const = default;
};

/// Post-warmup draws in constrained space.
struct Trace {
  std::vector<std::string> param_names;
  /// draws[chain] is row-major: kept_draws x param_names.size().
  std::vector<std::vector<double>> draws;
  /// stats[chain][draw]; may be empty for traces read without a sidecar.
  std::vector<std::vector<DrawStats>> stats;
  SamplerConfig config;

  std::size_t n_chains() const { return draws.size(); }
  std::size_t n_draws() const;
  std::size_t n_params() const { return param_names.size(); }
  double value(std::size_t chain, std::size_t draw, std::size_t param) const {
    return draws[chain][draw * param_names.size() + param];
  }
  /// One vector per chain for parameter `param`.
  std::vector<std::vector<double>> chains_for(std::size_t param) const;
  std::vector<double> pooled(std::size_t param) const;
  std::size_t param_index(std::string_view name) const;
  double divergence_rate() const;

  bool operator==(const Trace&) const = default;
};

/// Multi-chain NUTS (multinomial trajectory sampling, generalized U-turn
/// criterion) with dual-averaging step size and windowed diagonal
/// mass-matrix adaptation during warmup.
Trace nuts_sample(const DifferentiableDensity& target, const SamplerConfig& cfg);

/// Adaptive Gaussian random-walk Metropolis; per-coordinate proposal
/// scales are tuned during warmup toward an acceptance rate of 0.234.
Trace rwm_sample(const DifferentiableDensity& target, const SamplerConfig& cfg);

/// Dispatches on cfg.algorithm.
Trace sample_posterior(const DifferentiableDensity& target, const SamplerConfig& cfg);

/// CSV `chain,draw,<params...>` plus a JSON sidecar with config and per-draw
/// stats. Numbers are written in shortest round-trip form.
void write_trace(const Trace& trace, const std::filesystem::path& csv_path,
                 const std::filesystem::path& stats_path);
std::string trace_to_csv(const Trace& trace);
std::string trace_stats_to_json(const Trace& trace);

/// Throws Error(MalformedTrace). `stats_path` may be empty.
Trace read_trace(const std::filesystem::path& csv_path, const std::filesystem::path& stats_path = {});
Trace trace_from_csv(std::string_view csv);
void apply_stats_json(Trace& trace, std::string_view json_text);

}  // namespace llmbi

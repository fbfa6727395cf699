#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "llmbi/dataset.hpp"

namespace llmbi {

/// y = alpha + beta * X + eps, X ~ Uniform(x_low, x_high), eps ~ Normal(0, sigma).
struct SimConfig {
  double alpha = 2.5;
  double beta = 1.8;
  double sigma = 15.0;
  std::size_t n = 100;
  double x_low = 0.0;
  double x_high = 100.0;
  std::uint64_t seed = 42;

  /// Throws Error(InvalidConfig).
  void validate() const;
};

/// Columns "X" and "y". Per row, X is drawn before its noise term, both from
/// one Rng stream seeded with cfg.seed.
Dataset simulate_linear(const SimConfig& cfg);

/// Header row of column names, then numeric rows. LF or CRLF line endings.
/// Errors carry 1-based line numbers: MalformedCsv, NonNumericCell, RaggedRow.
Dataset parse_csv(std::string_view text);
Dataset load_csv(const std::filesystem::path& path);

std::string to_csv(const Dataset& data);
void save_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace llmbi

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "llmbi/error.hpp"
#include "llmbi/sampler.hpp"

namespace llmbi {

struct Warning {
  ErrorCode code;
  std::string message;
};

/// Split-chain potential scale reduction. Each chain is halved (an odd
/// trailing draw is dropped), giving 2m chains of length n:
///   R = sqrt(((n-1)/n W + B/n) / W)
/// Requires >= 4 draws per chain (Error(InsufficientSamples)). Returns NaN
/// and records a ZeroVariance warning when every draw is identical.
double split_rhat(std::span<const std::vector<double>> chains, std::vector<Warning>* warnings = nullptr);

/// Bulk effective sample size: pooled draws are rank-normalized, chains are
/// split, and the multi-chain autocorrelation is summed over Geyer's initial
/// monotone positive sequence. Same error and warning behaviour as split_rhat.
double ess_bulk(std::span<const std::vector<double>> chains, std::vector<Warning>* warnings = nullptr);

/// Narrowest interval spanning ceil(prob * n) consecutive sorted samples;
/// ties go to the lowest interval. Requires 0 < prob < 1 and >= 2 samples.
std::pair<double, double> hdi(std::span<const double> samples, double prob);

/// Argmax of a Gaussian KDE (Silverman bandwidth) on a 512-point grid over
/// [min, max]. Requires >= 10 samples.
double mode_estimate(std::span<const double> samples);

struct SummaryRow {
  std::string parameter;
  double mean = 0.0;
  double mode = 0.0;
  double sd = 0.0;
  double hdi_low = 0.0;
  double hdi_high = 0.0;
  double ess_bulk = 0.0;
  double r_hat = 0.0;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  double hdi_prob = 0.94;
  std::vector<Warning> warnings;

  const SummaryRow& row(std::string_view parameter) const;
};

/// Cells that cannot be computed are NaN with a warning attached.
SummaryTable summarize(const Trace& trace, double hdi_prob = 0.94);

/// "hdi_3%" / "hdi_97%" for 0.94.
std::pair<std::string, std::string> hdi_column_names(double hdi_prob);

std::string render_text(const SummaryTable& table);
std::string render_json(const SummaryTable& table);
std::string render_csv(const SummaryTable& table);

}  // namespace llmbi

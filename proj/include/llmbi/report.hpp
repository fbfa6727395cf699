#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "llmbi/sampler.hpp"

namespace llmbi {

struct Histogram {
  double lower = 0.0;
  double upper = 1.0;
  std::vector<std::size_t> counts;

  double bin_width() const { return (upper - lower) / static_cast<double>(counts.size()); }
};

/// Equal-width bins over [lower, upper]; the last bin is closed on the right
/// and samples outside the range are clamped into the end bins.
Histogram make_histogram(std::span<const double> samples, std::size_t bins, double lower, double upper);

struct HistogramSeries {
  std::string label;
  Histogram histogram;
};

/// `bin_lower,bin_upper,<label>...`; all series must share bin edges.
std::string histogram_csv(std::span<const HistogramSeries> series);

/// One panel, x axis labelled with the parameter name. Several series are
/// drawn as overlaid semi-transparent bars with a legend.
std::string histogram_svg(std::string_view parameter, std::span<const HistogramSeries> series);

struct LabeledTrace {
  std::string label;
  const Trace* trace = nullptr;
};

/// Writes `<param>_hist.csv` and `<param>_hist.svg` per parameter into
/// out_dir. With two or more traces the parameter lists must match
/// (Error(InvalidConfig) otherwise) and bins span the union of samples.
/// Returns the written paths.
std::vector<std::filesystem::path> write_histograms(std::span<const LabeledTrace> traces, const std::filesystem::path& out_dir,
                                                    std::size_t bins = 50);

/// Lower-case hex SHA-256 of a file's bytes. Throws Error(IoError).
std::string file_sha256(const std::filesystem::path& path);

/// One per CLI invocation: what ran, with which settings and inputs, and
/// where the outputs went.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  nlohmann::ordered_json& config() { return doc_["config"]; }
  void add_input(std::string_view role, const std::filesystem::path& path);
  void add_input_text(std::string_view role, std::string_view text);
  void add_output(const std::filesystem::path& path);
  void set_status(std::string_view status, std::string_view error = {});

  /// Stamps finished_at and writes pretty JSON.
  void write(const std::filesystem::path& path);
  const nlohmann::ordered_json& json() const { return doc_; }

 private:
  nlohmann::ordered_json doc_;
};

}  // namespace llmbi

#include "llmbi/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "llmbi/error.hpp"
#include "llmbi/numfmt.hpp"
#include "llmbi/util.hpp"

namespace llmbi {

Histogram make_histogram(std::span<const double> samples, std::size_t bins, double lower, double upper) {
  if (bins == 0) throw Error(ErrorCode::InvalidConfig, "bins must be >= 1");
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw Error(ErrorCode::InvalidConfig, "histogram range must satisfy lower < upper");
  }
  Histogram h{lower, upper, std::vector<std::size_t>(bins, 0)};
  const double width = h.bin_width();
  for (double x : samples) {
    auto k = static_cast<std::ptrdiff_t>(std::floor((x - lower) / width));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(k)];
  }
  return h;
}

std::string histogram_csv(std::span<const HistogramSeries> series) {
  if (series.empty()) throw Error(ErrorCode::InvalidConfig, "no histogram series");
  const Histogram& first = series.front().histogram;
  for (const auto& s : series) {
    if (s.histogram.counts.size() != first.counts.size() || s.histogram.lower != first.lower ||
        s.histogram.upper != first.upper) {
      throw Error(ErrorCode::InvalidConfig, "histogram series do not share bin edges");
    }
  }
  std::string out = "bin_lower,bin_upper";
  for (const auto& s : series) {
    std::string label = s.label;
    std::replace(label.begin(), label.end(), ',', ' ');
    out += "," + label;
  }
  out += "\n";
  const double width = first.bin_width();
  for (std::size_t k = 0; k < first.counts.size(); ++k) {
    const double lo = first.lower + width * static_cast<double>(k);
    const double hi = k + 1 == first.counts.size() ? first.upper : first.lower + width * static_cast<double>(k + 1);
    out += format_double(lo) + "," + format_double(hi);
    for (const auto& s : series) out += "," + std::to_string(s.histogram.counts[k]);
    out += "\n";
  }
  return out;
}

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v, int precision = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};

}  // namespace

std::string histogram_svg(std::string_view parameter, std::span<const HistogramSeries> series) {
  if (series.empty()) throw Error(ErrorCode::InvalidConfig, "no histogram series");
  constexpr double width = 640, height = 400;
  constexpr double left = 60, right = 20, top = 30, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  const Histogram& first = series.front().histogram;
  std::size_t max_count = 1;
  for (const auto& s : series) {
    for (auto c : s.histogram.counts) max_count = std::max(max_count, c);
  }
  const double bins = static_cast<double>(first.counts.size());
  const double opacity = series.size() > 1 ? 0.5 : 0.8;

  std::ostringstream svg;
  svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << height << R"(" viewBox="0 0 )"
      << width << " " << height << R"(" font-family="sans-serif" font-size="12">)" << "\n";
  svg << R"(<rect width="100%" height="100%" fill="white"/>)" << "\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& h = series[si].histogram;
    svg << R"(<g fill=")" << kColors[si % 4] << R"(" fill-opacity=")" << opacity << R"(">)" << "\n";
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      if (h.counts[k] == 0) continue;
      const double x = left + plot_w * static_cast<double>(k) / bins;
      const double bar_h = plot_h * static_cast<double>(h.counts[k]) / static_cast<double>(max_count);
      svg << R"(<rect x=")" << fmt(x) << R"(" y=")" << fmt(top + plot_h - bar_h) << R"(" width=")" << fmt(plot_w / bins)
          << R"(" height=")" << fmt(bar_h) << R"("/>)" << "\n";
    }
    svg << "</g>\n";
  }

  svg << R"(<g stroke="black" stroke-width="1">)" << "\n";
  svg << R"(<line x1=")" << left << R"(" y1=")" << top + plot_h << R"(" x2=")" << left + plot_w << R"(" y2=")" << top + plot_h
      << R"("/>)" << "\n";
  svg << R"(<line x1=")" << left << R"(" y1=")" << top << R"(" x2=")" << left << R"(" y2=")" << top + plot_h << R"("/>)"
      << "\n";
  for (int t = 0; t <= 4; ++t) {
    const double x = left + plot_w * t / 4.0;
    svg << R"(<line x1=")" << fmt(x) << R"(" y1=")" << top + plot_h << R"(" x2=")" << fmt(x) << R"(" y2=")" << top + plot_h + 5
        << R"("/>)" << "\n";
  }
  svg << "</g>\n";
  for (int t = 0; t <= 4; ++t) {
    const double x = left + plot_w * t / 4.0;
    const double value = first.lower + (first.upper - first.lower) * t / 4.0;
    svg << R"(<text x=")" << fmt(x) << R"(" y=")" << top + plot_h + 18 << R"(" text-anchor="middle">)" << tick_label(value)
        << "</text>\n";
  }
  svg << R"(<text x=")" << left - 8 << R"(" y=")" << top + 4 << R"(" text-anchor="end">)" << max_count << "</text>\n";
  svg << R"(<text x=")" << left - 8 << R"(" y=")" << top + plot_h << R"(" text-anchor="end">0</text>)" << "\n";
  svg << R"(<text x=")" << left + plot_w / 2 << R"(" y=")" << height - 10 << R"(" text-anchor="middle" font-size="14">)"
      << xml_escape(parameter) << "</text>\n";
  svg << R"(<text x="15" y=")" << top + plot_h / 2 << R"(" text-anchor="middle" transform="rotate(-90 15 )"
      << top + plot_h / 2 << R"svg()">count</text>)svg" << "\n";

  if (series.size() > 1) {
    for (std::size_t si = 0; si < series.size(); ++si) {
      const double y = top + 5 + 18.0 * static_cast<double>(si);
      svg << R"(<rect x=")" << left + plot_w - 150 << R"(" y=")" << y << R"(" width="12" height="12" fill=")" << kColors[si % 4]
          << R"(" fill-opacity=")" << opacity << R"("/>)" << "\n";
      svg << R"(<text x=")" << left + plot_w - 132 << R"(" y=")" << y + 10 << R"(">)" << xml_escape(series[si].label)
          << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> write_histograms(std::span<const LabeledTrace> traces, const std::filesystem::path& out_dir,
                                                    std::size_t bins) {
  if (traces.empty()) throw Error(ErrorCode::InvalidConfig, "no traces to plot");
  const auto& names = traces.front().trace->param_names;
  for (const auto& t : traces) {
    if (t.trace->param_names != names) {
      auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& n : v) s += (s.empty() ? "" : ",") + n;
        return s;
      };
      throw Error(ErrorCode::InvalidConfig, "parameter sets differ: [" + join(names) + "] vs [" + join(t.trace->param_names) + "]");
    }
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (std::size_t p = 0; p < names.size(); ++p) {
    std::vector<std::vector<double>> pooled;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& t : traces) {
      pooled.push_back(t.trace->pooled(p));
      for (double x : pooled.back()) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    }
    std::vector<HistogramSeries> series;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      series.push_back({traces[i].label, make_histogram(pooled[i], bins, lo, hi)});
    }
    const auto csv_path = out_dir / (names[p] + "_hist.csv");
    const auto svg_path = out_dir / (names[p] + "_hist.svg");
    std::ofstream(csv_path, std::ios::binary) << histogram_csv(series);
    std::ofstream(svg_path, std::ios::binary) << histogram_svg(names[p], series);
    if (!std::filesystem::exists(csv_path) || !std::filesystem::exists(svg_path)) {
      throw Error(ErrorCode::IoError, "cannot write histograms under '" + out_dir.string() + "'");
    }
    written.push_back(csv_path);
    written.push_back(svg_path);
  }
  return written;
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

RunManifest::RunManifest(std::string command) {
  doc_["command"] = std::move(command);
  doc_["started_at"] = utc_now_iso8601();
  doc_["finished_at"] = nullptr;
  doc_["status"] = "running";
  doc_["config"] = nlohmann::ordered_json::object();
  doc_["inputs"] = nlohmann::ordered_json::array();
  doc_["outputs"] = nlohmann::ordered_json::array();
}

void RunManifest::add_input(std::string_view role, const std::filesystem::path& path) {
  doc_["inputs"].push_back({{"role", role}, {"path", path.string()}, {"sha256", file_sha256(path)}});
}

void RunManifest::add_input_text(std::string_view role, std::string_view text) {
  doc_["inputs"].push_back({{"role", role}, {"sha256", sha256_hex(text)}});
}

void RunManifest::add_output(const std::filesystem::path& path) { doc_["outputs"].push_back(path.string()); }

void RunManifest::set_status(std::string_view status, std::string_view error) {
  doc_["status"] = status;
  if (!error.empty()) doc_["error"] = error;
}

void RunManifest::write(const std::filesystem::path& path) {
  doc_["finished_at"] = utc_now_iso8601();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << doc_.dump(2) << "\n";
}

}  // namespace llmbi

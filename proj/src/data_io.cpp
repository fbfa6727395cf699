#include "llmbi/data_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "llmbi/error.hpp"
#include "llmbi/numfmt.hpp"
#include "llmbi/rng.hpp"

namespace llmbi {

void SimConfig::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidConfig, "sigma must be >= 0");
  if (n < 1) throw Error(ErrorCode::InvalidConfig, "n must be >= 1");
  if (!(x_low < x_high)) throw Error(ErrorCode::InvalidConfig, "x_low must be < x_high");
  if (!std::isfinite(alpha) || !std::isfinite(beta)) throw Error(ErrorCode::InvalidConfig, "alpha and beta must be finite");
}

Dataset simulate_linear(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<double> x(cfg.n);
  std::vector<double> y(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    x[i] = rng.uniform(cfg.x_low, cfg.x_high);
    const double noise = rng.normal();
    y[i] = cfg.alpha + cfg.beta * x[i] + cfg.sigma * noise;
  }
  Dataset data;
  data.add_column("X", std::move(x));
  data.add_column("y", std::move(y));
  return data;
}

Dataset parse_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < text.size();) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty() || lines.front().empty()) throw Error(ErrorCode::MalformedCsv, "line 1: missing header", 1);

  auto split = [](std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };

  std::string_view header_line = lines.front();
  if (header_line.substr(0, 3) == "\xEF\xBB\xBF") header_line.remove_prefix(3);
  std::vector<std::string> names;
  for (auto cell : split(header_line)) {
    cell = trim(cell);
    if (cell.empty()) throw Error(ErrorCode::MalformedCsv, "line 1: empty column name", 1);
    names.emplace_back(cell);
  }

  std::vector<std::vector<double>> columns(names.size());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    if (lines[li].empty()) {
      // Only trailing blank lines are tolerated.
      bool rest_blank = true;
      for (std::size_t k = li; k < lines.size(); ++k) rest_blank = rest_blank && lines[k].empty();
      if (rest_blank) break;
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) + ": blank line", line_no);
    }
    const auto cells = split(lines[li]);
    if (cells.size() != names.size()) {
      throw Error(ErrorCode::RaggedRow,
                  "line " + std::to_string(line_no) + ": expected " + std::to_string(names.size()) + " cells, got " +
                      std::to_string(cells.size()),
                  line_no);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto value = parse_double(cells[c]);
      if (!value || !std::isfinite(*value)) {
        throw Error(ErrorCode::NonNumericCell,
                    "line " + std::to_string(line_no) + ", column '" + names[c] + "': '" + std::string(cells[c]) +
                        "' is not a finite number",
                    line_no);
      }
      columns[c].push_back(*value);
    }
  }

  Dataset data;
  try {
    for (std::size_t c = 0; c < names.size(); ++c) data.add_column(names[c], std::move(columns[c]));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedCsv, "line 1: " + e.detail(), 1);
  }
  return data;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string to_csv(const Dataset& data) {
  std::string out;
  const auto& names = data.names();
  for (std::size_t c = 0; c < names.size(); ++c) out += (c ? "," : "") + names[c];
  out += "\n";
  std::vector<std::span<const double>> cols;
  for (const auto& name : names) cols.push_back(data.column(name));
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += ",";
      out += format_double(cols[c][r]);
    }
    out += "\n";
  }
  return out;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << to_csv(data);
}

}  // namespace llmbi

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "llmbi/error.hpp"
#include "llmbi/numfmt.hpp"
#include "llmbi/sampler.hpp"

namespace llmbi {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedTrace, "line " + std::to_string(line) + ": " + what, line);
}

std::size_t parse_index(std::string_view cell, std::size_t line) {
  const auto v = parse_double(cell);
  if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
    malformed(line, "expected a non-negative integer index, got '" + std::string(cell) + "'");
  }
  return static_cast<std::size_t>(*v);
}

}  // namespace

std::string trace_to_csv(const Trace& trace) {
  std::string out = "chain,draw";
  for (const auto& name : trace.param_names) out += "," + name;
  out += "\n";
  for (std::size_t c = 0; c < trace.n_chains(); ++c) {
    for (std::size_t d = 0; d < trace.n_draws(); ++d) {
      out += std::to_string(c) + "," + std::to_string(d);
      for (std::size_t p = 0; p < trace.n_params(); ++p) out += "," + format_double(trace.value(c, d, p));
      out += "\n";
    }
  }
  return out;
}

std::string trace_stats_to_json(const Trace& trace) {
  const SamplerConfig& cfg = trace.config;
  json config{{"algorithm", std::string(to_string(cfg.algorithm))},
              {"chains", cfg.chains},
              {"warmup_draws", cfg.warmup_draws},
              {"kept_draws", cfg.kept_draws},
              {"seed", cfg.seed},
              {"target_accept", cfg.target_accept},
              {"max_tree_depth", cfg.max_tree_depth},
              {"step_size_init", cfg.step_size_init},
              {"parallel", cfg.parallel}};
  json chains = json::array();
  for (const auto& chain : trace.stats) {
    json accept = json::array(), depth = json::array(), leapfrog = json::array(), divergent = json::array(),
         step = json::array(), energy = json::array();
    for (const auto& s : chain) {
      accept.push_back(s.accept_prob);
      depth.push_back(s.tree_depth);
      leapfrog.push_back(s.n_leapfrog);
      divergent.push_back(s.divergent);
      step.push_back(s.step_size);
      energy.push_back(s.energy);
    }
    chains.push_back(json{{"accept_prob", accept},
                          {"tree_depth", depth},
                          {"n_leapfrog", leapfrog},
                          {"divergent", divergent},
                          {"step_size", step},
                          {"energy", energy}});
  }
  return json{{"param_names", trace.param_names}, {"config", config}, {"chains", chains}}.dump(1);
}

void write_trace(const Trace& trace, const std::filesystem::path& csv_path,
                 const std::filesystem::path& stats_path) {
  write_file(csv_path, trace_to_csv(trace));
  if (!stats_path.empty()) write_file(stats_path, trace_stats_to_json(trace));
}

Trace trace_from_csv(std::string_view csv) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::MalformedTrace, "trace file is empty");

  const auto header = split_commas(lines[0]);
  if (header.size() < 3 || header[0] != "chain" || header[1] != "draw") {
    malformed(1, "header must be chain,draw,<param>,...");
  }
  Trace trace;
  for (std::size_t i = 2; i < header.size(); ++i) trace.param_names.emplace_back(header[i]);
  if (lines.size() < 2) throw Error(ErrorCode::MalformedTrace, "trace file has no draws");

  const std::size_t n_params = trace.param_names.size();
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    const auto cells = split_commas(lines[li]);
    if (cells.size() != header.size()) malformed(line_no, "wrong number of cells");
    const std::size_t chain = parse_index(cells[0], line_no);
    const std::size_t draw = parse_index(cells[1], line_no);
    if (chain == trace.draws.size()) {
      trace.draws.emplace_back();
    } else if (chain + 1 != trace.draws.size()) {
      malformed(line_no, "chains must appear in order starting at 0");
    }
    auto& values = trace.draws.back();
    if (draw != values.size() / n_params) malformed(line_no, "draws must be consecutive starting at 0");
    for (std::size_t p = 0; p < n_params; ++p) {
      const auto v = parse_double(cells[p + 2]);
      if (!v) malformed(line_no, "non-numeric value '" + std::string(cells[p + 2]) + "'");
      values.push_back(*v);
    }
  }
  for (const auto& chain : trace.draws) {
    if (chain.size() != trace.draws.front().size()) {
      throw Error(ErrorCode::MalformedTrace, "chains have different draw counts");
    }
  }
  trace.config.chains = trace.draws.size();
  trace.config.kept_draws = trace.n_draws();
  return trace;
}

void apply_stats_json(Trace& trace, std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
    const json& cfg = doc.at("config");
    trace.config.algorithm = parse_algorithm(cfg.at("algorithm").get<std::string>());
    trace.config.chains = cfg.at("chains").get<std::size_t>();
    trace.config.warmup_draws = cfg.at("warmup_draws").get<std::size_t>();
    trace.config.kept_draws = cfg.at("kept_draws").get<std::size_t>();
    trace.config.seed = cfg.at("seed").get<std::uint64_t>();
    trace.config.target_accept = cfg.at("target_accept").get<double>();
    trace.config.max_tree_depth = cfg.at("max_tree_depth").get<std::size_t>();
    trace.config.step_size_init = cfg.at("step_size_init").get<double>();
    trace.config.parallel = cfg.at("parallel").get<bool>();
    if (doc.at("param_names").get<std::vector<std::string>>() != trace.param_names) {
      throw Error(ErrorCode::MalformedTrace, "stats sidecar parameter names do not match the trace");
    }
    trace.stats.clear();
    for (const json& chain : doc.at("chains")) {
      const auto& accept = chain.at("accept_prob");
      std::vector<DrawStats> stats(accept.size());
      for (std::size_t i = 0; i < stats.size(); ++i) {
        stats[i].accept_prob = accept.at(i).get<double>();
        stats[i].tree_depth = chain.at("tree_depth").at(i).get<int>();
        stats[i].n_leapfrog = chain.at("n_leapfrog").at(i).get<int>();
        stats[i].divergent = chain.at("divergent").at(i).get<bool>();
        stats[i].step_size = chain.at("step_size").at(i).get<double>();
        stats[i].energy = chain.at("energy").at(i).get<double>();
      }
      trace.stats.push_back(std::move(stats));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedTrace, std::string("stats sidecar: ") + e.what());
  }
  if (trace.stats.size() != trace.n_chains()) {
    throw Error(ErrorCode::MalformedTrace, "stats sidecar chain count does not match the trace");
  }
}

Trace read_trace(const std::filesystem::path& csv_path, const std::filesystem::path& stats_path) {
  Trace trace = trace_from_csv(read_file(csv_path));
  if (!stats_path.empty()) apply_stats_json(trace, read_file(stats_path));
  return trace;
}

}  // namespace llmbi

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "llmbi/report.hpp"
#include "llmbi/util.hpp"
#include "test_support.hpp"

using namespace llmbi;
using llmbi::testing::error_code_of;

namespace {

Trace normal_trace(std::vector<std::string> names, std::size_t chains, std::size_t draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Trace t;
  t.param_names = std::move(names);
  t.draws.assign(chains, std::vector<double>(draws * t.param_names.size()));
  for (auto& c : t.draws) {
    for (auto& x : c) x = n(rng);
  }
  return t;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("llmbi_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("histogram binning") {
  const std::vector<double> xs{0.0, 0.1, 0.5, 0.99, 1.0, -3.0, 7.0};
  const Histogram h = make_histogram(xs, 2, 0.0, 1.0);
  CHECK(h.counts == std::vector<std::size_t>{3, 4});
  CHECK(h.bin_width() == 0.5);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) == xs.size());
  CHECK(error_code_of([&] { make_histogram(xs, 0, 0.0, 1.0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("histogram csv and svg") {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 2, 3, 5};
  const std::vector<HistogramSeries> series{{"manual", make_histogram(a, 4, 1, 5)}, {"llm", make_histogram(b, 4, 1, 5)}};
  const std::string csv = histogram_csv(series);
  CHECK(csv.rfind("bin_lower,bin_upper,manual,llm\n1,2,1,0\n", 0) == 0);

  const std::string svg = histogram_svg("beta", series);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find(">beta</text>") != std::string::npos);
  CHECK(svg.find(">count</text>") != std::string::npos);
  CHECK(svg.find(">manual</text>") != std::string::npos);
  CHECK(svg.find(">llm</text>") != std::string::npos);
  CHECK(svg.find("opacity=\"0.5\"") != std::string::npos);

  const std::string single = histogram_svg("alpha", std::vector<HistogramSeries>{series[0]});
  CHECK(single.find(">manual</text>") == std::string::npos);
}

TEST_CASE("histogram files per parameter") {
  const Trace first = normal_trace({"alpha", "beta", "sigma"}, 4, 250, 1);
  const Trace second = normal_trace({"alpha", "beta", "sigma"}, 4, 250, 2);
  const auto dir = scratch_dir("hist");
  const std::vector<LabeledTrace> both{{"manual", &first}, {"llm", &second}};
  const auto written = write_histograms(both, dir, 30);
  CHECK(written.size() == 6);
  for (const std::string p : {"alpha", "beta", "sigma"}) {
    REQUIRE(std::filesystem::exists(dir / (p + "_hist.svg")));
    std::istringstream csv(slurp(dir / (p + "_hist.csv")));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "bin_lower,bin_upper,manual,llm");
    std::size_t rows = 0, sum_a = 0, sum_b = 0;
    while (std::getline(csv, line)) {
      ++rows;
      std::istringstream cells(line);
      std::string lo, hi, ca, cb;
      std::getline(cells, lo, ',');
      std::getline(cells, hi, ',');
      std::getline(cells, ca, ',');
      std::getline(cells, cb, ',');
      sum_a += std::stoul(ca);
      sum_b += std::stoul(cb);
    }
    CHECK(rows == 30);
    CHECK(sum_a == 1000);
    CHECK(sum_b == 1000);
  }

  const Trace other = normal_trace({"alpha", "gamma"}, 1, 10, 3);
  const std::vector<LabeledTrace> mismatched{{"a", &first}, {"b", &other}};
  CHECK(error_code_of([&] { write_histograms(mismatched, dir); }) == ErrorCode::InvalidConfig);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run manifest") {
  const auto dir = scratch_dir("manifest");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "data.csv") << "abc";
  RunManifest m("fit");
  m.config()["seed"] = 42;
  m.add_input("data", dir / "data.csv");
  m.add_input_text("belief", "abc");
  m.add_output(dir / "trace.csv");
  m.set_status("ok");
  m.write(dir / "fit.manifest.json");

  const auto doc = nlohmann::json::parse(slurp(dir / "fit.manifest.json"));
  CHECK(doc["command"] == "fit");
  CHECK(doc["status"] == "ok");
  CHECK(doc["config"]["seed"] == 42);
  CHECK(doc.contains("started_at"));
  CHECK(doc.contains("finished_at"));
  const std::string abc = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";
  CHECK(doc["inputs"].dump().find(abc) != std::string::npos);
  CHECK(doc["outputs"].dump().find("trace.csv") != std::string::npos);
  CHECK(file_sha256(dir / "data.csv") == abc);
  CHECK(sha256_hex("abc") == abc);
  CHECK(error_code_of([&] { file_sha256(dir / "missing"); }) == ErrorCode::IoError);
  std::filesystem::remove_all(dir);
}

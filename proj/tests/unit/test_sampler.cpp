#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "llmbi/data_io.hpp"
#include "llmbi/diagnostics.hpp"
#include "llmbi/posterior.hpp"
#include "llmbi/sampler.hpp"
#include "test_support.hpp"

using namespace llmbi;
using llmbi::testing::error_code_of;
using llmbi::testing::GaussianTarget;

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1));
}

SamplerConfig config(Algorithm algorithm, std::size_t draws, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.algorithm = algorithm;
  cfg.warmup_draws = 1000;
  cfg.kept_draws = draws;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("nuts on a 3-D standard normal") {
  const auto target = GaussianTarget::standard(3);
  const Trace t = nuts_sample(target, config(Algorithm::Nuts, 1000, 1));
  REQUIRE(t.n_chains() == 4);
  REQUIRE(t.n_draws() == 1000);
  for (std::size_t p = 0; p < 3; ++p) {
    const auto xs = t.pooled(p);
    CHECK(std::abs(mean_of(xs)) <= 0.05);
    CHECK(std::abs(sd_of(xs) - 1.0) <= 0.05);
    CHECK(split_rhat(t.chains_for(p)) <= 1.01);
  }
  double accept = 0.0;
  std::size_t n = 0;
  for (const auto& chain : t.stats) {
    for (const auto& s : chain) {
      accept += s.accept_prob;
      ++n;
      CHECK_FALSE(s.divergent);
    }
  }
  CHECK(std::abs(accept / n - 0.8) <= 0.1);
}

TEST_CASE("same seed gives a bit-identical trace") {
  const auto target = GaussianTarget::standard(2);
  for (Algorithm a : {Algorithm::Nuts, Algorithm::Rwm}) {
    SamplerConfig cfg = config(a, 200, 5);
    cfg.warmup_draws = 200;
    const Trace first = sample_posterior(target, cfg);
    CHECK(first == sample_posterior(target, cfg));
    SamplerConfig serial = cfg;
    serial.parallel = false;
    Trace second = sample_posterior(target, serial);
    second.config.parallel = true;
    CHECK(first == second);
    SamplerConfig other = cfg;
    other.seed = 6;
    CHECK_FALSE(first.draws == sample_posterior(target, other).draws);
  }
}

TEST_CASE("random-walk Metropolis on a standard normal") {
  const auto target = GaussianTarget::standard(3);
  const Trace t = rwm_sample(target, config(Algorithm::Rwm, 2000, 3));
  REQUIRE(t.n_draws() == 2000);
  for (std::size_t p = 0; p < 3; ++p) CHECK(std::abs(mean_of(t.pooled(p))) <= 0.1);
}

TEST_CASE("draws stay inside a bounded prior's support") {
  const char* json = R"json({"priors": {
    "a": {"distribution": "Uniform", "params": {"lower": 2, "upper": 3}},
    "s": {"distribution": "HalfNormal", "params": {"sigma": 1}}},
   "likelihood": {"distribution": "Normal", "formula": "a", "noise_param": "s"}})json";
  Dataset empty;
  empty.add_column("y", {});
  BuildOptions opts;
  opts.allow_empty_data = true;
  const PosteriorFn pf = build_posterior(validate_model(parse_model_json(json), empty.name_set()), empty, opts);
  for (Algorithm a : {Algorithm::Nuts, Algorithm::Rwm}) {
    const Trace t = sample_posterior(pf, config(a, 500, 2));
    for (std::size_t c = 0; c < t.n_chains(); ++c) {
      for (std::size_t d = 0; d < t.n_draws(); ++d) {
        REQUIRE(t.value(c, d, 0) >= 2.0);
        REQUIRE(t.value(c, d, 0) <= 3.0);
        REQUIRE(t.value(c, d, 1) > 0.0);
      }
    }
    // Uniform prior alone: pooled mean near the midpoint.
    CHECK(std::abs(mean_of(t.pooled(0)) - 2.5) <= 0.05);
  }
}

TEST_CASE("empirical CDF matches the normal CDF") {
  const auto target = GaussianTarget::standard(1);
  const Trace t = nuts_sample(target, config(Algorithm::Nuts, 10000, 11));
  auto xs = t.pooled(0);
  const double n_eff = std::min<double>(ess_bulk(t.chains_for(0)), xs.size());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double c = boost::math::cdf(boost::math::normal(), xs[i]);
    stat = std::max({stat, (i + 1) / n - c, c - i / n});
  }
  CHECK(n_eff >= 1e4);
  CHECK(stat < 1.95 / std::sqrt(n_eff));
}

TEST_CASE("known-sigma regression matches the conjugate posterior") {
  SimConfig sim;
  sim.n = 30;
  sim.seed = 9;
  const Dataset data = simulate_linear(sim);
  const char* json = R"json({"priors": {
    "alpha": {"distribution": "Normal", "params": {"mu": 0, "sigma": 10}},
    "beta": {"distribution": "Normal", "params": {"mu": 1, "sigma": 2}},
    "sigma": {"distribution": "HalfNormal", "params": {"sigma": 15}}},
   "likelihood": {"distribution": "Normal", "formula": "alpha + beta * X"}})json";
  BuildOptions opts;
  opts.fixed["sigma"] = 15.0;
  const PosteriorFn pf = build_posterior(validate_model(parse_model_json(json), data.name_set()), data, opts);

  // Precision = diag(1/100, 1/4) + X'X / 225; mean = Cov (prior term + X'y / 225).
  const auto x = data.column("X");
  const auto y = data.column("y");
  double sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sxx += x[i] * x[i];
    sy += y[i];
    sxy += x[i] * y[i];
  }
  const double s2 = 225.0;
  const double p11 = 1.0 / 100 + x.size() / s2, p12 = sx / s2, p22 = 1.0 / 4 + sxx / s2;
  const double det = p11 * p22 - p12 * p12;
  const double c11 = p22 / det, c12 = -p12 / det, c22 = p11 / det;
  const double b1 = sy / s2, b2 = 1.0 / 4 + sxy / s2;
  const double m_alpha = c11 * b1 + c12 * b2, m_beta = c12 * b1 + c22 * b2;

  const Trace t = nuts_sample(pf, config(Algorithm::Nuts, 1000, 4));
  const double expect_mean[] = {m_alpha, m_beta};
  const double expect_sd[] = {std::sqrt(c11), std::sqrt(c22)};
  for (std::size_t p = 0; p < 2; ++p) {
    const auto xs = t.pooled(p);
    const double mcse = sd_of(xs) / std::sqrt(ess_bulk(t.chains_for(p)));
    INFO(t.param_names[p]);
    CHECK(std::abs(mean_of(xs) - expect_mean[p]) <= 3 * mcse);
    CHECK(std::abs(sd_of(xs) / expect_sd[p] - 1.0) <= 0.1);
  }
}

TEST_CASE("trace files round trip exactly") {
  const auto target = GaussianTarget::standard(2);
  SamplerConfig cfg = config(Algorithm::Nuts, 50, 8);
  cfg.warmup_draws = 50;
  const Trace t = nuts_sample(target, cfg);
  const auto dir = std::filesystem::temp_directory_path();
  write_trace(t, dir / "llmbi_trace.csv", dir / "llmbi_trace_stats.json");
  const Trace back = read_trace(dir / "llmbi_trace.csv", dir / "llmbi_trace_stats.json");
  CHECK(back == t);
  const Trace bare = read_trace(dir / "llmbi_trace.csv");
  CHECK(bare.draws == t.draws);
  CHECK(bare.stats.empty());
  std::filesystem::remove(dir / "llmbi_trace.csv");
  std::filesystem::remove(dir / "llmbi_trace_stats.json");

  CHECK(trace_from_csv("chain,draw,x0\n0,0,1.5\n0,1,2.5\n").n_draws() == 2);
  CHECK(error_code_of([] { trace_from_csv("chain,draw,x0\n0,0,abc\n"); }) == ErrorCode::MalformedTrace);
  CHECK(error_code_of([] { trace_from_csv("a,b\n"); }) == ErrorCode::MalformedTrace);
}

TEST_CASE("configuration errors") {
  const auto target = GaussianTarget::standard(1);
  SamplerConfig cfg;
  cfg.chains = 0;
  CHECK(error_code_of([&] { nuts_sample(target, cfg); }) == ErrorCode::InvalidConfig);
  cfg = {};
  cfg.target_accept = 1.0;
  CHECK(error_code_of([&] { cfg.validate(); }) == ErrorCode::InvalidConfig);
  cfg = {};
  cfg.step_size_init = 0.0;
  CHECK(error_code_of([&] { cfg.validate(); }) == ErrorCode::InvalidConfig);
  CHECK(error_code_of([] { parse_algorithm("hmc"); }) == ErrorCode::InvalidConfig);
  CHECK(parse_algorithm("rwm") == Algorithm::Rwm);
  CHECK(to_string(Algorithm::Nuts) == "nuts");
}

#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/normal.hpp>

#include "llmbi/data_io.hpp"
#include "llmbi/error.hpp"
#include "llmbi/posterior.hpp"
#include "test_support.hpp"

using namespace llmbi;
using llmbi::testing::error_code_of;

namespace {

const char* kModelII = R"({"priors": {
  "alpha": {"distribution": "Uniform", "params": {"lower": -25, "upper": 25}},
  "beta": {"distribution": "Exponential", "params": {"lam": 0.5}},
  "sigma": {"distribution": "HalfNormal", "params": {"sigma": 15}}},
 "likelihood": {"distribution": "Normal", "formula": "alpha + beta * X"}})";

PosteriorFn build(const char* json, const Dataset& data, const BuildOptions& opts = {}) {
  return build_posterior(validate_model(parse_model_json(json), data.name_set()), data, opts);
}

Dataset one_row(double x, double y) {
  Dataset d;
  d.add_column("X", {x});
  d.add_column("y", {y});
  return d;
}

double boost_normal_logpdf(double y, double mu, double sd) {
  return std::log(boost::math::pdf(boost::math::normal(mu, sd), y));
}

}  // namespace

TEST_CASE("hand-summed density on a one-row dataset") {
  const PosteriorFn pf = build(kModelII, one_row(0, 0));
  const std::vector<double> z = pf.unconstrain(std::vector<double>{0.0, 2.0, 15.0});
  // log Uniform(-25,25) + log Exp(0.5) at 2 + log HalfNormal(15) at 15
  // + Jacobians: logit at the midpoint 50/4, log transform x itself
  // + Normal(0 | 0, 15).
  const double expected = std::log(1.0 / 50.0) + std::log(boost::math::pdf(boost::math::exponential(0.5), 2.0)) +
                          std::log(2.0 * boost::math::pdf(boost::math::normal(0, 15), 15.0)) + std::log(12.5) +
                          std::log(2.0) + std::log(15.0) + boost_normal_logpdf(0, 0, 15);
  CHECK(pf.log_density(z) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("prior-only density with the empty-data hook") {
  Dataset empty;
  empty.add_column("X", {});
  empty.add_column("y", {});
  BuildOptions opts;
  opts.allow_empty_data = true;
  const PosteriorFn pf = build(kModelII, empty, opts);
  const std::vector<double> z{0.3, -0.4, 1.1};
  double expected = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const Transform& t = pf.transforms()[i];
    expected += log_pdf(pf.priors()[i], t.forward(z[i])) + t.log_jacobian(z[i]);
  }
  CHECK(pf.log_density(z) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(error_code_of([&] { build(kModelII, empty); }) == ErrorCode::InvalidDataset);
}

TEST_CASE("constrain and unconstrain") {
  const PosteriorFn pf = build(kModelII, simulate_linear({}));
  const auto named = pf.constrain_named(std::vector<double>{0, 0, 0});
  REQUIRE(named.size() == 3);
  CHECK(named[0] == std::pair<std::string, double>{"alpha", 0.0});
  CHECK(named[1] == std::pair<std::string, double>{"beta", 1.0});
  CHECK(named[2] == std::pair<std::string, double>{"sigma", 1.0});
  CHECK(std::abs(pf.constrain(std::vector<double>{40, 0, 0})[0] - 25.0) <= 1e-12);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 2);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> z{n(rng), n(rng), n(rng)};
    const auto back = pf.unconstrain(pf.constrain(z));
    for (int k = 0; k < 3; ++k) CHECK(back[k] == doctest::Approx(z[k]).epsilon(1e-12).scale(1.0));
  }
  CHECK(error_code_of([&] { pf.constrain(std::vector<double>{0, 0}); }) == ErrorCode::DimensionMismatch);
  CHECK(error_code_of([&] { pf.log_density(std::vector<double>{0, 0, 0, 0}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("gradient matches central differences") {
  const PosteriorFn pf = build(kModelII, simulate_linear({}));
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 1);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> z{n(rng) * 0.2, std::log(1.8) + 0.1 * n(rng), std::log(15.0) + 0.2 * n(rng)};
    std::vector<double> grad(3);
    const double f = pf.log_density_gradient(z, grad);
    CHECK(f == pf.log_density(z));
    for (std::size_t k = 0; k < 3; ++k) {
      const double h = 1e-5 * std::max(1.0, std::abs(z[k]));
      auto fk = [&](double t) {
        auto zz = z;
        zz[k] = t;
        return pf.log_density(zz);
      };
      const double fd = testing::central_difference(fk, z[k], h);
      // FD on a density of magnitude ~400 carries ~1e-8 absolute noise.
      CHECK(std::abs(grad[k] - fd) <= 1e-6 * std::max(std::abs(grad[k]), 1.0) + 1e-5);
    }
  }
}

TEST_CASE("density is deterministic and prefers the truth") {
  const Dataset data = simulate_linear({});
  const PosteriorFn pf = build(kModelII, data);
  const std::vector<double> z0{0, 0, 0};
  CHECK(std::isfinite(pf.log_density(z0)));
  CHECK(pf.log_density(z0) == build(kModelII, data).log_density(z0));

  const auto truth = pf.unconstrain(std::vector<double>{2.5, 1.8, 15.0});
  const auto far = pf.unconstrain(std::vector<double>{24.9, 100.0, 100.0});
  CHECK(pf.log_density(truth) > pf.log_density(far));
}

TEST_CASE("row contributions are additive") {
  const Dataset data = simulate_linear({});
  const Dataset a = data.slice(0, 40);
  const Dataset b = data.slice(40, 100);
  Dataset empty = data.slice(0, 0);
  BuildOptions opts;
  opts.allow_empty_data = true;
  const std::vector<double> z{0.1, 0.5, 2.7};
  const double prior = build(kModelII, empty, opts).log_density(z);
  const double all = build(kModelII, data).log_density(z);
  const double parts = build(kModelII, a).log_density(z) + build(kModelII, b).log_density(z) - prior;
  CHECK(all == doctest::Approx(parts).epsilon(1e-12));
}

TEST_CASE("huge noise leaves only the prior") {
  const Dataset data = simulate_linear({});
  Dataset empty = data.slice(0, 0);
  BuildOptions opts;
  opts.allow_empty_data = true;
  const PosteriorFn post = build(kModelII, data);
  const PosteriorFn prior = build(kModelII, empty, opts);
  // sigma = exp(25) makes every row's likelihood term nearly constant.
  const std::vector<double> z1{0.2, 0.1, 25.0};
  const std::vector<double> z2{-0.4, 0.6, 25.0};
  CHECK(std::abs((post.log_density(z1) - post.log_density(z2)) - (prior.log_density(z1) - prior.log_density(z2))) <= 1e-3);
}

TEST_CASE("degenerate and failing evaluations") {
  const PosteriorFn pf = build(kModelII, simulate_linear({}));
  // sigma underflows to zero: the density is -inf, never NaN.
  const double v = pf.log_density(std::vector<double>{0, 0, -800});
  CHECK(std::isinf(v));
  CHECK(v < 0);

  const char* divide = R"json({"priors": {
    "alpha": {"distribution": "Normal", "params": {"mu": 0, "sigma": 1}},
    "sigma": {"distribution": "HalfNormal", "params": {"sigma": 1}}},
   "likelihood": {"distribution": "Normal", "formula": "alpha / (X - 3)"}})json";
  Dataset d;
  d.add_column("X", {1, 3});
  d.add_column("y", {0, 0});
  try {
    build(divide, d).log_density(std::vector<double>{1, 0});
    FAIL("expected NonFiniteDensity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteDensity);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }

  Dataset no_y;
  no_y.add_column("X", {1});
  CHECK(error_code_of([&] { build(kModelII, no_y); }) == ErrorCode::MissingResponseColumn);
}

TEST_CASE("fixed parameters drop out of the sampled vector") {
  const Dataset data = simulate_linear({});
  BuildOptions opts;
  opts.fixed["sigma"] = 15.0;
  const PosteriorFn pf = build(kModelII, data, opts);
  CHECK(pf.dimension() == 2);
  CHECK(pf.parameter_names() == std::vector<std::string>{"alpha", "beta"});
  // Equals the full density minus sigma's prior and Jacobian terms.
  const PosteriorFn full = build(kModelII, data);
  const std::vector<double> z{0.1, 0.6};
  const std::vector<double> zf{0.1, 0.6, std::log(15.0)};
  const double sigma_terms = log_pdf(HalfNormalDist{15}, 15.0) + std::log(15.0);
  CHECK(pf.log_density(z) == doctest::Approx(full.log_density(zf) - sigma_terms).epsilon(1e-12));

  opts.fixed = {{"gamma", 1.0}};
  CHECK(error_code_of([&] { build(kModelII, data, opts); }) == ErrorCode::UnresolvedVariable);
}

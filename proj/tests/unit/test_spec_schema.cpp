#include <doctest.h>

#include <random>

#include "llmbi/error.hpp"
#include "llmbi/spec_schema.hpp"
#include "test_support.hpp"

using namespace llmbi;
using llmbi::testing::error_code_of;

namespace {

const char* kModelII = R"({"priors": {
  "alpha": {"distribution": "Uniform", "params": {"lower": -25, "upper": 25}},
  "beta": {"distribution": "Exponential", "params": {"lam": 0.5}},
  "sigma": {"distribution": "HalfNormal", "params": {"sigma": 15}}},
 "likelihood": {"distribution": "Normal", "formula": "alpha + beta * X"}})";

ModelSpec model_with(const std::string& formula, const std::string& noise = "sigma") {
  ModelSpec spec = parse_model_json(kModelII);
  spec.likelihood.formula_source = formula;
  spec.likelihood.noise_param = noise;
  return spec;
}

}  // namespace

TEST_CASE("sanitizer") {
  CHECK(sanitize_llm_text("```json\n{\"a\":1}\n```") == "{\"a\":1}");
  CHECK(sanitize_llm_text("{\"a\":{\"b\":2}} trailing") == "{\"a\":{\"b\":2}}");
  CHECK(error_code_of([] { sanitize_llm_text("no braces here"); }) == ErrorCode::NoJsonObject);
  CHECK(sanitize_llm_text("Sure! Here it is: {\"s\": \"}{\"} hope that helps") == "{\"s\": \"}{\"}");
  CHECK(error_code_of([] { sanitize_llm_text("{ never closed"); }) == ErrorCode::NoJsonObject);
}

TEST_CASE("prior parsing") {
  auto p = parse_prior_json(R"({"distribution":"Normal","params":{"mu":2,"sigma":1}})");
  CHECK(p.spec.kind == DistKind::Normal);
  CHECK(p.spec.param("mu") == 2.0);
  CHECK(p.spec.param("sigma") == 1.0);
  CHECK_FALSE(p.name.has_value());

  p = parse_prior_json(R"({"distribution":"HalfNormal","params":{"scale":15}})");
  CHECK(p.spec.kind == DistKind::HalfNormal);
  CHECK(p.spec.params == std::vector<std::pair<std::string, double>>{{"sigma", 15.0}});

  CHECK(error_code_of([] { parse_prior_json(R"({"distribution":"Cauchy","params":{"x0":0}})"); }) ==
        ErrorCode::UnknownDistribution);
}

TEST_CASE("aliases normalize to canonical names") {
  CHECK(parse_prior_json(R"({"distribution":"Normal","params":{"loc":1,"sd":2}})").spec ==
        parse_prior_json(R"({"distribution":"Normal","params":{"mu":1,"sigma":2}})").spec);
  CHECK(parse_prior_json(R"({"distribution":"Normal","params":{"mean":1,"scale":2}})").spec.param("sigma") == 2.0);
  CHECK(parse_prior_json(R"({"distribution":"Exponential","params":{"rate":0.5}})").spec.param("lam") == 0.5);
  CHECK(parse_prior_json(R"({"distribution":"Exponential","params":{"lambda":0.5}})").spec.param("lam") == 0.5);
  const auto u = parse_prior_json(R"({"distribution":"Uniform","params":{"low":-1,"high":1}})").spec;
  CHECK(u.param("lower") == -1.0);
  CHECK(u.param("upper") == 1.0);
  CHECK(parse_prior_json(R"({"distribution":"Uniform","params":{"a":0,"b":3}})").spec.param("upper") == 3.0);
  // Canonical input is a fixed point.
  const auto c = parse_prior_json(R"({"distribution":"Uniform","params":{"lower":0,"upper":3}})").spec;
  CHECK(parse_prior_json(serialize_prior(c)).spec == c);
}

TEST_CASE("prior errors") {
  auto code = [](const char* text) { return error_code_of([&] { parse_prior_json(text); }); };
  CHECK(code(R"({"distribution":"Normal","params":{"mu":0,"sigma":0}})") == ErrorCode::InvalidParamValue);
  CHECK(code(R"({"distribution":"Normal","params":{"mu":0,"sigma":-2}})") == ErrorCode::InvalidParamValue);
  CHECK(code(R"({"distribution":"Uniform","params":{"lower":5,"upper":5}})") == ErrorCode::InvalidParamValue);
  CHECK(code(R"({"distribution":"Exponential","params":{"lam":0}})") == ErrorCode::InvalidParamValue);
  CHECK(code(R"({"distribution":"Normal","params":{"mu":0}})") == ErrorCode::MissingParam);
  CHECK(code(R"({"distribution":"Normal","params":{"mu":"zero","sigma":1}})") == ErrorCode::InvalidParamValue);
  CHECK(code(R"({"distribution":"Normal","params":{"param1":0,"param2":1}})") == ErrorCode::UnknownParam);
  CHECK(code(R"({"distribution":"Normal","params":{"mu":0,"sigma":1,"nu":3}})") == ErrorCode::UnknownParam);
  CHECK(code(R"({"distribution":"Normal","params":{"sd":1,"sigma":1,"mu":0}})") == ErrorCode::InvalidParamValue);
  CHECK(code(R"({"params":{"mu":0,"sigma":1}})") == ErrorCode::MissingKey);
  CHECK(code(R"({"distribution":"Normal"})") == ErrorCode::MissingKey);
  CHECK(code(R"({"distribution":"Normal", "params":)") == ErrorCode::MalformedJson);
}

TEST_CASE("extra keys produce warnings, not errors") {
  std::vector<std::string> warnings;
  const auto p =
      parse_prior_json(R"({"distribution":"HalfNormal","params":{"sigma":15},"reasoning":"positive"})", &warnings);
  CHECK(p.spec.param("sigma") == 15.0);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("reasoning") != std::string::npos);
}

TEST_CASE("model parsing") {
  const ModelSpec spec = parse_model_json(kModelII);
  REQUIRE(spec.priors.size() == 3);
  CHECK(spec.priors[0].first == "alpha");
  CHECK(spec.priors[1].first == "beta");
  CHECK(spec.priors[2].first == "sigma");
  CHECK(spec.priors[0].second.kind == DistKind::Uniform);
  CHECK(spec.priors[1].second.param("lam") == 0.5);
  CHECK(spec.likelihood.formula_source == "alpha + beta * X");
  CHECK(spec.likelihood.noise_param == "sigma");

  CHECK(error_code_of([] { parse_model_json(R"({"priors":{}})"); }) == ErrorCode::MissingKey);
  CHECK(error_code_of([] {
          parse_model_json(R"({"likelihood":{"distribution":"Normal","formula":"a"}})");
        }) == ErrorCode::MissingKey);
  CHECK(error_code_of([] {
          parse_model_json(R"({"priors":{},"likelihood":{"distribution":"Normal","formula":"alpha + beta *"}})");
        }) == ErrorCode::FormulaSyntax);
  CHECK(error_code_of([] {
          parse_model_json(R"({"priors":{},"likelihood":{"distribution":"StudentT","formula":"a"}})");
        }) == ErrorCode::UnsupportedLikelihood);
  CHECK(error_code_of([] {
          parse_model_json(R"({"priors":{"a":{"distribution":"Normal","params":{"mu":0,"sigma":-1}}},
                               "likelihood":{"distribution":"Normal","formula":"a"}})");
        }) == ErrorCode::InvalidParamValue);
}

TEST_CASE("model serialization round trip") {
  const ModelSpec spec = parse_model_json(kModelII);
  CHECK(parse_model_json(serialize_model(spec)) == spec);
  CHECK(parse_model_json(serialize_model(spec, 2)) == spec);

  ModelSpec custom = spec;
  custom.likelihood.noise_param = "tau";
  custom.priors[2].first = "tau";
  CHECK(parse_model_json(serialize_model(custom)) == custom);
}

TEST_CASE("random specs round trip") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 50.0);
  for (int i = 0; i < 300; ++i) {
    ModelSpec spec;
    const int n = 1 + static_cast<int>(rng() % 4);
    std::string formula;
    for (int k = 0; k < n; ++k) {
      const std::string name = "p" + std::to_string(k);
      DistributionSpec d;
      switch (rng() % 4) {
        case 0: d = make_spec(NormalDist{u(rng) - 25, u(rng)}); break;
        case 1: d = make_spec(HalfNormalDist{u(rng)}); break;
        case 2: {
          const double lo = u(rng) - 60;
          d = make_spec(UniformDist{lo, lo + u(rng)});
          break;
        }
        default: d = make_spec(ExponentialDist{u(rng)});
      }
      spec.priors.emplace_back(name, d);
      formula += (k ? " + " : "") + name + " * X";
    }
    spec.likelihood.formula_source = formula;
    CHECK(parse_model_json(serialize_model(spec)) == spec);
  }
}

TEST_CASE("validation classifies variables") {
  const ValidatedModel vm = validate_model(parse_model_json(kModelII), {"X", "y"});
  const std::vector<std::pair<std::string, VariableRole>> expected{
      {"X", VariableRole::Column}, {"alpha", VariableRole::Parameter}, {"beta", VariableRole::Parameter}};
  CHECK(vm.variables == expected);
}

TEST_CASE("validation errors") {
  const std::set<std::string> cols{"X", "y"};
  CHECK(error_code_of([&] { validate_model(model_with("alpha + gamma * X"), cols); }) == ErrorCode::UnresolvedVariable);
  CHECK(error_code_of([&] { validate_model(model_with("alpha + beta * X", "tau"), cols); }) == ErrorCode::UnresolvedVariable);

  ModelSpec normal_noise = model_with("alpha + beta * X", "beta");
  normal_noise.priors[1].second = make_spec(NormalDist{0, 1});
  CHECK(error_code_of([&] { validate_model(normal_noise, cols); }) == ErrorCode::NoiseNotPositiveSupport);

  CHECK(error_code_of([&] { validate_model(model_with("alpha + beta * X"), {"X", "alpha"}); }) == ErrorCode::ShadowedColumn);

  ModelSpec bad_name = model_with("alpha + beta * X");
  bad_name.priors.emplace_back("2bad", make_spec(NormalDist{0, 1}));
  CHECK(error_code_of([&] { validate_model(bad_name, cols); }) == ErrorCode::InvalidIdentifier);

  CHECK(error_code_of([&] { validate_model(model_with("alpha ^ 2"), cols); }) == ErrorCode::FormulaSyntax);
}

TEST_CASE("validation accepts exactly the well-formed specs") {
  // validate_model succeeds iff free vars are covered and the noise prior
  // is positive; checked against that rule on random specs.
  std::mt19937_64 rng(99);
  const std::vector<std::string> pool{"a", "b", "c", "X", "Z"};
  const std::set<std::string> cols{"X", "y"};
  for (int i = 0; i < 500; ++i) {
    ModelSpec spec;
    std::set<std::string> declared;
    for (const std::string name : {"a", "b", "c"}) {
      if (rng() % 3 == 0) continue;
      declared.insert(name);
      spec.priors.emplace_back(name, rng() % 2 ? make_spec(NormalDist{0, 1}) : make_spec(HalfNormalDist{1}));
    }
    const bool has_sigma = rng() % 4 != 0;
    if (has_sigma) {
      spec.priors.emplace_back("sigma", rng() % 3 ? make_spec(HalfNormalDist{2}) : make_spec(NormalDist{0, 1}));
    }
    std::set<std::string> used;
    std::string formula;
    for (int k = 0, n = 1 + static_cast<int>(rng() % 3); k < n; ++k) {
      const auto& v = pool[rng() % pool.size()];
      used.insert(v);
      formula += (k ? " * " : "") + v;
    }
    spec.likelihood.formula_source = formula;

    bool expect_ok = has_sigma && has_positive_support(spec.find_prior("sigma")->to_distribution());
    for (const auto& v : used) expect_ok = expect_ok && (declared.count(v) || cols.count(v));
    const bool ok = !error_code_of([&] { validate_model(spec, cols); }).has_value();
    INFO(formula);
    CHECK(ok == expect_ok);
  }
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "llmbi/data_io.hpp"
#include "llmbi/diagnostics.hpp"
#include "llmbi/elicitation.hpp"
#include "llmbi/error.hpp"
#include "llmbi/formula.hpp"
#include "llmbi/pipeline.hpp"
#include "llmbi/spec_schema.hpp"

namespace py = pybind11;
using namespace llmbi;

namespace {

py::dict summary_dict(const SummaryTable& table) {
  const auto [lo_name, hi_name] = hdi_column_names(table.hdi_prob);
  py::dict out;
  for (const auto& r : table.rows) {
    py::dict row;
    row["mean"] = r.mean;
    row["mode"] = r.mode;
    row["sd"] = r.sd;
    row[py::str(lo_name)] = r.hdi_low;
    row[py::str(hi_name)] = r.hdi_high;
    row["ess_bulk"] = r.ess_bulk;
    row["r_hat"] = r.r_hat;
    out[py::str(r.parameter)] = row;
  }
  return out;
}

SamplerConfig sampler_config(const std::string& algorithm, std::size_t chains, std::size_t warmup, std::size_t draws,
                             std::uint64_t seed, double target_accept) {
  SamplerConfig cfg;
  cfg.algorithm = parse_algorithm(algorithm);
  cfg.chains = chains;
  cfg.warmup_draws = warmup;
  cfg.kept_draws = draws;
  cfg.seed = seed;
  cfg.target_accept = target_accept;
  cfg.validate();
  return cfg;
}

LlmConfig replay_config(const std::filesystem::path& fixtures_dir) {
  LlmConfig cfg;
  cfg.mode = LlmMode::Replay;
  cfg.fixtures_dir = fixtures_dir;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_llmbi, m) {
  m.doc() = "Bayesian inference from LLM-specified models";

  static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      exc.attr("position") = e.position() ? py::cast(*e.position()) : py::none();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const std::map<std::string, std::vector<double>>& columns) {
             Dataset d;
             for (const auto& [name, values] : columns) d.add_column(name, values);
             return d;
           }),
           py::arg("columns"))
      .def_property_readonly("n_rows", &Dataset::n_rows)
      .def_property_readonly("names", &Dataset::names)
      .def("column", [](const Dataset& d, const std::string& name) {
        const auto col = d.column(name);
        return std::vector<double>(col.begin(), col.end());
      })
      .def("to_csv", [](const Dataset& d) { return to_csv(d); })
      .def("__len__", &Dataset::n_rows);

  m.def(
      "simulate",
      [](double alpha, double beta, double sigma, std::size_t n, double x_low, double x_high, std::uint64_t seed) {
        return simulate_linear({alpha, beta, sigma, n, x_low, x_high, seed});
      },
      py::arg("alpha") = 2.5, py::arg("beta") = 1.8, py::arg("sigma") = 15.0, py::arg("n") = 100,
      py::arg("x_low") = 0.0, py::arg("x_high") = 100.0, py::arg("seed") = 42);
  m.def("parse_csv", [](const std::string& text) { return parse_csv(text); });
  m.def("load_csv", [](const std::filesystem::path& path) { return load_csv(path); });

  m.def("format_formula", [](const std::string& text) { return formula::to_string(formula::parse(text)); });
  m.def("differentiate", [](const std::string& text, const std::string& var) {
    return formula::to_string(formula::simplify(formula::differentiate(formula::parse(text), var)));
  });
  m.def("free_variables", [](const std::string& text) { return formula::free_vars(formula::parse(text)); });
  m.def("evaluate", [](const std::string& text, const std::map<std::string, double>& env) {
    return formula::evaluate(formula::parse(text), env);
  });

  m.def("sanitize", [](const std::string& raw) { return sanitize_llm_text(raw); });
  m.def("normalize_prior", [](const std::string& text) { return serialize_prior(parse_prior_json(text).spec); });
  m.def(
      "normalize_model", [](const std::string& text, int indent) { return serialize_model(parse_model_json(text), indent); },
      py::arg("text"), py::arg("indent") = -1);

  m.def(
      "fit",
      [](const std::string& model_json, const Dataset& data, const std::string& algorithm, std::size_t chains,
         std::size_t warmup, std::size_t draws, std::uint64_t seed, double target_accept, double hdi_prob) {
        const SamplerConfig cfg = sampler_config(algorithm, chains, warmup, draws, seed, target_accept);
        FitResult fit;
        {
          py::gil_scoped_release release;
          fit = fit_model(parse_model_json(model_json), data, cfg, {}, hdi_prob);
        }
        py::dict draws_out;
        for (std::size_t p = 0; p < fit.trace.n_params(); ++p) draws_out[py::str(fit.trace.param_names[p])] = fit.trace.chains_for(p);
        py::dict out;
        out["summary"] = summary_dict(fit.summary);
        out["draws"] = draws_out;
        out["summary_text"] = render_text(fit.summary);
        out["divergence_rate"] = fit.trace.divergence_rate();
        out["seconds"] = fit.seconds;
        return out;
      },
      py::arg("model_json"), py::arg("data"), py::arg("algorithm") = "nuts", py::arg("chains") = 4,
      py::arg("warmup") = 1000, py::arg("draws") = 1000, py::arg("seed") = 0, py::arg("target_accept") = 0.8,
      py::arg("hdi_prob") = 0.94);

  m.def("render_prior_prompt", [](const std::string& name, const std::string& belief) { return render_prior_prompt(name, belief); });
  m.def("render_model_prompt", [](const std::string& description) { return render_model_prompt(description); });
  m.def("prompt_hash", [](const std::string& prompt) { return prompt_hash(prompt); });
  m.def(
      "elicit_prior",
      [](const std::string& name, const std::string& belief, const std::filesystem::path& fixtures_dir) {
        return serialize_prior(elicit_prior(name, belief, replay_config(fixtures_dir)));
      },
      py::arg("parameter"), py::arg("belief"), py::arg("fixtures_dir"));
  m.def(
      "elicit_model",
      [](const std::string& description, const std::filesystem::path& fixtures_dir) {
        return serialize_model(elicit_model(description, replay_config(fixtures_dir)));
      },
      py::arg("description"), py::arg("fixtures_dir"));
}

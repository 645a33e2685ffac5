#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gsdfront/agreement.hpp"
#include "gsdfront/data_model.hpp"
#include "gsdfront/gsd.hpp"
#include "gsdfront/inference.hpp"
#include "gsdfront/report.hpp"
#include "gsdfront/robustness.hpp"
#include "gsdfront/simulation.hpp"
#include "gsdfront/text_metrics.hpp"

namespace py = pybind11;
using namespace gsdfront;

namespace {

py::object to_python(const report::Json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

TestOptions test_options(std::size_t resamples, std::uint64_t seed, double alpha, std::size_t threads) {
    TestOptions t;
    t.resamples = resamples;
    t.seed = seed;
    t.alpha = alpha;
    t.threads = threads;
    return t;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Generalized stochastic dominance front tests";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    py::class_<EvaluationTable>(m, "EvaluationTable")
        .def_readonly("strategies", &EvaluationTable::strategies)
        .def_property_readonly("prompt_ids",
                               [](const EvaluationTable& t) {
                                   std::vector<std::string> ids;
                                   for (const auto& p : t.prompts) ids.push_back(p.id);
                                   return ids;
                               })
        .def_property_readonly("metrics",
                               [](const EvaluationTable& t) {
                                   std::vector<std::string> names;
                                   for (const auto& mt : t.scale.metrics) names.push_back(mt.name);
                                   return names;
                               })
        .def_property_readonly("cardinal_count", [](const EvaluationTable& t) { return t.scale.cardinal_count(); })
        .def("cell", [](const EvaluationTable& t, std::size_t s, std::size_t p) { return t.cell(s, p).values; },
             py::arg("strategy"), py::arg("prompt"))
        .def("to_csv", &evaluation_table_to_csv)
        .def("summary", [](const EvaluationTable& t) { return to_python(report::table_summary(t)); })
        .def("__repr__", [](const EvaluationTable& t) {
            return "<EvaluationTable strategies=" + std::to_string(t.strategy_count()) +
                   " prompts=" + std::to_string(t.prompt_count()) + " metrics=" + std::to_string(t.scale.size()) +
                   ">";
        });

    m.def("load_table", [](const std::string& table, const std::string& scale) {
        return load_evaluation_table(table, scale);
    }, py::arg("table"), py::arg("scale"));
    m.def("parse_table", [](const std::string& csv, const std::string& scale_json) {
        return parse_evaluation_table(csv, parse_scale_spec(scale_json));
    }, py::arg("csv"), py::arg("scale_json"));
    m.def("generate_table",
          [](std::size_t strategies, std::size_t prompts, std::size_t cardinal, std::size_t ordinal,
             std::size_t levels, double delta, double bump, std::uint64_t seed) {
              SyntheticConfig c;
              c.strategy_count = strategies;
              c.prompt_count = prompts;
              c.cardinal_count = cardinal;
              c.ordinal_count = ordinal;
              c.ordinal_levels = levels;
              c.effect = {delta > 0.0 ? EffectKind::shift : EffectKind::null, delta, bump};
              c.seed = seed;
              return generate_table(c);
          },
          py::arg("strategies") = 2, py::arg("prompts") = 20, py::arg("cardinal") = 1, py::arg("ordinal") = 2,
          py::arg("levels") = 5, py::arg("delta") = 0.0, py::arg("bump") = 1.0, py::arg("seed") = 0);

    m.def("d_statistic",
          [](const EvaluationTable& t, const std::string& s, const std::string& s_prime, std::size_t r2_budget) {
              const auto system = build_preference_system(t, {r2_budget});
              return compute_d(t, system, s, s_prime).value;
          },
          py::arg("table"), py::arg("candidate"), py::arg("opponent"), py::arg("r2_budget") = kDefaultR2Budget);

    m.def("gsd_front",
          [](const EvaluationTable& t, std::size_t r2_budget, std::size_t threads) {
              FrontOptions opts;
              opts.threads = threads;
              py::gil_scoped_release release;
              const auto front = gsd_front(t, opts, {r2_budget});
              py::gil_scoped_acquire acquire;
              return to_python(report::to_json(front));
          },
          py::arg("table"), py::arg("r2_budget") = kDefaultR2Budget, py::arg("threads") = 0);

    m.def("front_test",
          [](const EvaluationTable& t, const std::string& candidate, std::size_t resamples, std::uint64_t seed,
             double alpha, std::size_t r2_budget, std::size_t threads) {
              report::Json j;
              {
                  py::gil_scoped_release release;
                  j = report::to_json(
                      front_membership_test(t, candidate, test_options(resamples, seed, alpha, threads), {r2_budget}));
              }
              return to_python(j);
          },
          py::arg("table"), py::arg("candidate"), py::arg("resamples") = kDefaultResamples, py::arg("seed") = 0,
          py::arg("alpha") = kDefaultAlpha, py::arg("r2_budget") = kDefaultR2Budget, py::arg("threads") = 0);

    m.def("contamination",
          [](const EvaluationTable& t, const std::string& candidate, std::size_t k_max, std::size_t resamples,
             std::uint64_t seed, double alpha, std::size_t r2_budget, std::size_t threads) {
              report::Json j;
              {
                  py::gil_scoped_release release;
                  const auto system = build_preference_system(t, {r2_budget});
                  DStatisticEngine engine(t, system);
                  const auto test = front_membership_test(engine, t.strategy_index(candidate),
                                                          test_options(resamples, seed, alpha, threads));
                  std::vector<ContaminationCurve> curves;
                  j = {{"candidate", candidate}, {"curves", report::Json::array()}};
                  for (const auto& pr : test.pairwise) {
                      curves.push_back(contamination_curve(pr, engine, k_max));
                      j["curves"].push_back(report::to_json(curves.back()));
                  }
                  j["front_breakdown"] = front_breakdown(curves, alpha);
              }
              return to_python(j);
          },
          py::arg("table"), py::arg("candidate"), py::arg("k_max") = 5, py::arg("resamples") = kDefaultResamples,
          py::arg("seed") = 0, py::arg("alpha") = kDefaultAlpha, py::arg("r2_budget") = kDefaultR2Budget,
          py::arg("threads") = 0);

    m.def("calibration",
          [](std::size_t runs, std::size_t prompts, double delta, double bump, std::size_t resamples, double alpha,
             std::uint64_t seed, std::size_t threads) {
              SyntheticConfig c;
              c.prompt_count = prompts;
              c.effect = {delta > 0.0 ? EffectKind::shift : EffectKind::null, delta, bump};
              c.seed = seed;
              CalibrationOptions o;
              o.runs = runs;
              o.resamples = resamples;
              o.alpha = alpha;
              o.threads = threads;
              report::Json j;
              {
                  py::gil_scoped_release release;
                  j = report::to_json(calibration_study(c, o));
              }
              return to_python(j);
          },
          py::arg("runs") = 100, py::arg("prompts") = 20, py::arg("delta") = 0.0, py::arg("bump") = 1.0,
          py::arg("resamples") = 200, py::arg("alpha") = kDefaultAlpha, py::arg("seed") = 0, py::arg("threads") = 0);

    m.def("diversity", [](const std::vector<std::string>& tokens) { return diversity(tokens); }, py::arg("tokens"));
    m.def("perplexity", [](const std::vector<double>& lp) { return perplexity(lp); }, py::arg("uncond_logprob"));
    m.def("coherence", [](const std::vector<double>& lp) { return coherence(lp); }, py::arg("cond_logprob"));
    m.def("qtext",
          [](const std::array<double, 3>& x, const std::array<double, 3>& w, const std::array<double, 3>& mu,
             const std::array<double, 3>& a) { return qtext(x, QTextParams{w, mu, a}); },
          py::arg("normalized"), py::arg("weights") = std::array<double, 3>{1, 1, 1},
          py::arg("targets") = std::array<double, 3>{0.5, 0.5, 0.5},
          py::arg("strengths") = std::array<double, 3>{0, 0, 0});
    m.def("spearman_rho", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman_rho(x, y); },
          py::arg("x"), py::arg("y"));
    m.def("weighted_kappa",
          [](const std::vector<int>& a, const std::vector<int>& b, int levels) -> std::optional<double> {
              return weighted_kappa(RatingPairs{a, b, levels});
          },
          py::arg("rater_a"), py::arg("rater_b"), py::arg("levels") = 5);
    m.def("agreement",
          [](const std::vector<int>& a, const std::vector<int>& b, int levels) {
              return to_python(report::agreement_json(RatingPairs{a, b, levels}));
          },
          py::arg("rater_a"), py::arg("rater_b"), py::arg("levels") = 5);
}

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsdfront/agreement.hpp"
#include "gsdfront/data_model.hpp"
#include "gsdfront/error.hpp"
#include "gsdfront/gsd.hpp"
#include "gsdfront/inference.hpp"
#include "gsdfront/order_structure.hpp"
#include "gsdfront/parallel.hpp"
#include "gsdfront/report.hpp"
#include "gsdfront/robustness.hpp"
#include "gsdfront/simulation.hpp"
#include "gsdfront/text_metrics.hpp"

namespace fs = std::filesystem;
using namespace gsdfront;
using report::Json;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string config;
    std::string table;
    std::string scale;
    std::string tokens;
    std::string ratings;
    std::string candidate;
    std::string out = ".";
    double alpha = kDefaultAlpha;
    std::size_t resamples = kDefaultResamples;
    std::uint64_t seed = 0;
    std::size_t r2_budget = kDefaultR2Budget;
    std::size_t kmax = 5;
    std::size_t threads = 0;
};

struct SimulateFlags {
    std::size_t runs = 100;
    std::size_t resamples = 200;
    std::size_t prompts = 20;
    std::size_t strategies = 2;
    std::size_t cardinal = 1;
    std::size_t ordinal = 2;
    std::size_t levels = 5;
    double delta = 0.0;
    double bump = 1.0;
    bool benchmark = false;
    bool emit_table = false;
};

// Values from --config fill every flag that was not given on the command line.
void apply_config_file(RunConfig& cfg, const CLI::App& sub) {
    if (cfg.config.empty()) return;
    Json j;
    try {
        j = Json::parse(read_text_file(cfg.config));
    } catch (const Json::parse_error& e) {
        throw UsageError("config file " + cfg.config + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    auto given = [&](const std::string& flag) {
        const auto* opt = sub.get_option_no_throw("--" + flag);
        return opt != nullptr && opt->count() > 0;
    };
    for (const auto& [key, value] : j.items()) {
        const std::string flag = key == "r2_budget" ? "r2-budget" : key;
        if (given(flag)) continue;
        try {
            if (key == "table") cfg.table = value.get<std::string>();
            else if (key == "scale") cfg.scale = value.get<std::string>();
            else if (key == "tokens") cfg.tokens = value.get<std::string>();
            else if (key == "ratings") cfg.ratings = value.get<std::string>();
            else if (key == "candidate") cfg.candidate = value.get<std::string>();
            else if (key == "out") cfg.out = value.get<std::string>();
            else if (key == "alpha") cfg.alpha = value.get<double>();
            else if (key == "resamples") cfg.resamples = value.get<std::size_t>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "r2_budget") cfg.r2_budget = value.get<std::size_t>();
            else if (key == "kmax") cfg.kmax = value.get<std::size_t>();
            else if (key == "threads") cfg.threads = value.get<std::size_t>();
            else throw UsageError("unknown config key: " + key);
        } catch (const Json::type_error&) {
            throw UsageError("config key " + key + " has the wrong type");
        }
    }
}

void check_common(const RunConfig& cfg) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw UsageError("--alpha must lie in (0,1)");
    if (cfg.resamples < 1) throw UsageError("--resamples must be at least 1");
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t x) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, x >>= 4) out[static_cast<std::size_t>(i)] = digits[x & 15];
    return out;
}

Json input_entry(const std::string& role, const std::string& path) {
    const auto bytes = read_text_file(path);
    return {{"role", role}, {"file", fs::path(path).filename().string()}, {"bytes", bytes.size()},
            {"fnv1a64", hex64(fnv1a(bytes))}};
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }
    void write(const std::string& name, const std::string& text) const {
        const auto path = dir_ / name;
        fs::create_directories(path.parent_path());
        write_text_file(path, text);
    }
    void write_json(const std::string& name, const Json& j) const { write(name, j.dump(2) + "\n"); }

private:
    fs::path dir_;
};

struct Loaded {
    EvaluationTable table;
    PreferenceSystem system;
};

Loaded load(const RunConfig& cfg) {
    require(cfg.table, "--table");
    require(cfg.scale, "--scale");
    Loaded l;
    l.table = load_evaluation_table(cfg.table, cfg.scale);
    l.system = build_preference_system(l.table, {cfg.r2_budget});
    return l;
}

std::size_t candidate_index(const EvaluationTable& table, const RunConfig& cfg) {
    if (cfg.candidate.empty()) return 0;
    if (auto idx = table.find_strategy(cfg.candidate)) return *idx;
    throw UsageError("--candidate " + cfg.candidate + " is not a strategy in the table");
}

TestOptions test_options(const RunConfig& cfg) {
    TestOptions t;
    t.resamples = cfg.resamples;
    t.seed = cfg.seed;
    t.alpha = cfg.alpha;
    t.threads = cfg.threads;
    return t;
}

Json tolerances() {
    return {{"order", kOrderTolerance}, {"dominance", kDominanceTolerance}, {"tie", kTieTolerance}};
}

Json provenance(const RunConfig& cfg, const Loaded& l, const FrontTestResult* test) {
    Json inputs = Json::array();
    inputs.push_back(input_entry("table", cfg.table));
    inputs.push_back(input_entry("scale", cfg.scale));
    if (!cfg.ratings.empty()) inputs.push_back(input_entry("ratings", cfg.ratings));
    if (!cfg.tokens.empty()) inputs.push_back(input_entry("tokens", cfg.tokens));
    Json p = {{"tool", "gsdfront"},
              {"version", GSDFRONT_VERSION},
              {"inputs", inputs},
              {"seed", cfg.seed},
              {"alpha", cfg.alpha},
              {"resamples", cfg.resamples},
              {"kmax", cfg.kmax},
              {"r2_budget", cfg.r2_budget},
              {"r2_truncated", l.system.r2_truncated},
              {"tolerances", tolerances()},
              {"normalization_anchors", report::table_summary(l.table)["normalization_anchors"]},
              {"contamination_scheme", "shift-observed-only"}};
    if (test) {
        Json seeds = Json::object();
        for (const auto& pr : test->pairwise) seeds[pr.opponent] = pr.seed;
        p["pairwise_seeds"] = seeds;
    }
    return p;
}

Json with_schema(const char* kind, Json body) {
    Json j = {{"schema", report::kSchema}, {"kind", kind}};
    for (auto& [k, v] : body.items()) j[k] = v;
    return j;
}

// Individual steps; each returns the JSON it wrote so `report` can bundle them.

Json do_ingest(const RunConfig& cfg, const Loaded& l, const Output& out) {
    out.write("normalized.csv", evaluation_table_to_csv(l.table));
    out.write("normalized_scale.json", scale_spec_to_json(normalized_scale(l.table.scale)) + "\n");
    Json j = {{"table", report::table_summary(l.table)}, {"system", report::system_summary(l.system)},
              {"inputs", {input_entry("table", cfg.table), input_entry("scale", cfg.scale)}}};
    out.write_json("ingest.json", with_schema("ingest", j));
    return j;
}

Json do_front(const RunConfig& cfg, const Loaded& l, const Output& out) {
    FrontOptions opts;
    opts.threads = cfg.threads;
    const auto front = gsd_front(l.table, l.system, opts);
    Json j = report::to_json(front);
    out.write_json("front.json", with_schema("front", {{"front", j}}));
    return j;
}

FrontTestResult run_test(const RunConfig& cfg, const Loaded& l, const DStatisticEngine& engine) {
    return front_membership_test(engine, candidate_index(l.table, cfg), test_options(cfg));
}

Json do_test(const RunConfig& cfg, const Loaded& l, const FrontTestResult& test, const Output& out) {
    for (const auto& pr : test.pairwise) out.write("resampled/" + report::slug(pr.opponent) + ".csv", report::resampled_csv(pr));
    out.write("density.svg", report::density_svg(test));
    Json j = report::to_json(test);
    out.write_json("test.json", with_schema("test", {{"test", j}, {"provenance", provenance(cfg, l, &test)}}));
    return j;
}

Json do_robust(const RunConfig& cfg, const Loaded& l, const FrontTestResult& test, const DStatisticEngine& engine,
               const Output& out) {
    if (cfg.kmax > l.table.prompt_count())
        throw UsageError("--kmax exceeds the prompt count (" + std::to_string(l.table.prompt_count()) + ")");
    std::vector<ContaminationCurve> curves;
    Json arr = Json::array();
    for (const auto& pr : test.pairwise) {
        curves.push_back(contamination_curve(pr, engine, cfg.kmax));
        out.write("contamination/" + report::slug(pr.opponent) + ".csv", report::contamination_csv(curves.back()));
        arr.push_back(report::to_json(curves.back()));
    }
    out.write("pcurve.svg", report::pcurve_svg(curves, cfg.alpha));
    Json j = {{"candidate", test.candidate}, {"kmax", cfg.kmax}, {"curves", arr}};
    j["front_breakdown"] = curves.empty() ? Json(nullptr) : Json(front_breakdown(curves, cfg.alpha));
    out.write_json("robust.json", with_schema("robust", {{"robustness", j}, {"provenance", provenance(cfg, l, &test)}}));
    return j;
}

Json do_agreement(const RunConfig& cfg, const Output& out) {
    const auto rows = load_ratings(cfg.ratings);
    Json j = report::agreement_json(rating_pairs(rows, 5));
    out.write_json("agreement.json", with_schema("agreement", {{"agreement", j}}));
    return j;
}

Json do_metrics(const RunConfig& cfg, const Output& out) {
    const auto records = load_token_records(cfg.tokens);
    QTextParams params;
    QTextAnchors anchors;
    auto metrics = compute_text_metrics(records, params, &anchors);
    Json j;
    if (!cfg.ratings.empty()) {
        const auto rows = load_ratings(cfg.ratings);
        std::map<std::pair<std::string, std::string>, double> human;
        for (const auto& r : rows) human[{r.prompt_id, r.strategy}] = 0.5 * (r.rater_a + r.rater_b);
        std::vector<double> target;
        for (const auto& m : metrics) {
            auto it = human.find({m.prompt_id, m.strategy});
            if (it == human.end()) throw DataError("no rating for prompt " + m.prompt_id + ", strategy " + m.strategy);
            target.push_back(it->second);
        }
        QTextSearch search = QTextSearch::defaults();
        search.seed = cfg.seed;
        const auto fit = fit_qtext_params(qtext_inputs(metrics), target, search);
        params = fit.params;
        metrics = compute_text_metrics(records, params, &anchors);
        j["fit"] = {{"spearman_rho", fit.rho}, {"evaluated", fit.evaluated.size()}, {"seed", cfg.seed}};
    }
    j["params"] = report::to_json(params);
    j["anchors"] = {{"perplexity", {anchors.perplexity_min, anchors.perplexity_max}},
                    {"coherence", {anchors.coherence_min, anchors.coherence_max}},
                    {"diversity", {anchors.diversity_min, anchors.diversity_max}}};
    j["records"] = metrics.size();
    out.write("metrics.csv", text_metrics_to_csv(metrics));
    out.write_json("metrics.json", with_schema("metrics", {{"metrics", j}}));
    return j;
}

void do_simulate(const RunConfig& cfg, const SimulateFlags& sim, const Output& out) {
    if (sim.benchmark) {
        const auto bench = generate_benchmark(sim.prompts, cfg.seed);
        out.write("tokens.jsonl", token_records_to_jsonl(bench.tokens));
        out.write("ratings.csv", ratings_to_csv(bench.ratings));
        out.write("evaluation.csv", evaluation_table_to_csv(bench.table));
        out.write("scale.json", scale_spec_to_json(bench.table.scale) + "\n");
        return;
    }
    SyntheticConfig sc;
    sc.strategy_count = sim.strategies;
    sc.prompt_count = sim.prompts;
    sc.cardinal_count = sim.cardinal;
    sc.ordinal_count = sim.ordinal;
    sc.ordinal_levels = sim.levels;
    sc.effect = {sim.delta > 0.0 ? EffectKind::shift : EffectKind::null, sim.delta, sim.bump};
    sc.seed = cfg.seed;
    if (auto problems = sc.violations(); !problems.empty()) throw UsageError(problems.front());
    if (sim.emit_table) {
        const auto table = generate_table(sc);
        out.write("evaluation.csv", evaluation_table_to_csv(table));
        out.write("scale.json", scale_spec_to_json(table.scale) + "\n");
        return;
    }
    if (sim.strategies < 2) throw UsageError("--strategies must be at least 2 for a calibration study");
    if (sim.runs < 1) throw UsageError("--runs must be at least 1");
    CalibrationOptions opts;
    opts.runs = sim.runs;
    opts.resamples = sim.resamples;
    opts.alpha = cfg.alpha;
    opts.r2_budget = cfg.r2_budget;
    opts.threads = cfg.threads;
    const auto started = utc_now();
    const auto result = calibration_study(sc, opts);
    Json config = {{"strategies", sc.strategy_count}, {"prompts", sc.prompt_count},
                   {"cardinal", sc.cardinal_count},   {"ordinal", sc.ordinal_count},
                   {"levels", sc.ordinal_levels},     {"effect", sim.delta > 0.0 ? "shift" : "null"},
                   {"delta", sim.delta},              {"bump_probability", sim.bump},
                   {"seed", cfg.seed},                {"resamples", sim.resamples},
                   {"alpha", cfg.alpha}};
    out.write_json("simulation.json", with_schema("simulation", {{"config", config}, {"result", report::to_json(result)}}));
    std::string csv = "run,p_value,reject\n";
    for (std::size_t r = 0; r < result.p_values.size(); ++r)
        csv += std::to_string(r + 1) + "," + format_double(result.p_values[r]) + "," +
               (result.p_values[r] <= cfg.alpha ? "1" : "0") + "\n";
    out.write("simulation_runs.csv", csv);
    out.write_json("simulation.meta.json",
                   {{"started_utc", started}, {"finished_utc", utc_now()}, {"mean_runtime_seconds", result.mean_runtime}});
}

void do_report(const RunConfig& cfg, const Output& out) {
    const auto started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    const auto l = load(cfg);
    DStatisticEngine engine(l.table, l.system);
    Json bundle = {{"schema", report::kSchema}, {"kind", "report"}};
    bundle["ingest"] = do_ingest(cfg, l, out);
    bundle["front"] = do_front(cfg, l, out);
    const auto test = run_test(cfg, l, engine);
    bundle["test"] = do_test(cfg, l, test, out);
    bundle["robustness"] = do_robust(cfg, l, test, engine, out);
    bundle["agreement"] = cfg.ratings.empty() ? Json(nullptr) : do_agreement(cfg, out);
    bundle["metrics"] = cfg.tokens.empty() ? Json(nullptr) : do_metrics(cfg, out);
    bundle["provenance"] = provenance(cfg, l, &test);
    out.write_json("report.json", bundle);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.write_json("report.meta.json", {{"started_utc", started},
                                        {"finished_utc", utc_now()},
                                        {"elapsed_seconds", seconds},
                                        {"threads", worker_count(cfg.threads)}});
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--config", cfg.config, "JSON file with default flag values (flags win)");
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
}

void add_table(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--table", cfg.table, "Evaluation CSV");
    sub->add_option("--scale", cfg.scale, "Scale specification JSON");
    sub->add_option("--r2-budget", cfg.r2_budget, "Maximum R2 quadruples examined");
}

void add_test(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--candidate", cfg.candidate, "Strategy tested for front membership (default: first)");
    sub->add_option("--alpha", cfg.alpha, "Significance level");
    sub->add_option("--resamples", cfg.resamples, "Permutation resamples R");
    sub->add_option("--seed", cfg.seed, "Master seed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized stochastic dominance front tests for text-generation benchmarks", "gsdfront"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", GSDFRONT_VERSION);
    RunConfig cfg;
    SimulateFlags sim;

    auto* ingest = app.add_subcommand("ingest", "Validate and normalize an evaluation table");
    auto* metrics = app.add_subcommand("metrics", "Text metrics and Q*Text from token records");
    auto* front = app.add_subcommand("front", "Empirical GSD relation and front");
    auto* test = app.add_subcommand("test", "Permutation front-membership test");
    auto* robust = app.add_subcommand("robust", "Contamination robustness of the front test");
    auto* agreement = app.add_subcommand("agreement", "Inter-rater agreement statistics");
    auto* simulate = app.add_subcommand("simulate", "Synthetic tables, benchmark files and calibration studies");
    auto* report_cmd = app.add_subcommand("report", "Full pipeline report");

    for (auto* sub : {ingest, metrics, front, test, robust, agreement, simulate, report_cmd}) add_common(sub, cfg);
    for (auto* sub : {ingest, front, test, robust, report_cmd}) add_table(sub, cfg);
    for (auto* sub : {test, robust, report_cmd}) add_test(sub, cfg);
    for (auto* sub : {robust, report_cmd}) sub->add_option("--kmax", cfg.kmax, "Largest contamination size k");
    for (auto* sub : {metrics, agreement, report_cmd}) sub->add_option("--ratings", cfg.ratings, "Ratings CSV");
    for (auto* sub : {metrics, report_cmd}) sub->add_option("--tokens", cfg.tokens, "Token records (JSONL)");
    metrics->add_option("--seed", cfg.seed, "Seed of the Q*Text fit restarts");
    simulate->add_option("--seed", cfg.seed, "Master seed");
    simulate->add_option("--alpha", cfg.alpha, "Significance level");
    simulate->add_option("--resamples", sim.resamples, "Permutation resamples R");
    simulate->add_option("--r2-budget", cfg.r2_budget, "Maximum R2 quadruples examined");
    simulate->add_option("--runs", sim.runs, "Monte Carlo runs");
    simulate->add_option("--prompts", sim.prompts, "Prompts per table");
    simulate->add_option("--strategies", sim.strategies, "Strategies per table");
    simulate->add_option("--cardinal", sim.cardinal, "Cardinal metrics");
    simulate->add_option("--ordinal", sim.ordinal, "Ordinal metrics");
    simulate->add_option("--levels", sim.levels, "Ordinal levels");
    simulate->add_option("--delta", sim.delta, "Cardinal shift of the first strategy (0 = null)");
    simulate->add_option("--bump", sim.bump, "Ordinal bump probability of the first strategy");
    simulate->add_flag("--benchmark", sim.benchmark, "Write the synthetic benchmark files instead");
    simulate->add_flag("--emit-table", sim.emit_table, "Write one generated table instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, std::cerr, std::cerr);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        apply_config_file(cfg, *sub);
        check_common(cfg);
        const Output out(cfg.out);
        if (sub == ingest) {
            const auto l = load(cfg);
            do_ingest(cfg, l, out);
        } else if (sub == metrics) {
            require(cfg.tokens, "--tokens");
            do_metrics(cfg, out);
        } else if (sub == front) {
            do_front(cfg, load(cfg), out);
        } else if (sub == test) {
            const auto l = load(cfg);
            DStatisticEngine engine(l.table, l.system);
            do_test(cfg, l, run_test(cfg, l, engine), out);
        } else if (sub == robust) {
            const auto l = load(cfg);
            DStatisticEngine engine(l.table, l.system);
            const auto result = run_test(cfg, l, engine);
            do_test(cfg, l, result, out);
            do_robust(cfg, l, result, engine, out);
        } else if (sub == agreement) {
            require(cfg.ratings, "--ratings");
            do_agreement(cfg, out);
        } else if (sub == simulate) {
            do_simulate(cfg, sim, out);
        } else {
            do_report(cfg, out);
        }
    } catch (const UsageError& e) {
        std::cerr << "gsdfront: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "gsdfront: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}

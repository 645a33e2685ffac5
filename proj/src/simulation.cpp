#include "gsdfront/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gsdfront/gsd.hpp"
#include "gsdfront/inference.hpp"
#include "gsdfront/parallel.hpp"
#include "gsdfront/text_metrics.hpp"

namespace gsdfront {

namespace {

constexpr double kGridStep = 0.05;

// Portable draws: the standard distributions are implementation-defined.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : gen_(seed) {}
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    bool coin(double p) { return uniform() < p; }
    double normal() {
        // Box-Muller; uniform() may return 0, so shift into (0,1].
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }
    double exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

private:
    std::mt19937_64 gen_;
};

std::vector<std::string> ordinal_level_labels(std::size_t levels) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= levels; ++i) out.push_back(std::to_string(i));
    return out;
}

std::string padded(const std::string& prefix, std::size_t i, std::size_t width) {
    std::string num = std::to_string(i);
    if (num.size() < width) num.insert(0, width - num.size(), '0');
    return prefix + num;
}

} // namespace

std::vector<std::string> SyntheticConfig::violations() const {
    std::vector<std::string> out;
    if (strategy_count < 1) out.push_back("strategy_count must be >= 1");
    if (prompt_count < 1) out.push_back("prompt_count must be >= 1");
    if (cardinal_count + ordinal_count < 1) out.push_back("at least one metric is required");
    if (ordinal_count > 0 && ordinal_levels < 1) out.push_back("ordinal_levels must be >= 1");
    if (!(effect.delta >= 0.0 && effect.delta <= 1.0)) out.push_back("delta must lie in [0,1]");
    if (!(effect.bump_probability >= 0.0 && effect.bump_probability <= 1.0))
        out.push_back("bump_probability must lie in [0,1]");
    if (!strategy_names.empty() && strategy_names.size() != strategy_count)
        out.push_back("strategy_names must name every strategy");
    return out;
}

EvaluationTable generate_table(const SyntheticConfig& config) {
    auto problems = config.violations();
    if (!problems.empty()) throw std::invalid_argument("invalid synthetic config: " + problems.front());

    EvaluationTable table;
    for (std::size_t i = 0; i < config.cardinal_count; ++i)
        table.scale.metrics.push_back({"card" + std::to_string(i + 1), Scale::cardinal, Normalization::none, {}});
    for (std::size_t i = 0; i < config.ordinal_count; ++i)
        table.scale.metrics.push_back({"ord" + std::to_string(i + 1), Scale::ordinal, Normalization::none,
                                       ordinal_level_labels(config.ordinal_levels)});
    for (std::size_t s = 0; s < config.strategy_count; ++s)
        table.strategies.push_back(config.strategy_names.empty() ? "s" + std::to_string(s + 1)
                                                                 : config.strategy_names[s]);
    for (std::size_t p = 0; p < config.prompt_count; ++p)
        table.prompts.push_back({padded("p", p + 1, 3), "synthetic"});

    const bool shift = config.effect.kind == EffectKind::shift;
    const double delta = shift ? config.effect.delta : 0.0;
    // Grid points 0, 0.05, ..., up to 1 - delta so shifted values stay inside [0,1].
    const auto grid_points = static_cast<std::size_t>(std::floor((1.0 - delta) / kGridStep + 1e-9)) + 1;

    Draw draw(config.seed);
    const std::size_t n = table.scale.size();
    table.cells.assign(config.strategy_count * config.prompt_count, QualityVector{std::vector<double>(n)});
    for (std::size_t s = 0; s < config.strategy_count; ++s) {
        const bool designated = shift && s == 0;
        for (std::size_t p = 0; p < config.prompt_count; ++p) {
            auto& cell = table.cell(s, p).values;
            for (std::size_t i = 0; i < config.cardinal_count; ++i) {
                double x = static_cast<double>(draw.index(grid_points)) * kGridStep;
                if (designated) x = std::min(1.0, x + delta);
                cell[i] = x;
            }
            for (std::size_t j = 0; j < config.ordinal_count; ++j) {
                std::size_t rank = draw.index(config.ordinal_levels);
                const bool bump = draw.coin(designated ? config.effect.bump_probability : 0.0);
                if (bump && rank + 1 < config.ordinal_levels) ++rank;
                cell[config.cardinal_count + j] = ordinal_value(rank, config.ordinal_levels);
            }
        }
    }
    return table;
}

CalibrationResult calibration_study(const SyntheticConfig& config, const CalibrationOptions& options) {
    if (options.runs == 0) throw std::invalid_argument("calibration_study: runs must be >= 1");
    if (config.strategy_count < 2) throw std::invalid_argument("calibration_study: need at least two strategies");
    CalibrationResult result;
    result.runs = options.runs;
    result.p_values.assign(options.runs, 1.0);
    std::vector<double> seconds(options.runs, 0.0);
    std::vector<char> rejected(options.runs, 0);
    parallel_for(
        options.runs,
        [&](std::size_t run) {
            const auto start = std::chrono::steady_clock::now();
            SyntheticConfig cfg = config;
            cfg.seed = derive_seed(config.seed, 2 * run);
            const auto table = generate_table(cfg);
            const auto system = build_preference_system(table, {options.r2_budget});
            DStatisticEngine engine(table, system);
            TestOptions test;
            test.resamples = options.resamples;
            test.alpha = options.alpha;
            test.seed = derive_seed(config.seed, 2 * run + 1);
            test.threads = 1;
            const auto res = pairwise_test(engine, 0, 1, test);
            result.p_values[run] = res.p_value;
            rejected[run] = res.reject;
            seconds[run] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        },
        options.threads);
    for (std::size_t r = 0; r < options.runs; ++r) {
        result.rejections += rejected[r] ? 1 : 0;
        result.mean_runtime += seconds[r];
    }
    result.rejection_rate = static_cast<double>(result.rejections) / static_cast<double>(options.runs);
    result.mean_runtime /= static_cast<double>(options.runs);
    return result;
}

namespace {

struct StrategyProfile {
    const char* name;
    double repeat_prob;   // chance of re-emitting an earlier 2-4 token span
    std::size_t vocab;    // distinct tokens available
    double uncond_mean;   // mean negative log-probability (unconditional)
    double cond_mean;     // mean negative log-probability given the prompt
    double quality;       // latent Likert quality
};

constexpr StrategyProfile kProfiles[] = {
    {"human", 0.01, 460, 2.0, 1.2, 4.0},
    {"beam_search", 0.30, 120, 1.1, 1.0, 2.5},
    {"contrastive", 0.06, 300, 2.4, 1.9, 3.2},
    {"temperature", 0.03, 520, 3.9, 3.4, 2.8},
    {"top_k", 0.05, 340, 2.8, 2.3, 3.0},
    {"top_p", 0.05, 380, 2.9, 2.3, 3.1},
};

int likert(double latent) { return static_cast<int>(std::clamp(std::lround(latent), 1L, 5L)); }

} // namespace

SyntheticBenchmark generate_benchmark(std::size_t prompt_count, std::uint64_t seed) {
    if (prompt_count == 0) throw std::invalid_argument("generate_benchmark: prompt_count must be >= 1");
    SyntheticBenchmark bench;
    Draw draw(seed);
    std::vector<std::string> prompt_ids;
    std::vector<double> prompt_effect;
    for (std::size_t p = 0; p < prompt_count; ++p) {
        prompt_ids.push_back(padded("p", p + 1, 3));
        prompt_effect.push_back(0.35 * draw.normal());
    }
    for (std::size_t p = 0; p < prompt_count; ++p) {
        for (const auto& prof : kProfiles) {
            TokenRecord rec;
            rec.prompt_id = prompt_ids[p];
            rec.strategy = prof.name;
            const std::size_t length = 40 + draw.index(41);
            while (rec.tokens.size() < length) {
                if (rec.tokens.size() >= 4 && draw.coin(prof.repeat_prob)) {
                    const std::size_t span = 2 + draw.index(3);
                    const std::size_t from = draw.index(rec.tokens.size() - span + 1);
                    for (std::size_t k = 0; k < span && rec.tokens.size() < length; ++k)
                        rec.tokens.push_back(rec.tokens[from + k]);
                } else {
                    // Squaring skews draws toward frequent tokens.
                    const double u = draw.uniform();
                    rec.tokens.push_back("w" + std::to_string(static_cast<std::size_t>(u * u * prof.vocab)));
                }
            }
            for (std::size_t i = 0; i < rec.tokens.size(); ++i) {
                rec.uncond_logprob.push_back(-draw.exponential(prof.uncond_mean));
                rec.cond_logprob.push_back(-draw.exponential(prof.cond_mean));
            }
            bench.tokens.push_back(std::move(rec));

            const double latent = prof.quality + prompt_effect[p];
            RatingRow row;
            row.prompt_id = prompt_ids[p];
            row.strategy = prof.name;
            row.rater_a = likert(latent + 0.6 * draw.normal());
            row.rater_b = likert(latent - 0.2 + 0.6 * draw.normal());
            bench.ratings.push_back(std::move(row));
        }
    }

    const auto metrics = compute_text_metrics(bench.tokens, QTextParams{});
    auto& table = bench.table;
    table.scale.metrics = {
        {"qtext", Scale::cardinal, Normalization::none, {}},
        {"rater_a", Scale::ordinal, Normalization::none, ordinal_level_labels(5)},
        {"rater_b", Scale::ordinal, Normalization::none, ordinal_level_labels(5)},
    };
    for (const auto& prof : kProfiles) table.strategies.push_back(prof.name);
    for (std::size_t p = 0; p < prompt_count; ++p)
        table.prompts.push_back({prompt_ids[p], p < (prompt_count + 1) / 2 ? "wikinews" : "wikitext"});
    const std::size_t k = table.strategies.size();
    table.cells.assign(k * prompt_count, QualityVector{std::vector<double>(3)});
    for (std::size_t p = 0; p < prompt_count; ++p)
        for (std::size_t s = 0; s < k; ++s) {
            const std::size_t idx = p * k + s;
            auto& cell = table.cell(s, p).values;
            cell[0] = metrics[idx].qtext;
            cell[1] = ordinal_value(static_cast<std::size_t>(bench.ratings[idx].rater_a - 1), 5);
            cell[2] = ordinal_value(static_cast<std::size_t>(bench.ratings[idx].rater_b - 1), 5);
        }
    auto [lo, hi] = std::minmax_element(metrics.begin(), metrics.end(),
                                        [](const auto& a, const auto& b) { return a.qtext < b.qtext; });
    table.anchors.push_back({"qtext", Normalization::none, lo->qtext, hi->qtext});
    return bench;
}

std::string token_records_to_jsonl(const std::vector<TokenRecord>& records) {
    std::ostringstream os;
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["prompt_id"] = r.prompt_id;
        j["strategy"] = r.strategy;
        j["tokens"] = r.tokens;
        j["uncond_logprob"] = r.uncond_logprob;
        j["cond_logprob"] = r.cond_logprob;
        os << j.dump() << '\n';
    }
    return os.str();
}

std::string ratings_to_csv(const std::vector<RatingRow>& rows) {
    std::ostringstream os;
    os << "prompt_id,strategy,rater_a,rater_b\n";
    for (const auto& r : rows)
        os << csv_escape(r.prompt_id) << ',' << csv_escape(r.strategy) << ',' << r.rater_a << ',' << r.rater_b << '\n';
    return os.str();
}

} // namespace gsdfront

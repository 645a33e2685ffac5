#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gsdfront/agreement.hpp"
#include "gsdfront/data_model.hpp"
#include "gsdfront/order_structure.hpp"

namespace gsdfront {

enum class EffectKind { null, shift };

struct Effect {
    EffectKind kind = EffectKind::null;
    // Added to every cardinal value of the designated strategy.
    double delta = 0.0;
    // Chance that an ordinal level of the designated strategy moves up one step (capped at the top).
    double bump_probability = 1.0;
};

struct SyntheticConfig {
    std::size_t strategy_count = 2;
    std::size_t prompt_count = 20;
    std::size_t cardinal_count = 1;
    std::size_t ordinal_count = 2;
    std::size_t ordinal_levels = 5;
    Effect effect;
    std::uint64_t seed = 0;
    // Optional names; defaults to s1..sk. The first strategy is the designated one.
    std::vector<std::string> strategy_names;

    std::vector<std::string> violations() const;
};

// Cardinal values are drawn uniformly from a 0.05 grid on [0, 1 - delta] (delta = 0 under the null)
// and ordinal levels uniformly; the designated strategy then receives the shift. Deterministic in seed.
// Throws std::invalid_argument for an invalid config.
EvaluationTable generate_table(const SyntheticConfig& config);

struct CalibrationResult {
    std::size_t runs = 0;
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
    double mean_runtime = 0.0;  // seconds per run
    std::vector<double> p_values;  // by run index
};

struct CalibrationOptions {
    std::size_t runs = 100;
    std::size_t resamples = 200;
    double alpha = 0.05;
    std::size_t r2_budget = kDefaultR2Budget;
    std::size_t threads = 0;
};

// Repeats generate -> pairwise test (designated strategy against the second one).
// Throws std::invalid_argument when runs == 0 or the config has fewer than two strategies.
CalibrationResult calibration_study(const SyntheticConfig& config, const CalibrationOptions& options);

// A self-contained six-strategy benchmark: token records, two-rater Likert scores, and the
// evaluation table combining Q*Text with both raters.
struct SyntheticBenchmark {
    std::vector<TokenRecord> tokens;
    std::vector<RatingRow> ratings;
    EvaluationTable table;
};

SyntheticBenchmark generate_benchmark(std::size_t prompt_count, std::uint64_t seed);

std::string token_records_to_jsonl(const std::vector<TokenRecord>& records);
std::string ratings_to_csv(const std::vector<RatingRow>& rows);

} // namespace gsdfront

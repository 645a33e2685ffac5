#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gsdfront {

// Two raters' ordinal scores on a c-level scale, levels coded 1..c.
struct RatingPairs {
    std::vector<int> rater_a;
    std::vector<int> rater_b;
    int levels = 5;

    std::vector<std::string> violations() const;
};

// Linearly weighted Cohen's kappa, 1 - sum(v O) / sum(v E) with v_ij = |i-j| / (c-1).
// nullopt when the expected disagreement is zero (both raters constant at one level).
// Throws std::invalid_argument if the pairs are invalid.
std::optional<double> weighted_kappa(const RatingPairs& pairs);

struct AgreementSummary {
    double within_one_share = 0.0;
    double mean_abs_diff = 0.0;
};

// Throws std::invalid_argument if the pairs are invalid.
AgreementSummary agreement_summary(const RatingPairs& pairs);

struct RatingRow {
    std::string prompt_id;
    std::string strategy;
    int rater_a = 0;
    int rater_b = 0;
};

// CSV `prompt_id,strategy,rater_a,rater_b`. Throws DataError on malformed input.
std::vector<RatingRow> parse_ratings(const std::string& csv_text);
std::vector<RatingRow> load_ratings(const std::filesystem::path& path);
RatingPairs rating_pairs(const std::vector<RatingRow>& rows, int levels);

} // namespace gsdfront

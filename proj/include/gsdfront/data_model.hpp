#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsdfront/error.hpp"

namespace gsdfront {

enum class Scale { cardinal, ordinal };
enum class Normalization { none, minmax, inverse_minmax };

struct MetricSpec {
    std::string name;
    Scale scale = Scale::cardinal;
    Normalization normalization = Normalization::none;
    // Ordered worst to best. Only meaningful for ordinal metrics.
    std::vector<std::string> ordinal_levels;
};

// Declared metrics, cardinal ones first so that indices [0, z) are cardinal.
struct ScaleSpec {
    std::vector<MetricSpec> metrics;

    std::size_t size() const noexcept { return metrics.size(); }
    std::size_t cardinal_count() const noexcept;
    // Empty when the invariants hold.
    std::vector<std::string> violations() const;
    // Throws DataError listing the first violation.
    void check() const;
};

// Rank i (0-based) of a c-level ordinal scale maps to i / (c - 1); a single level maps to 0.5.
double ordinal_value(std::size_t rank, std::size_t level_count);

struct QualityVector {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    friend bool operator==(const QualityVector&, const QualityVector&) = default;
};

struct Prompt {
    std::string id;
    std::string dataset;
    friend bool operator==(const Prompt&, const Prompt&) = default;
};

// Raw min/max of a normalized column, kept so reports can state the anchors.
struct NormalizationAnchor {
    std::string metric;
    Normalization method = Normalization::none;
    double min = 0.0;
    double max = 0.0;
};

// The empirical law over strategies x prompts. Every prompt carries weight 1/m.
struct EvaluationTable {
    std::vector<std::string> strategies;
    std::vector<Prompt> prompts;
    // Row-major: cells[s * prompts.size() + p].
    std::vector<QualityVector> cells;
    ScaleSpec scale;
    std::vector<NormalizationAnchor> anchors;

    std::size_t strategy_count() const noexcept { return strategies.size(); }
    std::size_t prompt_count() const noexcept { return prompts.size(); }
    const QualityVector& cell(std::size_t strategy, std::size_t prompt) const;
    QualityVector& cell(std::size_t strategy, std::size_t prompt);
    // Throws std::invalid_argument for an unknown id.
    std::size_t strategy_index(const std::string& id) const;
    std::optional<std::size_t> find_strategy(const std::string& id) const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
};

struct TokenRecord {
    std::string prompt_id;
    std::string strategy;
    std::vector<std::string> tokens;
    std::vector<double> uncond_logprob;
    std::vector<double> cond_logprob;
};

// Maps raw values into [0,1]. Constant columns map to 0.5 everywhere.
// Throws std::invalid_argument on empty input.
std::vector<double> normalize_column(std::span<const double> raw, Normalization method);

ValidationReport validate(const EvaluationTable& table);

ScaleSpec parse_scale_spec(const std::string& json_text);
ScaleSpec load_scale_spec(const std::filesystem::path& path);
std::string scale_spec_to_json(const ScaleSpec& scale);

// Parses the evaluation CSV (`prompt_id,dataset,strategy,<metrics...>`) and normalizes it per `scale`.
EvaluationTable parse_evaluation_table(const std::string& csv_text, const ScaleSpec& scale);
EvaluationTable load_evaluation_table(const std::filesystem::path& table_path,
                                      const std::filesystem::path& scale_path);

// Writes normalized values; pair it with normalized_scale() to reload the same table.
std::string evaluation_table_to_csv(const EvaluationTable& table);
ScaleSpec normalized_scale(const ScaleSpec& scale);

std::vector<TokenRecord> parse_token_records(const std::string& jsonl_text);
std::vector<TokenRecord> load_token_records(const std::filesystem::path& path);

std::string to_string(Scale scale);
std::string to_string(Normalization method);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Minimal RFC-4180 style splitting: quoted fields, doubled quotes, CRLF tolerant.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_escape(const std::string& field);
// Shortest representation that round-trips a double.
std::string format_double(double value);

} // namespace gsdfront

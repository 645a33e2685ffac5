#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gsdfront/data_model.hpp"

namespace gsdfront {

// Product over n = 2..4 of unique n-grams / total n-grams. A factor whose n-gram count is zero
// (sequence shorter than n) counts as 1.
double diversity(std::span<const std::string> tokens);

// exp(-mean log p). Throws std::invalid_argument on empty input or a positive / non-finite entry.
double perplexity(std::span<const double> uncond_logprob);

// Mean conditional log-probability. Throws std::invalid_argument on empty input or a positive / non-finite entry.
double coherence(std::span<const double> cond_logprob);

// exp(-alpha (x - mu)^2). Throws std::invalid_argument for negative alpha.
double gaussian_penalty(double x, double mu, double alpha);

// Order of the three inputs: inverse-normalized perplexity, normalized coherence, normalized diversity.
struct QTextParams {
    std::array<double, 3> weights{1.0, 1.0, 1.0};
    std::array<double, 3> targets{0.5, 0.5, 0.5};
    std::array<double, 3> strengths{0.0, 0.0, 0.0};

    std::vector<std::string> violations() const;
    friend bool operator==(const QTextParams&, const QTextParams&) = default;
};

// sum w_i M_i P_i(M_i) / sum w_i. Throws std::invalid_argument when all weights are zero.
double qtext(const std::array<double, 3>& normalized, const QTextParams& params);

// Raw metric triple of one text.
struct TextMetrics {
    std::string prompt_id;
    std::string strategy;
    double diversity = 0.0;
    double perplexity = 1.0;
    double coherence = 0.0;
    double qtext = 0.0;
};

struct QTextAnchors {
    double perplexity_min = 0.0, perplexity_max = 0.0;
    double coherence_min = 0.0, coherence_max = 0.0;
    double diversity_min = 0.0, diversity_max = 0.0;
};

// Diversity, perplexity and coherence per record; Q*Text from batch-normalized inputs.
std::vector<TextMetrics> compute_text_metrics(std::span<const TokenRecord> records, const QTextParams& params,
                                              QTextAnchors* anchors = nullptr);

// Batch normalization feeding Q*Text: perplexity inverse min-max, coherence and diversity min-max.
std::vector<std::array<double, 3>> qtext_inputs(std::span<const TextMetrics> metrics,
                                                QTextAnchors* anchors = nullptr);

std::string text_metrics_to_csv(std::span<const TextMetrics> metrics);

// Pearson correlation of average ranks. Throws std::invalid_argument for mismatched lengths,
// fewer than two entries, or a constant list.
double spearman_rho(std::span<const double> xs, std::span<const double> ys);

// Average (1-based) ranks with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> xs);

struct QTextSearch {
    std::vector<double> weight_grid;
    std::vector<double> target_grid;
    std::vector<double> strength_grid;
    std::size_t rounds = 3;
    std::size_t restarts = 16;
    std::uint64_t seed = 0;

    static QTextSearch defaults();
};

struct EvaluatedCandidate {
    QTextParams params;
    double rho = 0.0;
};

struct QTextFit {
    QTextParams params;
    double rho = 0.0;
    std::vector<EvaluatedCandidate> evaluated;  // every candidate with a defined correlation
};

// Coordinate-wise grid refinement from fixed starts plus random restarts; returns the best candidate
// seen. Throws std::invalid_argument when fewer than 3 texts are given, the human ratings are constant,
// or no candidate yields a defined correlation.
QTextFit fit_qtext_params(std::span<const std::array<double, 3>> metric_rows, std::span<const double> human,
                          const QTextSearch& search = QTextSearch::defaults());

} // namespace gsdfront

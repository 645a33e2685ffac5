#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gsdfront/inference.hpp"

namespace gsdfront {

struct ContaminationPoint {
    std::size_t k = 0;
    double statistic = 0.0;  // observed statistic after worst-casing k prompts
    double p_value = 1.0;
};

// p-value of a pairwise test as a function of how many prompts an adversary may replace.
struct ContaminationCurve {
    std::string candidate;
    std::string opponent;
    std::vector<ContaminationPoint> points;  // k = 0, 1, ..., k_max
    // Largest k with p_k <= alpha; -1 when even p_0 exceeds alpha.
    long breakdown = -1;
    double alpha = kDefaultAlpha;
};

// Each replaced prompt contributes -1/m (utility range [0,1]); the k largest per-prompt contributions
// under the observed witness utility are replaced. The resampled distribution is left unchanged.
// Throws std::invalid_argument when k_max exceeds the prompt count.
ContaminationCurve contamination_curve(const PairwiseTestResult& test, const DStatisticEngine& engine,
                                       std::size_t k_max);
ContaminationCurve contamination_curve(const PairwiseTestResult& test, const EvaluationTable& table,
                                       const PreferenceSystem& system, std::size_t k_max);

// Smallest breakdown across the sub-tests; -1 if any sub-test is not significant at k = 0.
// Throws std::invalid_argument on an empty list.
long front_breakdown(const std::vector<ContaminationCurve>& curves, double alpha);

} // namespace gsdfront

#include "gsdfront/robustness.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>

namespace gsdfront {

ContaminationCurve contamination_curve(const PairwiseTestResult& test, const DStatisticEngine& engine,
                                       std::size_t k_max) {
    const auto& table = engine.table();
    const std::size_t m = table.prompt_count();
    if (k_max > m) throw std::invalid_argument("contamination_curve: k_max exceeds the prompt count");
    const auto s = table.strategy_index(test.candidate);
    const auto s_prime = table.strategy_index(test.opponent);

    auto contrib = engine.contributions(test.observed.witness, s, s_prime);
    std::sort(contrib.begin(), contrib.end(), std::greater<>());
    const double floor = -1.0 / static_cast<double>(m);

    ContaminationCurve curve;
    curve.candidate = test.candidate;
    curve.opponent = test.opponent;
    curve.alpha = test.alpha;
    double removed = 0.0;
    for (std::size_t k = 0; k <= k_max; ++k) {
        if (k > 0) removed += std::max(0.0, contrib[k - 1] - floor);
        ContaminationPoint point;
        point.k = k;
        // Replacing every prompt leaves exactly the all-minimal sum.
        point.statistic = k == m ? -1.0 : test.observed.value - removed;
        point.p_value = k == 0 ? test.p_value : permutation_p_value(point.statistic, test.resampled);
        curve.points.push_back(point);
    }
    curve.breakdown = front_breakdown({curve}, test.alpha);
    return curve;
}

ContaminationCurve contamination_curve(const PairwiseTestResult& test, const EvaluationTable& table,
                                       const PreferenceSystem& system, std::size_t k_max) {
    DStatisticEngine engine(table, system);
    return contamination_curve(test, engine, k_max);
}

long front_breakdown(const std::vector<ContaminationCurve>& curves, double alpha) {
    if (curves.empty()) throw std::invalid_argument("front_breakdown: no curves");
    long out = std::numeric_limits<long>::max();
    for (const auto& c : curves) {
        long b = -1;
        for (const auto& p : c.points) {
            if (p.p_value <= alpha) b = static_cast<long>(p.k);
            else break;
        }
        out = std::min(out, b);
    }
    return out;
}

} // namespace gsdfront

#include "gsdfront/inference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gsdfront/parallel.hpp"

namespace gsdfront {

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return mix_seed(mix_seed(seed) ^ mix_seed(~index)); }

std::vector<char> swap_mask(std::uint64_t seed, std::uint64_t index, std::size_t prompts) {
    std::mt19937_64 gen(derive_seed(seed, index));
    std::vector<char> mask(prompts);
    for (auto& b : mask) b = static_cast<char>(gen() >> 63);
    return mask;
}

double permutation_p_value(double observed, const std::vector<double>& resampled) {
    const auto at_least = std::count_if(resampled.begin(), resampled.end(),
                                        [&](double r) { return r >= observed - kTieTolerance; });
    return static_cast<double>(1 + at_least) / static_cast<double>(resampled.size() + 1);
}

double upper_quantile(std::vector<double> values, double alpha) {
    if (values.empty()) throw std::invalid_argument("upper_quantile: no values");
    std::sort(values.begin(), values.end());
    const double pos = std::ceil((1.0 - alpha) * static_cast<double>(values.size()));
    const auto idx = static_cast<std::size_t>(std::clamp(pos, 1.0, static_cast<double>(values.size()))) - 1;
    return values[idx];
}

PairwiseTestResult pairwise_test(const DStatisticEngine& engine, std::size_t candidate, std::size_t opponent,
                                 const TestOptions& options) {
    if (options.resamples == 0) throw std::invalid_argument("pairwise_test: resamples must be at least 1");
    if (candidate == opponent) throw std::invalid_argument("pairwise_test: candidate and opponent are identical");
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw std::invalid_argument("pairwise_test: alpha must lie in (0,1)");
    const auto& table = engine.table();
    PairwiseTestResult result;
    result.candidate = table.strategies.at(candidate);
    result.opponent = table.strategies.at(opponent);
    result.alpha = options.alpha;
    result.seed = options.seed;

    result.observed = engine.compute(candidate, opponent);

    const std::size_t m = table.prompt_count();
    result.resampled.assign(options.resamples, 0.0);
    parallel_for(
        options.resamples,
        [&](std::size_t r) {
            const auto mask = swap_mask(options.seed, r + 1, m);
            result.resampled[r] = engine.compute_swapped(candidate, opponent, mask);
        },
        options.threads);

    result.p_value = permutation_p_value(result.observed.value, result.resampled);
    result.threshold = upper_quantile(result.resampled, options.alpha);
    result.reject = result.p_value <= options.alpha;
    return result;
}

PairwiseTestResult pairwise_test(const EvaluationTable& table, const PreferenceSystem& system,
                                 const std::string& candidate, const std::string& opponent,
                                 const TestOptions& options) {
    DStatisticEngine engine(table, system);
    return pairwise_test(engine, table.strategy_index(candidate), table.strategy_index(opponent), options);
}

FrontTestResult front_membership_test(const DStatisticEngine& engine, std::size_t candidate,
                                      const TestOptions& options) {
    const auto& table = engine.table();
    FrontTestResult result;
    result.candidate = table.strategies.at(candidate);
    result.alpha = options.alpha;
    result.reject_h0 = true;
    for (std::size_t j = 0; j < table.strategy_count(); ++j) {
        if (j == candidate) continue;
        TestOptions sub = options;
        sub.seed = derive_seed(options.seed, j);
        result.pairwise.push_back(pairwise_test(engine, candidate, j, sub));
        result.reject_h0 = result.reject_h0 && result.pairwise.back().reject;
    }
    return result;
}

FrontTestResult front_membership_test(const EvaluationTable& table, const std::string& candidate,
                                      const TestOptions& options, const SystemOptions& system_options) {
    const auto idx = table.strategy_index(candidate);
    auto system = build_preference_system(table, system_options);
    DStatisticEngine engine(table, system);
    return front_membership_test(engine, idx, options);
}

} // namespace gsdfront

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gsdfront/gsd.hpp"

namespace gsdfront {

inline constexpr std::size_t kDefaultResamples = 1000;
inline constexpr double kDefaultAlpha = 0.05;
// Resampled statistics within this distance of the observed one count as ties (conservative).
inline constexpr double kTieTolerance = 1e-9;

struct TestOptions {
    std::size_t resamples = kDefaultResamples;
    std::uint64_t seed = 0;
    double alpha = kDefaultAlpha;
    std::size_t threads = 0;
};

struct PairwiseTestResult {
    std::string candidate;
    std::string opponent;
    DStatistic observed;
    std::vector<double> resampled;  // ordered by resample index
    double p_value = 1.0;
    double threshold = 0.0;  // (1 - alpha)-quantile of the resampled values
    double alpha = kDefaultAlpha;
    bool reject = false;
    std::uint64_t seed = 0;
};

struct FrontTestResult {
    std::string candidate;
    std::vector<PairwiseTestResult> pairwise;
    bool reject_h0 = false;
    double alpha = kDefaultAlpha;
};

// splitmix64 finalizer; also used to derive per-task seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Per-prompt swap indicators of resample `index` (fair coin per prompt).
std::vector<char> swap_mask(std::uint64_t seed, std::uint64_t index, std::size_t prompts);

// (1 + #{resampled >= observed}) / (R + 1).
double permutation_p_value(double observed, const std::vector<double>& resampled);
double upper_quantile(std::vector<double> values, double alpha);

// Throws std::invalid_argument when resamples == 0 or candidate == opponent.
PairwiseTestResult pairwise_test(const DStatisticEngine& engine, std::size_t candidate, std::size_t opponent,
                                 const TestOptions& options);
PairwiseTestResult pairwise_test(const EvaluationTable& table, const PreferenceSystem& system,
                                 const std::string& candidate, const std::string& opponent,
                                 const TestOptions& options);

FrontTestResult front_membership_test(const DStatisticEngine& engine, std::size_t candidate,
                                      const TestOptions& options);
FrontTestResult front_membership_test(const EvaluationTable& table, const std::string& candidate,
                                      const TestOptions& options, const SystemOptions& system_options = {});

} // namespace gsdfront

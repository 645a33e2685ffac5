#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gsdfront/data_model.hpp"
#include "gsdfront/linear_program.hpp"
#include "gsdfront/order_structure.hpp"

namespace gsdfront {

inline constexpr double kDominanceTolerance = 1e-8;

// Utility values indexed by PreferenceSystem node.
using UtilityAssignment = std::vector<double>;

// Empirical inf over compatible utilities of mean u(candidate) - mean u(opponent).
struct DStatistic {
    double value = 0.0;
    UtilityAssignment witness;
    std::string candidate;
    std::string opponent;
};

enum class ConstraintSet {
    generators,  // r1_reduced plus the pruned R2 generators (default)
    full,        // every materialized R1 pair and R2 quadruple
};

// The utility LP of one PreferenceSystem. Only the objective differs between strategy pairs and
// resamples, so one instance serves every D computation over a table.
class DStatisticEngine {
public:
    DStatisticEngine(const EvaluationTable& table, const PreferenceSystem& system,
                     ConstraintSet constraints = ConstraintSet::generators);
    // The engine keeps references to both arguments.
    DStatisticEngine(EvaluationTable&&, const PreferenceSystem&, ConstraintSet = ConstraintSet::generators) = delete;
    DStatisticEngine(const EvaluationTable&, PreferenceSystem&&, ConstraintSet = ConstraintSet::generators) = delete;

    const EvaluationTable& table() const noexcept { return *table_; }
    const PreferenceSystem& system() const noexcept { return *system_; }
    const lp::LinearProgram& program() const noexcept { return solver_.program(); }

    // Objective coefficients of D(s, s'); prompts with swapped[p] != 0 exchange the two strategies.
    std::vector<double> objective(std::size_t s, std::size_t s_prime, std::span<const char> swapped = {}) const;

    // Direct summation (1/m) sum_p [u(cell(s,p)) - u(cell(s',p))] under the same swap mask.
    double evaluate(std::span<const double> utility, std::size_t s, std::size_t s_prime,
                    std::span<const char> swapped = {}) const;

    // Per-prompt terms of evaluate(); they sum to the statistic.
    std::vector<double> contributions(std::span<const double> utility, std::size_t s, std::size_t s_prime) const;

    DStatistic compute(std::size_t s, std::size_t s_prime) const;

    // D value with the prompts in the swap mask exchanged between the two strategies.
    double compute_swapped(std::size_t s, std::size_t s_prime, std::span<const char> swapped) const;

private:
    lp::Solution solve(const std::vector<double>& objective) const;

    const EvaluationTable* table_;
    const PreferenceSystem* system_;
    lp::ObjectiveSolver solver_;
};

// Builds the LP over `system` with bounds [0,1] per node.
lp::LinearProgram utility_program(const PreferenceSystem& system, ConstraintSet constraints);

// Throws std::invalid_argument for unknown strategy ids.
DStatistic compute_d(const EvaluationTable& table, const PreferenceSystem& system, const std::string& s,
                     const std::string& s_prime);

bool gsd_weak(double d, double tol = kDominanceTolerance);
bool gsd_weak(const DStatistic& d, double tol = kDominanceTolerance);
bool gsd_strict(double d_fwd, double d_rev, double tol = kDominanceTolerance);
bool gsd_strict(const DStatistic& d_fwd, const DStatistic& d_rev, double tol = kDominanceTolerance);

struct PairVerdict {
    double d = 0.0;  // D(row, column)
    bool weak = false;
    bool strict = false;
};

struct FrontResult {
    std::vector<std::string> strategies;
    std::vector<std::string> front;
    // dominance[i][j] describes D(strategies[i], strategies[j]).
    std::vector<std::vector<PairVerdict>> dominance;
    double tolerance = kDominanceTolerance;
};

struct FrontOptions {
    double tolerance = kDominanceTolerance;
    std::size_t threads = 0;
};

FrontResult gsd_front(const EvaluationTable& table, const PreferenceSystem& system, const FrontOptions& options = {});
FrontResult gsd_front(const EvaluationTable& table, const FrontOptions& options = {},
                      const SystemOptions& system_options = {});

} // namespace gsdfront

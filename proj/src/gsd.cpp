#include "gsdfront/gsd.hpp"

#include <stdexcept>

#include "gsdfront/parallel.hpp"

namespace gsdfront {

lp::LinearProgram utility_program(const PreferenceSystem& system, ConstraintSet constraints) {
    const std::size_t n = system.node_count();
    lp::LinearProgram prog;
    prog.var_count = n;
    prog.objective.assign(n, 0.0);
    prog.lower.assign(n, 0.0);
    prog.upper.assign(n, 1.0);
    const bool full = constraints == ConstraintSet::full;
    for (const auto& [a, b] : full ? system.r1 : system.r1_reduced) {
        if (a == b) continue;
        prog.constraints.push_back({{{a, 1.0}, {b, -1.0}}, 0.0});
    }
    for (const auto& q : full ? system.r2 : system.r2_generators)
        prog.constraints.push_back({{{q.t, 1.0}, {q.u, -1.0}, {q.v, -1.0}, {q.w, 1.0}}, 0.0});
    return prog;
}

DStatisticEngine::DStatisticEngine(const EvaluationTable& table, const PreferenceSystem& system,
                                   ConstraintSet constraints)
    : table_(&table), system_(&system), solver_(utility_program(system, constraints)) {
    if (system.node_of_cell.size() != table.cells.size())
        throw std::invalid_argument("preference system was not built from this table");
}

std::vector<double> DStatisticEngine::objective(std::size_t s, std::size_t s_prime,
                                                std::span<const char> swapped) const {
    const std::size_t m = table_->prompt_count();
    std::vector<double> c(system_->node_count(), 0.0);
    const double w = 1.0 / static_cast<double>(m);
    for (std::size_t p = 0; p < m; ++p) {
        const bool swap = !swapped.empty() && swapped[p];
        const auto a = system_->node_of_cell[(swap ? s_prime : s) * m + p];
        const auto b = system_->node_of_cell[(swap ? s : s_prime) * m + p];
        c[a] += w;
        c[b] -= w;
    }
    return c;
}

double DStatisticEngine::evaluate(std::span<const double> utility, std::size_t s, std::size_t s_prime,
                                  std::span<const char> swapped) const {
    const std::size_t m = table_->prompt_count();
    double sum = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
        const bool swap = !swapped.empty() && swapped[p];
        const auto a = system_->node_of_cell[(swap ? s_prime : s) * m + p];
        const auto b = system_->node_of_cell[(swap ? s : s_prime) * m + p];
        sum += utility[a] - utility[b];
    }
    return sum / static_cast<double>(m);
}

std::vector<double> DStatisticEngine::contributions(std::span<const double> utility, std::size_t s,
                                                    std::size_t s_prime) const {
    const std::size_t m = table_->prompt_count();
    std::vector<double> out(m);
    for (std::size_t p = 0; p < m; ++p) {
        const auto a = system_->node_of_cell[s * m + p];
        const auto b = system_->node_of_cell[s_prime * m + p];
        out[p] = (utility[a] - utility[b]) / static_cast<double>(m);
    }
    return out;
}

lp::Solution DStatisticEngine::solve(const std::vector<double>& objective) const {
    auto sol = solver_.solve(objective);
    // The constant utility 0.5 is always feasible, so anything else is a solver fault.
    if (sol.status != lp::Status::optimal)
        throw std::logic_error("utility LP reported " + lp::to_string(sol.status));
    return sol;
}

DStatistic DStatisticEngine::compute(std::size_t s, std::size_t s_prime) const {
    DStatistic d;
    d.candidate = table_->strategies.at(s);
    d.opponent = table_->strategies.at(s_prime);
    auto sol = solve(objective(s, s_prime));
    d.witness = std::move(sol.assignment);
    d.value = evaluate(d.witness, s, s_prime);
    return d;
}

double DStatisticEngine::compute_swapped(std::size_t s, std::size_t s_prime, std::span<const char> swapped) const {
    auto sol = solve(objective(s, s_prime, swapped));
    return evaluate(sol.assignment, s, s_prime, swapped);
}

DStatistic compute_d(const EvaluationTable& table, const PreferenceSystem& system, const std::string& s,
                     const std::string& s_prime) {
    const auto a = table.strategy_index(s);
    const auto b = table.strategy_index(s_prime);
    DStatisticEngine engine(table, system);
    return engine.compute(a, b);
}

bool gsd_weak(double d, double tol) { return d >= -tol; }
bool gsd_weak(const DStatistic& d, double tol) { return gsd_weak(d.value, tol); }
bool gsd_strict(double d_fwd, double d_rev, double tol) { return gsd_weak(d_fwd, tol) && !gsd_weak(d_rev, tol); }
bool gsd_strict(const DStatistic& d_fwd, const DStatistic& d_rev, double tol) {
    return gsd_strict(d_fwd.value, d_rev.value, tol);
}

FrontResult gsd_front(const EvaluationTable& table, const PreferenceSystem& system, const FrontOptions& options) {
    const std::size_t k = table.strategy_count();
    FrontResult result;
    result.strategies = table.strategies;
    result.tolerance = options.tolerance;
    result.dominance.assign(k, std::vector<PairVerdict>(k));
    DStatisticEngine engine(table, system);

    std::vector<double> d(k * k, 0.0);
    parallel_for(
        k * k,
        [&](std::size_t idx) {
            const auto i = idx / k;
            const auto j = idx % k;
            if (i != j) d[idx] = engine.compute(i, j).value;
        },
        options.threads);

    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            auto& cell = result.dominance[i][j];
            cell.d = d[i * k + j];
            cell.weak = gsd_weak(cell.d, options.tolerance);
            cell.strict = i != j && gsd_strict(d[i * k + j], d[j * k + i], options.tolerance);
        }
    for (std::size_t j = 0; j < k; ++j) {
        bool dominated = false;
        for (std::size_t i = 0; i < k && !dominated; ++i) dominated = result.dominance[i][j].strict;
        if (!dominated) result.front.push_back(table.strategies[j]);
    }
    return result;
}

FrontResult gsd_front(const EvaluationTable& table, const FrontOptions& options, const SystemOptions& system_options) {
    auto system = build_preference_system(table, system_options);
    return gsd_front(table, system, options);
}

} // namespace gsdfront

#include "gsdfront/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>

namespace gsdfront::lp {

// The solver works on the dual of the box-shifted program. With y = x - lower in [0, U]:
//
//   primal:  min c.y   s.t.  A y >= b',  -y >= -U,  y >= 0
//   dual:    max b'.l - U.m   s.t.  A^T l - m + s = c,  l, m, s >= 0
//
// The dual always has the feasible basis {s_v if c_v >= 0, m_v otherwise}, so no phase one is
// needed. At a dual optimum the simplex multipliers are an optimal y; an unbounded dual means the
// primal constraints are infeasible. The primal is never unbounded because every box is finite.

std::string to_string(Status status) {
    switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    }
    return "unknown";
}

std::vector<std::string> LinearProgram::violations() const {
    std::vector<std::string> out;
    if (objective.size() != var_count) out.push_back("objective length differs from var_count");
    if (lower.size() != var_count || upper.size() != var_count) out.push_back("bounds length differs from var_count");
    for (double c : objective)
        if (!std::isfinite(c)) out.push_back("non-finite objective coefficient");
    for (std::size_t v = 0; v < std::min(lower.size(), upper.size()); ++v) {
        if (!std::isfinite(lower[v]) || !std::isfinite(upper[v])) out.push_back("non-finite bound");
        else if (lower[v] > upper[v]) out.push_back("lower bound exceeds upper bound for variable " + std::to_string(v));
    }
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        const auto& con = constraints[k];
        if (!std::isfinite(con.rhs)) out.push_back("non-finite rhs in constraint " + std::to_string(k));
        for (const auto& t : con.terms) {
            if (t.var >= var_count) out.push_back("constraint " + std::to_string(k) + " references a missing variable");
            if (!std::isfinite(t.coeff)) out.push_back("non-finite coefficient in constraint " + std::to_string(k));
        }
    }
    return out;
}

CertificateReport verify_certificate(const LinearProgram& lp, const Solution& solution, double tol) {
    CertificateReport report;
    if (solution.status != Status::optimal || solution.assignment.size() != lp.var_count) return report;
    const auto& x = solution.assignment;
    double worst = 0.0;
    for (std::size_t v = 0; v < lp.var_count; ++v) {
        worst = std::max(worst, lp.lower[v] - x[v]);
        worst = std::max(worst, x[v] - lp.upper[v]);
    }
    for (const auto& con : lp.constraints) {
        double lhs = 0.0;
        for (const auto& t : con.terms) lhs += t.coeff * x[t.var];
        worst = std::max(worst, con.rhs - lhs);
    }
    double value = 0.0;
    for (std::size_t v = 0; v < lp.var_count; ++v) value += lp.objective[v] * x[v];
    report.max_violation = worst;
    report.objective_gap = std::abs(value - solution.value);
    report.ok = worst <= tol && report.objective_gap <= tol;
    return report;
}

struct ObjectiveSolver::Columns {
    std::size_t rows = 0;           // primal variable count
    std::size_t lambda_count = 0;   // primal constraint count
    std::vector<std::vector<Term>> lambda;  // merged, zero-free coefficients of each constraint
    std::vector<double> cost;       // dual objective per column
    std::vector<double> span;       // upper - lower per primal variable

    std::size_t column_count() const { return lambda_count + 2 * rows; }

    // Dense copy of column j.
    void scatter(std::size_t j, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        if (j < lambda_count) {
            for (const auto& t : lambda[j]) out[t.var] = t.coeff;
        } else if (j < lambda_count + rows) {
            out[j - lambda_count] = -1.0;
        } else {
            out[j - lambda_count - rows] = 1.0;
        }
    }

    double dot(std::size_t j, const std::vector<double>& row) const {
        if (j < lambda_count) {
            double s = 0.0;
            for (const auto& t : lambda[j]) s += t.coeff * row[t.var];
            return s;
        }
        if (j < lambda_count + rows) return -row[j - lambda_count];
        return row[j - lambda_count - rows];
    }
};

namespace {

constexpr double kHarrisPrimal = 1e-11;
constexpr double kHarrisDual = 1e-11;
constexpr double kCostPerturbation = 1e-7;
constexpr double kValuePerturbation = 1e-7;
constexpr double kFeasTol = 1e-12;
constexpr std::size_t kPerturbRounds = 4;

std::vector<Term> merge_terms(const std::vector<Term>& terms) {
    std::map<std::size_t, double> acc;
    for (const auto& t : terms) acc[t.var] += t.coeff;
    std::vector<Term> out;
    for (const auto& [var, coeff] : acc)
        if (coeff != 0.0) out.push_back({var, coeff});
    return out;
}

class Simplex {
public:
    Simplex(const ObjectiveSolver::Columns& cols, std::span<const double> rhs, const SolverOptions& options)
        : cols_(cols), rhs_(rhs.begin(), rhs.end()), rhs_true_(rhs_), cost_(cols.cost), opt_(options), n_(cols.rows) {}

    void cold_start() {
        basis_.assign(n_, 0);
        binv_.assign(n_ * n_, 0.0);
        for (std::size_t v = 0; v < n_; ++v) {
            const bool slack = rhs_[v] >= 0.0;
            basis_[v] = slack ? cols_.lambda_count + n_ + v : cols_.lambda_count + v;
            binv_[v * n_ + v] = slack ? 1.0 : -1.0;
        }
        finish_setup();
    }

    // Returns false if the dual is unbounded (primal infeasible).
    bool run() {
        for (std::size_t round = 0; round < kPerturbRounds; ++round) {
            perturb_costs();
            const bool feasible = restore_feasibility();
            cost_ = cols_.cost;
            if (!feasible) return false;
            perturb_values();
            const bool bounded = optimize();
            rhs_ = rhs_true_;
            if (!bounded) return false;
            compute_xb();
            if (std::all_of(xb_.begin(), xb_.end(), [](double x) { return x >= -kFeasTol; })) return true;
        }
        return restore_feasibility() && optimize();
    }

    std::vector<double> multipliers() const {
        std::vector<double> pi(n_, 0.0);
        for (std::size_t r = 0; r < n_; ++r) {
            const double h = cost_[basis_[r]];
            if (h == 0.0) continue;
            const double* row = &binv_[r * n_];
            for (std::size_t v = 0; v < n_; ++v) pi[v] += h * row[v];
        }
        return pi;
    }

    std::size_t iterations() const { return iterations_; }

private:
    void finish_setup() {
        is_basic_.assign(cols_.column_count(), 0);
        for (auto j : basis_) is_basic_[j] = 1;
        compute_xb();
        since_refactor_ = 0;
    }

    // Lowers nonbasic costs by small distinct amounts so dual ratio ties are rare. Reduced costs
    // only decrease, so a dual-feasible basis stays dual feasible.
    void perturb_costs() {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (std::size_t j = 0; j < cost_.size(); ++j) {
            h ^= h >> 31;
            h *= 0xbf58476d1ce4e5b9ULL;
            h ^= h >> 29;
            if (is_basic_[j]) continue;
            const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
            cost_[j] -= kCostPerturbation * (1.0 + u) * (1.0 + std::abs(cost_[j]));
        }
    }

    // Lifts basic values by small distinct amounts so primal ratio ties are rare. The shift goes
    // into the right-hand side so refactoring keeps it.
    void perturb_values() {
        std::uint64_t h = 0xd1b54a32d192ed03ULL;
        std::vector<double> col(n_);
        for (std::size_t r = 0; r < n_; ++r) {
            h ^= h >> 31;
            h *= 0xbf58476d1ce4e5b9ULL;
            h ^= h >> 29;
            const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
            const double shift = std::max(0.0, -xb_[r]) + kValuePerturbation * (1.0 + u);
            cols_.scatter(basis_[r], col);
            for (std::size_t v = 0; v < n_; ++v) rhs_[v] += shift * col[v];
        }
        compute_xb();
    }

    void compute_xb() {
        xb_.assign(n_, 0.0);
        for (std::size_t r = 0; r < n_; ++r) {
            const double* row = &binv_[r * n_];
            double s = 0.0;
            for (std::size_t v = 0; v < n_; ++v) s += row[v] * rhs_[v];
            xb_[r] = s;
        }
    }

    void compute_reduced_costs() {
        const auto pi = multipliers();
        d_.assign(cols_.column_count(), 0.0);
        for (std::size_t j = 0; j < d_.size(); ++j)
            if (!is_basic_[j]) d_[j] = cost_[j] - cols_.dot(j, pi);
    }

    void refactor() {
        // Gauss-Jordan inversion of the basis matrix with partial pivoting.
        std::vector<double> a(n_ * n_, 0.0), col(n_);
        for (std::size_t r = 0; r < n_; ++r) {
            cols_.scatter(basis_[r], col);
            for (std::size_t v = 0; v < n_; ++v) a[v * n_ + r] = col[v];
        }
        std::vector<double> inv(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) inv[i * n_ + i] = 1.0;
        for (std::size_t c = 0; c < n_; ++c) {
            std::size_t p = c;
            for (std::size_t r = c + 1; r < n_; ++r)
                if (std::abs(a[r * n_ + c]) > std::abs(a[p * n_ + c])) p = r;
            if (std::abs(a[p * n_ + c]) < 1e-14) throw std::runtime_error("simplex: singular basis");
            if (p != c) {
                for (std::size_t k = 0; k < n_; ++k) {
                    std::swap(a[p * n_ + k], a[c * n_ + k]);
                    std::swap(inv[p * n_ + k], inv[c * n_ + k]);
                }
            }
            const double d = a[c * n_ + c];
            for (std::size_t k = 0; k < n_; ++k) {
                a[c * n_ + k] /= d;
                inv[c * n_ + k] /= d;
            }
            for (std::size_t r = 0; r < n_; ++r) {
                if (r == c) continue;
                const double f = a[r * n_ + c];
                if (f == 0.0) continue;
                for (std::size_t k = 0; k < n_; ++k) {
                    a[r * n_ + k] -= f * a[c * n_ + k];
                    inv[r * n_ + k] -= f * inv[c * n_ + k];
                }
            }
        }
        binv_ = std::move(inv);
        compute_xb();
        since_refactor_ = 0;
    }

    void direction(std::size_t q, std::vector<double>& alpha) const {
        alpha.assign(n_, 0.0);
        if (q < cols_.lambda_count) {
            for (std::size_t r = 0; r < n_; ++r) {
                const double* row = &binv_[r * n_];
                double s = 0.0;
                for (const auto& t : cols_.lambda[q]) s += row[t.var] * t.coeff;
                alpha[r] = s;
            }
        } else {
            const bool neg = q < cols_.lambda_count + n_;
            const std::size_t v = neg ? q - cols_.lambda_count : q - cols_.lambda_count - n_;
            for (std::size_t r = 0; r < n_; ++r) alpha[r] = neg ? -binv_[r * n_ + v] : binv_[r * n_ + v];
        }
    }

    // Row r of B^-1 A over the nonbasic columns.
    void pivot_row(std::size_t r, std::vector<double>& row) const {
        const std::vector<double> rho(binv_.begin() + static_cast<std::ptrdiff_t>(r * n_),
                                      binv_.begin() + static_cast<std::ptrdiff_t>((r + 1) * n_));
        row.assign(cols_.column_count(), 0.0);
        for (std::size_t j = 0; j < row.size(); ++j)
            if (!is_basic_[j]) row[j] = cols_.dot(j, rho);
    }

    // Basis change with column q entering at row r. Keeps xB, B^-1 and the reduced costs current.
    void pivot(std::size_t r, std::size_t q, const std::vector<double>& alpha, const std::vector<double>& row) {
        const double theta = xb_[r] / alpha[r];
        for (std::size_t i = 0; i < n_; ++i) xb_[i] -= theta * alpha[i];
        xb_[r] = theta;
        double* prow = &binv_[r * n_];
        const double inv = 1.0 / alpha[r];
        for (std::size_t v = 0; v < n_; ++v) prow[v] *= inv;
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == r || alpha[i] == 0.0) continue;
            double* irow = &binv_[i * n_];
            const double f = alpha[i];
            for (std::size_t v = 0; v < n_; ++v) irow[v] -= f * prow[v];
        }
        const std::size_t leaving = basis_[r];
        const double step = d_[q] / row[q];
        for (std::size_t j = 0; j < d_.size(); ++j)
            if (!is_basic_[j]) d_[j] -= step * row[j];
        d_[q] = 0.0;
        d_[leaving] = -step;
        is_basic_[leaving] = 0;
        is_basic_[q] = 1;
        basis_[r] = q;
        ++iterations_;
        if (++since_refactor_ >= opt_.refactor_every) {
            refactor();
            compute_reduced_costs();
        }
        if (iterations_ > opt_.max_iterations) throw std::runtime_error("simplex: iteration limit exceeded");
    }

    // Dual simplex steps until the basic solution is nonnegative.
    bool restore_feasibility() {
        compute_reduced_costs();
        std::vector<double> alpha, row;
        std::vector<double> weight(n_, 1.0);
        std::size_t degenerate = 0;
        while (true) {
            const bool bland = degenerate >= opt_.degenerate_switch;
            std::size_t r = n_;
            double best = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (xb_[i] >= -kFeasTol) continue;
                const double score = xb_[i] * xb_[i] / weight[i];
                if (r == n_ || (bland ? basis_[i] < basis_[r] : score > best)) {
                    r = i;
                    best = score;
                }
            }
            if (r == n_) return true;
            pivot_row(r, row);
            // Harris two-pass ratio test: bound the step with slightly relaxed reduced costs, then take
            // the largest pivot among the columns that fit under that bound.
            double bound = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (is_basic_[j] || row[j] >= -opt_.pivot_tol) continue;
                bound = std::min(bound, (std::min(0.0, d_[j]) - kHarrisDual) / row[j]);
            }
            std::size_t q = cols_.column_count();
            double best_ratio = std::numeric_limits<double>::infinity();
            double best_mag = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (is_basic_[j] || row[j] >= -opt_.pivot_tol) continue;
                const double ratio = std::min(0.0, d_[j]) / row[j];
                if (bland) {
                    if (ratio < best_ratio - 1e-15) {
                        best_ratio = ratio;
                        q = j;
                    }
                } else if (ratio <= bound && -row[j] > best_mag) {
                    best_mag = -row[j];
                    best_ratio = ratio;
                    q = j;
                }
            }
            if (q == cols_.column_count()) return false;
            degenerate = best_ratio <= 1e-15 ? degenerate + 1 : 0;
            direction(q, alpha);
            if (std::abs(alpha[r]) < opt_.pivot_tol) {
                refactor();
                compute_reduced_costs();
                continue;
            }
            const double wr = weight[r];
            const double ar = alpha[r];
            for (std::size_t i = 0; i < n_; ++i)
                if (i != r) weight[i] = std::max(weight[i], alpha[i] * alpha[i] / (ar * ar) * wr);
            weight[r] = std::max(wr / (ar * ar), 1.0);
            pivot(r, q, alpha, row);
        }
    }

    // Primal simplex steps from a feasible basis with devex pricing.
    bool optimize() {
        compute_reduced_costs();
        std::vector<double> alpha, row;
        std::vector<double> weight(cols_.column_count(), 1.0);
        std::size_t degenerate = 0;
        while (true) {
            const bool bland = degenerate >= opt_.degenerate_switch;
            std::size_t q = cols_.column_count();
            double best = 0.0;
            for (std::size_t j = 0; j < d_.size(); ++j) {
                if (is_basic_[j] || d_[j] <= opt_.optimality_tol) continue;
                if (bland) {
                    q = j;
                    break;
                }
                const double score = d_[j] * d_[j] / weight[j];
                if (score > best) {
                    best = score;
                    q = j;
                }
            }
            if (q == cols_.column_count()) {
                // Confirm with freshly computed reduced costs before declaring optimality.
                compute_reduced_costs();
                bool improvable = false;
                for (std::size_t j = 0; j < d_.size() && !improvable; ++j)
                    improvable = !is_basic_[j] && d_[j] > opt_.optimality_tol;
                if (!improvable) return true;
                continue;
            }
            direction(q, alpha);
            std::size_t r = n_;
            double best_theta = std::numeric_limits<double>::infinity();
            if (bland) {
                for (std::size_t i = 0; i < n_; ++i) {
                    if (alpha[i] <= opt_.pivot_tol) continue;
                    const double theta = std::max(0.0, xb_[i]) / alpha[i];
                    if (r == n_ || theta < best_theta - 1e-15 ||
                        (theta <= best_theta + 1e-15 && basis_[i] < basis_[r])) {
                        r = i;
                        best_theta = theta;
                    }
                }
            } else {
                double bound = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < n_; ++i)
                    if (alpha[i] > opt_.pivot_tol)
                        bound = std::min(bound, (std::max(0.0, xb_[i]) + kHarrisPrimal) / alpha[i]);
                for (std::size_t i = 0; i < n_; ++i) {
                    if (alpha[i] <= opt_.pivot_tol) continue;
                    const double theta = std::max(0.0, xb_[i]) / alpha[i];
                    if (theta <= bound && (r == n_ || alpha[i] > alpha[r])) {
                        r = i;
                        best_theta = theta;
                    }
                }
            }
            if (r == n_) return false;
            degenerate = best_theta <= 1e-15 ? degenerate + 1 : 0;
            pivot_row(r, row);
            const double wq = weight[q];
            const double ar = alpha[r];
            for (std::size_t j = 0; j < row.size(); ++j)
                if (!is_basic_[j] && j != q) weight[j] = std::max(weight[j], row[j] * row[j] / (ar * ar) * wq);
            weight[basis_[r]] = std::max(wq / (ar * ar), 1.0);
            pivot(r, q, alpha, row);
            for (auto& x : xb_)
                if (x < 0.0 && x > -1e-13) x = 0.0;
        }
    }

    const ObjectiveSolver::Columns& cols_;
    std::vector<double> rhs_;
    std::vector<double> rhs_true_;
    std::vector<double> cost_;
    SolverOptions opt_;
    std::size_t n_;
    std::vector<std::size_t> basis_;
    std::vector<double> binv_;
    std::vector<double> xb_;
    std::vector<double> d_;
    std::vector<char> is_basic_;
    std::size_t iterations_ = 0;
    std::size_t since_refactor_ = 0;
};

} // namespace

ObjectiveSolver::ObjectiveSolver(LinearProgram lp, SolverOptions options)
    : lp_(std::move(lp)), options_(options), columns_(std::make_unique<Columns>()) {
    if (lp_.objective.empty()) lp_.objective.assign(lp_.var_count, 0.0);
    auto problems = lp_.violations();
    if (!problems.empty()) throw std::invalid_argument("invalid linear program: " + problems.front());
    auto& cols = *columns_;
    cols.rows = lp_.var_count;
    cols.span.resize(lp_.var_count);
    for (std::size_t v = 0; v < lp_.var_count; ++v) cols.span[v] = lp_.upper[v] - lp_.lower[v];
    for (const auto& con : lp_.constraints) {
        auto terms = merge_terms(con.terms);
        double shifted = con.rhs;
        for (const auto& t : terms) shifted -= t.coeff * lp_.lower[t.var];
        cols.lambda.push_back(std::move(terms));
        cols.cost.push_back(shifted);
    }
    cols.lambda_count = cols.lambda.size();
    for (std::size_t v = 0; v < lp_.var_count; ++v) cols.cost.push_back(-cols.span[v]);
    for (std::size_t v = 0; v < lp_.var_count; ++v) cols.cost.push_back(0.0);
}

ObjectiveSolver::~ObjectiveSolver() = default;
ObjectiveSolver::ObjectiveSolver(ObjectiveSolver&&) noexcept = default;
ObjectiveSolver& ObjectiveSolver::operator=(ObjectiveSolver&&) noexcept = default;

namespace {

Solution finish(const LinearProgram& lp, const ObjectiveSolver::Columns& cols, std::span<const double> objective,
                const std::vector<double>& pi, std::size_t iterations) {
    Solution sol;
    sol.status = Status::optimal;
    sol.iterations = iterations;
    sol.assignment.resize(lp.var_count);
    double value = 0.0;
    for (std::size_t v = 0; v < lp.var_count; ++v) {
        const double y = std::clamp(pi[v], 0.0, cols.span[v]);
        sol.assignment[v] = lp.lower[v] + y;
        value += objective[v] * sol.assignment[v];
    }
    sol.value = value;
    return sol;
}

} // namespace

Solution ObjectiveSolver::solve(std::span<const double> objective) const {
    if (objective.size() != lp_.var_count) throw std::invalid_argument("objective length differs from var_count");
    Simplex simplex(*columns_, objective, options_);
    simplex.cold_start();
    if (!simplex.run()) {
        Solution sol;
        sol.status = Status::infeasible;
        sol.iterations = simplex.iterations();
        return sol;
    }
    return finish(lp_, *columns_, objective, simplex.multipliers(), simplex.iterations());
}

Solution solve_min(const LinearProgram& lp, const SolverOptions& options) {
    ObjectiveSolver solver(lp, options);
    return solver.solve(solver.program().objective);
}

} // namespace gsdfront::lp

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gsdfront::lp {

struct Term {
    std::size_t var;
    double coeff;
    friend bool operator==(const Term&, const Term&) = default;
};

// sum(terms) >= rhs. Terms are a sparse coefficient vector; repeated indices add up.
struct Constraint {
    std::vector<Term> terms;
    double rhs = 0.0;
};

// minimize objective . x  subject to every constraint and lower <= x <= upper.
struct LinearProgram {
    std::size_t var_count = 0;
    std::vector<double> objective;
    std::vector<Constraint> constraints;
    std::vector<double> lower;
    std::vector<double> upper;

    // Empty when every invariant holds (sizes, finiteness, lower <= upper).
    std::vector<std::string> violations() const;
};

enum class Status { optimal, infeasible, unbounded };

std::string to_string(Status status);

struct Solution {
    Status status = Status::infeasible;
    double value = 0.0;
    std::vector<double> assignment;
    std::size_t iterations = 0;
};

struct CertificateReport {
    double max_violation = 0.0;
    double objective_gap = 0.0;
    bool ok = false;
};

// Re-checks bounds, constraints and c.x == value from the assignment alone.
CertificateReport verify_certificate(const LinearProgram& lp, const Solution& solution, double tol = 1e-9);

struct SolverOptions {
    double pivot_tol = 1e-9;
    double optimality_tol = 1e-11;
    // Consecutive degenerate pivots before switching to Bland's rule.
    std::size_t degenerate_switch = 50;
    std::size_t refactor_every = 256;
    std::size_t max_iterations = 1'000'000;
};

// Throws std::invalid_argument when the program violates its invariants.
Solution solve_min(const LinearProgram& lp, const SolverOptions& options = {});

// Solver bound to one constraint set and box; the column storage is built once and shared by
// every objective.
class ObjectiveSolver {
public:
    explicit ObjectiveSolver(LinearProgram lp, SolverOptions options = {});
    ~ObjectiveSolver();
    ObjectiveSolver(ObjectiveSolver&&) noexcept;
    ObjectiveSolver& operator=(ObjectiveSolver&&) noexcept;

    const LinearProgram& program() const noexcept { return lp_; }

    // Column storage of the transposed program; internal to the implementation.
    struct Columns;

    Solution solve(std::span<const double> objective) const;

private:
    LinearProgram lp_;
    SolverOptions options_;
    std::unique_ptr<Columns> columns_;
};

} // namespace gsdfront::lp

#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "gsdfront/linear_program.hpp"
#include "random_tables.hpp"

using namespace gsdfront;
using namespace gsdfront::lp;

namespace {

LinearProgram box(std::size_t n, std::vector<double> objective) {
    LinearProgram p;
    p.var_count = n;
    p.objective = std::move(objective);
    p.lower.assign(n, 0.0);
    p.upper.assign(n, 1.0);
    return p;
}

// Random difference-constraint LP of the shape produced by utility programs.
LinearProgram random_program(std::mt19937_64& rng, std::size_t n, std::size_t rows) {
    std::vector<double> c(n);
    for (auto& x : c) x = std::round((testing::draw_unit(rng) * 2 - 1) * 8) / 8;
    auto p = box(n, c);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto a = testing::draw_index(rng, n), b = testing::draw_index(rng, n);
        if (a == b) continue;
        if (testing::draw_index(rng, 2) == 0) {
            p.constraints.push_back({{{a, 1.0}, {b, -1.0}}, 0.0});
        } else {
            const auto e = testing::draw_index(rng, n), f = testing::draw_index(rng, n);
            p.constraints.push_back({{{a, 1.0}, {b, -1.0}, {e, -1.0}, {f, 1.0}}, 0.0});
        }
    }
    return p;
}

} // namespace

TEST_CASE("box examples") {
    SUBCASE("min x") {
        const auto s = solve_min(box(1, {1.0}));
        CHECK(s.status == Status::optimal);
        CHECK(s.value == doctest::Approx(0.0));
    }
    SUBCASE("min x - y with x >= y") {
        auto p = box(2, {1.0, -1.0});
        p.constraints.push_back({{{0, 1.0}, {1, -1.0}}, 0.0});
        CHECK(solve_min(p).value == doctest::Approx(0.0));
    }
    SUBCASE("min x - y without constraints") {
        const auto s = solve_min(box(2, {1.0, -1.0}));
        CHECK(s.value == doctest::Approx(-1.0));
        CHECK(s.assignment[0] == doctest::Approx(0.0));
        CHECK(s.assignment[1] == doctest::Approx(1.0));
    }
}

TEST_CASE("status reporting") {
    SUBCASE("infeasible") {
        auto p = box(1, {1.0});
        p.constraints.push_back({{{0, 1.0}}, 2.0});
        CHECK(solve_min(p).status == Status::infeasible);
    }
    SUBCASE("unbounded") {
        auto p = box(1, {-1.0});
        p.upper[0] = std::numeric_limits<double>::infinity();
        const auto status = p.violations().empty() ? solve_min(p).status : Status::unbounded;
        CHECK(status == Status::unbounded);
    }
    SUBCASE("invalid program throws") {
        auto p = box(2, {1.0});
        CHECK_FALSE(p.violations().empty());
        CHECK_THROWS_AS(solve_min(p), std::invalid_argument);
    }
}

TEST_CASE("repeated indices add up") {
    auto p = box(2, {1.0, 0.0});
    p.constraints.push_back({{{0, 0.5}, {0, 0.5}, {1, -1.0}}, 0.0});
    p.constraints.push_back({{{1, 1.0}}, 0.5});
    CHECK(solve_min(p).value == doctest::Approx(0.5));
}

TEST_CASE("random programs: certificates, monotonicity, determinism") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + testing::draw_index(rng, 15);
        auto p = random_program(rng, n, testing::draw_index(rng, 3 * n));
        const auto s = solve_min(p);
        REQUIRE(s.status == Status::optimal);
        CHECK(verify_certificate(p, s).ok);
        const auto again = solve_min(p);
        CHECK(again.value == s.value);
        CHECK(again.assignment == s.assignment);
        auto more = random_program(rng, n, 3);
        more.objective = p.objective;
        for (const auto& c : p.constraints) more.constraints.push_back(c);
        const auto s2 = solve_min(more);
        REQUIRE(s2.status == Status::optimal);
        CHECK(s2.value >= s.value - 1e-9);
    }
}

TEST_CASE("objective solver matches one-shot solves") {
    std::mt19937_64 rng(29);
    auto p = random_program(rng, 30, 60);
    ObjectiveSolver solver(p);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> c(p.var_count);
        for (auto& x : c) x = testing::draw_unit(rng) * 2 - 1;
        auto q = p;
        q.objective = c;
        const auto a = solver.solve(c), b = solve_min(q);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-9));
        CHECK(verify_certificate(q, a).ok);
    }
}

TEST_CASE("certificate check detects a tampered solution") {
    auto p = box(2, {1.0, -1.0});
    p.constraints.push_back({{{0, 1.0}, {1, -1.0}}, 0.0});
    auto s = solve_min(p);
    s.assignment = {0.0, 1.0};
    CHECK_FALSE(verify_certificate(p, s).ok);
}

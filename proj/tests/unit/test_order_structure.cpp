#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "gsdfront/order_structure.hpp"
#include "random_tables.hpp"

using namespace gsdfront;

namespace {

std::vector<QualityVector> random_vectors(std::mt19937_64& rng, std::size_t count, const testing::Shape& shape) {
    std::vector<QualityVector> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back({testing::random_vector(rng, shape)});
    return out;
}

// Strict pairs of the closure of the reduction, expanded back to every node.
std::set<IndexPair> closure_strict(const TransitiveReduction& red, std::size_t n) {
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (auto [a, b] : red.edges) reach[a][b] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = 1;
    std::set<IndexPair> out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (reach[red.class_of[i]][red.class_of[j]]) out.insert({i, j});
    return out;
}

std::set<IndexPair> strict_part(const std::vector<IndexPair>& r1) {
    std::set<IndexPair> all(r1.begin(), r1.end()), out;
    for (auto [a, b] : r1)
        if (!all.count({b, a})) out.insert({a, b});
    return out;
}

} // namespace

TEST_CASE("weak dominance is componentwise") {
    CHECK(weakly_dominates({{0.5, 0.5}}, {{0.5, 0.25}}));
    CHECK_FALSE(weakly_dominates({{0.5, 0.0}}, {{0.25, 0.25}}));
    CHECK(weakly_dominates({{0.3}}, {{0.3 + 1e-13}}));
}

TEST_CASE("r2 clauses") {
    // One cardinal and one ordinal coordinate.
    const QualityVector t{{1.0, 1.0}}, u{{0.0, 0.0}}, v{{0.75, 0.5}}, w{{0.25, 0.5}};
    CHECK(r2_holds(t, u, v, w, 1));
    CHECK_FALSE(r2_holds(v, w, t, u, 1));
    // Cardinal-only: only the difference matters.
    CHECK(r2_holds({{0.5}}, {{0.0}}, {{1.0}}, {{0.5}}, 1));
    // Ordinal-only: the pair (v,w) must be bracketed.
    CHECK(r2_holds({{1.0}}, {{0.0}}, {{0.5}}, {{0.5}}, 0));
    CHECK_FALSE(r2_holds({{0.5}}, {{0.0}}, {{1.0}}, {{0.5}}, 0));
}

TEST_CASE("transitive reduction examples") {
    SUBCASE("chain") {
        const std::vector<QualityVector> v{{{1.0}}, {{0.5}}, {{0.0}}};
        const auto red = transitive_reduction(3, build_r1(v));
        CHECK(red.edges == std::vector<IndexPair>{{0, 1}, {1, 2}});
    }
    SUBCASE("antichain") {
        const std::vector<QualityVector> v{{{1.0, 0.0}}, {{0.5, 0.5}}, {{0.0, 1.0}}};
        CHECK(transitive_reduction(3, build_r1(v)).edges.empty());
    }
    SUBCASE("mutual dominance merges") {
        const std::vector<QualityVector> v{{{0.5}}, {{1.0}}, {{0.5}}};
        const auto red = transitive_reduction(3, build_r1(v));
        CHECK(red.class_of == std::vector<std::size_t>{0, 1, 0});
        CHECK(red.edges == std::vector<IndexPair>{{1, 0}});
    }
}

TEST_CASE("closure of the reduction recovers the strict order") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        const auto v = random_vectors(rng, 50, {1, 1, 1, 2, 4, 0.25});
        const auto r1 = build_r1(v);
        const auto red = transitive_reduction(v.size(), r1);
        CHECK(closure_strict(red, v.size()) == strict_part(r1));
        // Minimality: removing any edge loses a strict pair.
        for (std::size_t e = 0; e < red.edges.size(); ++e) {
            auto fewer = red;
            fewer.edges.erase(fewer.edges.begin() + static_cast<long>(e));
            CHECK(closure_strict(fewer, v.size()) != strict_part(r1));
        }
    }
}

TEST_CASE("r1 and r2 are invariant under admissible transforms") {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 100; ++rep) {
        const testing::Shape shape{1, 1, 1 + testing::draw_index(rng, 2), 1 + testing::draw_index(rng, 2), 3, 0.25};
        const auto v = random_vectors(rng, 8, shape);
        auto w = v;
        const double a = 0.2 + 0.6 * testing::draw_unit(rng), b = 0.1 * testing::draw_unit(rng);
        for (auto& x : w)
            for (std::size_t i = 0; i < x.size(); ++i)
                x.values[i] = i < shape.cardinal ? a * x.values[i] + b : x.values[i] * x.values[i] * x.values[i];
        const auto r1v = build_r1(v), r1w = build_r1(w);
        CHECK(r1v == r1w);
        CHECK(build_r2(v, r1v, shape.cardinal).quadruples == build_r2(w, r1w, shape.cardinal).quadruples);
    }
}

TEST_CASE("coordinate-mean utility satisfies every constructed system") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        const auto shape = testing::random_small_shape(rng);
        const auto v = random_vectors(rng, 12, shape);
        const auto sys = build_preference_system(v, shape.cardinal);
        std::vector<double> u;
        for (const auto& x : sys.vectors) {
            double s = 0;
            for (double c : x.values) s += c;
            u.push_back(s / static_cast<double>(x.size()));
        }
        CHECK(check_utility(sys, u).empty());
    }
}

TEST_CASE("budgeted r2 is a subset of the full enumeration") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        const auto v = random_vectors(rng, 20, {1, 1, 1, 1, 3, 0.25});
        const auto r1 = build_r1(v);
        const auto full = build_r2(v, r1, 1);
        CHECK_FALSE(full.truncated);
        const auto cut = build_r2(v, r1, 1, 50);
        CHECK(cut.truncated);
        CHECK(cut.examined <= 50);
        std::set<Quadruple> all(full.quadruples.begin(), full.quadruples.end());
        for (const auto& q : cut.quadruples) CHECK(all.count(q) == 1);
    }
}

TEST_CASE("vacuous clauses") {
    const std::vector<QualityVector> v{{{1.0}}, {{0.5}}, {{0.0}}};
    // Cardinal-only: equal gaps produce quadruples in both directions.
    const auto card = build_r2(v, build_r1(v), 1);
    CHECK(std::count(card.quadruples.begin(), card.quadruples.end(), Quadruple{0, 1, 1, 2}) == 1);
    CHECK(std::count(card.quadruples.begin(), card.quadruples.end(), Quadruple{1, 2, 0, 1}) == 1);
    // Ordinal-only: only bracketed pairs compare.
    const auto ord = build_r2(v, build_r1(v), 0);
    CHECK(std::count(ord.quadruples.begin(), ord.quadruples.end(), Quadruple{0, 1, 1, 2}) == 0);
    CHECK(std::count(ord.quadruples.begin(), ord.quadruples.end(), Quadruple{0, 2, 0, 1}) == 1);
}

TEST_CASE("duplicate vectors merge into one node") {
    auto t = testing::empty_table(2, 2, testing::make_scale(1, 0, 0));
    t.cell(0, 0).values = {0.5};
    t.cell(1, 0).values = {0.5};
    t.cell(0, 1).values = {1.0};
    t.cell(1, 1).values = {0.0};
    const auto sys = build_preference_system(t);
    CHECK(sys.node_count() == 3);
    CHECK(sys.node_of_cell[0] == sys.node_of_cell[2]);
}

TEST_CASE("edge list dumps") {
    CHECK(r1_edge_list(std::vector<IndexPair>{{0, 1}, {2, 3}}) == "0 1\n2 3\n");
    CHECK(r2_edge_list(std::vector<Quadruple>{{0, 1, 2, 3}}) == "0 1 2 3\n");
}

#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsdfront/text_metrics.hpp"
#include "random_tables.hpp"

using namespace gsdfront;

TEST_CASE("hand cases") {
    const std::vector<std::string> same(6, "the");
    CHECK(diversity(same) == doctest::Approx(1.0 / 60.0).epsilon(1e-15));
    CHECK(perplexity(std::vector<double>{-1, -2, -3}) == doctest::Approx(std::exp(2.0)).epsilon(1e-15));
    CHECK(perplexity(std::vector<double>{-1, -1}) == doctest::Approx(std::exp(1.0)));
    CHECK(coherence(std::vector<double>{-0.5, -1.5}) == -1.0);
    CHECK(coherence(std::vector<double>{-1, -1, -1}) == -1.0);
    CHECK(gaussian_penalty(0.3, 0.3, 5.0) == 1.0);
    CHECK(gaussian_penalty(0.9, 0.1, 0.0) == 1.0);
    CHECK(gaussian_penalty(1.5, 0.5, 1.0) == doctest::Approx(0.367879441171).epsilon(1e-12));
    const std::vector<std::string> short_text{"a", "b"};
    CHECK(diversity(short_text) == 1.0);
}

TEST_CASE("metric errors") {
    CHECK_THROWS_AS(perplexity(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(perplexity(std::vector<double>{0.5}), std::invalid_argument);
    CHECK_THROWS_AS(coherence(std::vector<double>{NAN}), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_penalty(0.0, 0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(qtext({0.5, 0.5, 0.5}, QTextParams{{0, 0, 0}, {0.5, 0.5, 0.5}, {0, 0, 0}}), std::invalid_argument);
}

TEST_CASE("qtext examples") {
    const QTextParams peak{{1, 1, 1}, {0.2, 0.4, 0.9}, {3, 3, 3}};
    CHECK(qtext({0.2, 0.4, 0.9}, peak) == doctest::Approx(0.5));
    const QTextParams mask{{1, 0, 0}, {0.5, 0.5, 0.5}, {2, 2, 2}};
    CHECK(qtext({0.8, 0.1, 0.2}, mask) == doctest::Approx(0.8 * std::exp(-2 * 0.09)));
    CHECK(qtext({0.8, 0.1, 0.9}, mask) == qtext({0.8, 0.7, 0.2}, mask));
    const QTextParams worked{{1, 2, 1}, {0.7, 0.5, 1.0}, {2, 0, 1}};
    const double p1 = std::exp(-2.0 * 0.01), p3 = std::exp(-1.0 * 0.01);
    CHECK(qtext({0.8, 0.5, 0.9}, worked) == doctest::Approx((0.8 * p1 + 2 * 0.5 + 0.9 * p3) / 4).epsilon(1e-12));
}

TEST_CASE("qtext properties") {
    std::mt19937_64 rng(73);
    for (int rep = 0; rep < 100; ++rep) {
        QTextParams p;
        std::array<double, 3> x{};
        for (int i = 0; i < 3; ++i) {
            p.weights[i] = testing::draw_unit(rng) * 2 + 0.01;
            p.targets[i] = testing::draw_unit(rng);
            p.strengths[i] = testing::draw_unit(rng) * 8;
            x[i] = testing::draw_unit(rng);
        }
        const double q = qtext(x, p);
        CHECK(q >= 0.0);
        CHECK(q <= 1.0);
        auto scaled = p;
        for (auto& w : scaled.weights) w *= 3.7;
        CHECK(qtext(x, scaled) == doctest::Approx(q).epsilon(1e-12));
    }
}

TEST_CASE("metric ranges and the perplexity identity") {
    std::mt19937_64 rng(79);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<std::string> tokens(1 + testing::draw_index(rng, 30));
        for (auto& t : tokens) t = std::string(1, static_cast<char>('a' + testing::draw_index(rng, 4)));
        std::vector<double> lp(tokens.size());
        for (auto& x : lp) x = -5.0 * testing::draw_unit(rng);
        const double d = diversity(tokens);
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        CHECK(perplexity(lp) >= 1.0);
        CHECK(coherence(lp) <= 0.0);
        CHECK(perplexity(lp) == doctest::Approx(std::exp(-coherence(lp))).epsilon(1e-12));
    }
}

TEST_CASE("batch metrics and csv") {
    std::vector<TokenRecord> recs{{"p1", "a", {"x", "y", "x", "y", "z"}, {-1, -2, -1, -1, -1}, {-0.5, -0.5, -1, -1, -1}},
                                  {"p1", "b", {"x", "x", "x", "x", "x"}, {-0.1, -0.1, -0.1, -0.1, -0.1}, {-2, -2, -2, -2, -2}}};
    QTextAnchors anchors;
    const auto m = compute_text_metrics(recs, QTextParams{}, &anchors);
    REQUIRE(m.size() == 2);
    CHECK(anchors.perplexity_min == doctest::Approx(std::exp(0.1)));
    CHECK(anchors.coherence_max == doctest::Approx(-0.8));
    const auto inputs = qtext_inputs(m);
    CHECK(inputs[0] == std::array<double, 3>{0.0, 1.0, 1.0});
    CHECK(inputs[1] == std::array<double, 3>{1.0, 0.0, 0.0});
    CHECK(m[0].qtext == doctest::Approx(2.0 / 3.0));
    CHECK(text_metrics_to_csv(m).rfind("prompt_id,strategy,diversity,perplexity,coherence,qtext\n", 0) == 0);
}

TEST_CASE("spearman with average ranks") {
    CHECK(average_ranks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
    CHECK(spearman_rho(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), std::invalid_argument);
    std::mt19937_64 rng(83);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> x(12), y(12), gx(12);
        for (std::size_t i = 0; i < 12; ++i) {
            x[i] = static_cast<double>(testing::draw_index(rng, 5));
            y[i] = testing::draw_unit(rng);
            gx[i] = std::exp(3 * x[i]) - 7;
        }
        if (x == std::vector<double>(12, x[0])) continue;
        CHECK(spearman_rho(gx, y) == doctest::Approx(spearman_rho(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("fit contract") {
    std::mt19937_64 rng(89);
    std::vector<std::array<double, 3>> rows(30);
    std::vector<double> human(30);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = {testing::draw_unit(rng), testing::draw_unit(rng), testing::draw_unit(rng)};
        human[i] = std::round(1 + 4 * rows[i][1] * rows[i][1]);
    }
    SUBCASE("argmax over evaluated candidates") {
        const auto fit = fit_qtext_params(rows, human);
        REQUIRE_FALSE(fit.evaluated.empty());
        for (const auto& c : fit.evaluated) CHECK(fit.rho >= c.rho);
    }
    SUBCASE("single candidate grid") {
        QTextSearch s;
        s.weight_grid = {1.0};
        s.target_grid = {0.5};
        s.strength_grid = {0.0};
        s.restarts = 0;
        const auto fit = fit_qtext_params(rows, human, s);
        CHECK(fit.params == QTextParams{});
    }
    SUBCASE("perfect-rank construction") {
        std::vector<double> strictly(30);
        for (std::size_t i = 0; i < 30; ++i) strictly[i] = std::exp(rows[i][1]);
        const auto fit = fit_qtext_params(rows, strictly);
        CHECK(fit.rho == 1.0);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(fit_qtext_params(rows, std::vector<double>(30, 3.0)), std::invalid_argument);
        CHECK_THROWS_AS(fit_qtext_params(std::vector<std::array<double, 3>>(rows.begin(), rows.begin() + 2),
                                         std::vector<double>{1, 2}),
                        std::invalid_argument);
    }
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gsdfront/data_model.hpp"
#include "random_tables.hpp"

using namespace gsdfront;

namespace {

const char* kScale = R"({"metrics":[
  {"name":"quality","scale":"cardinal","normalization":"minmax"},
  {"name":"ppl","scale":"cardinal","normalization":"inverse_minmax"},
  {"name":"likert","scale":"ordinal","ordinal_levels":["bad","ok","good"]}]})";

const char* kCsv =
    "prompt_id,dataset,strategy,quality,ppl,likert\n"
    "p1,wiki,a,2,10,good\n"
    "p1,wiki,b,4,30,bad\n"
    "p2,news,a,6,20,ok\n"
    "p2,news,b,4,20,\"good\"\n";

} // namespace

TEST_CASE("ordinal levels map to equally spaced points") {
    CHECK(ordinal_value(0, 5) == 0.0);
    CHECK(ordinal_value(2, 5) == 0.5);
    CHECK(ordinal_value(4, 5) == 1.0);
    CHECK(ordinal_value(0, 1) == 0.5);
}

TEST_CASE("normalize_column") {
    const std::vector<double> raw{2, 4, 6};
    CHECK(normalize_column(raw, Normalization::minmax) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(normalize_column(raw, Normalization::inverse_minmax) == std::vector<double>{1.0, 0.5, 0.0});
    CHECK(normalize_column(std::vector<double>{3, 3}, Normalization::minmax) == std::vector<double>{0.5, 0.5});
    CHECK_THROWS_AS(normalize_column(std::vector<double>{}, Normalization::minmax), std::invalid_argument);
}

TEST_CASE("minmax is idempotent on normalized columns") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> raw(10);
        for (auto& x : raw) x = testing::draw_unit(rng) * 100 - 50;
        const auto once = normalize_column(raw, Normalization::minmax);
        const auto twice = normalize_column(once, Normalization::minmax);
        for (std::size_t i = 0; i < raw.size(); ++i) CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-12));
    }
}

TEST_CASE("parse table normalizes columns and records anchors") {
    const auto t = parse_evaluation_table(kCsv, parse_scale_spec(kScale));
    REQUIRE(t.strategies == std::vector<std::string>{"a", "b"});
    REQUIRE(t.prompt_count() == 2);
    CHECK(t.prompts[1].dataset == "news");
    CHECK(t.cell(0, 0).values == std::vector<double>{0.0, 1.0, 1.0});
    CHECK(t.cell(1, 0).values == std::vector<double>{0.5, 0.0, 0.0});
    CHECK(t.cell(0, 1).values == std::vector<double>{1.0, 0.5, 0.5});
    REQUIRE(t.anchors.size() == 2);
    CHECK(t.anchors[0].min == 2.0);
    CHECK(t.anchors[0].max == 6.0);
    CHECK(t.anchors[1].method == Normalization::inverse_minmax);
    CHECK(validate(t).ok());
}

TEST_CASE("ingest errors") {
    const auto scale = parse_scale_spec(kScale);
    SUBCASE("missing cell") {
        CHECK_THROWS_AS(parse_evaluation_table("prompt_id,dataset,strategy,quality,ppl,likert\n"
                                               "p1,wiki,a,2,10,good\np1,wiki,b,4,30,bad\np2,news,a,6,20,ok\n",
                                               scale),
                        DataError);
    }
    SUBCASE("unknown ordinal level") {
        CHECK_THROWS_AS(parse_evaluation_table("prompt_id,dataset,strategy,quality,ppl,likert\np1,w,a,1,1,great\n",
                                               scale),
                        DataError);
    }
    SUBCASE("header mismatch") {
        CHECK_THROWS_AS(parse_evaluation_table("prompt_id,dataset,strategy,quality\np1,w,a,1\n", scale), DataError);
    }
    SUBCASE("non-numeric cardinal") {
        CHECK_THROWS_AS(parse_evaluation_table("prompt_id,dataset,strategy,quality,ppl,likert\np1,w,a,x,1,ok\n",
                                               scale),
                        DataError);
    }
    SUBCASE("cardinal after ordinal in the scale") {
        CHECK_THROWS_AS(parse_scale_spec(R"({"metrics":[{"name":"o","scale":"ordinal","ordinal_levels":["1","2"]},
                                                        {"name":"c","scale":"cardinal"}]})")
                            .check(),
                        DataError);
    }
}

TEST_CASE("validate reports violations without throwing") {
    auto t = testing::empty_table(2, 2, testing::make_scale(1, 1, 3));
    CHECK(validate(t).ok());
    SUBCASE("duplicate prompt id") {
        t.prompts[1].id = t.prompts[0].id;
        CHECK(validate(t).violations.size() == 1);
    }
    SUBCASE("value out of range") {
        t.cell(0, 0).values[0] = 1.2;
        CHECK(validate(t).violations.size() == 1);
    }
    SUBCASE("ordinal value off the level grid") {
        t.cell(1, 1).values[1] = 0.3;
        CHECK(validate(t).violations.size() == 1);
    }
}

TEST_CASE("table csv round trip") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        testing::Shape shape{3, 4, 2, 1, 4, 0.01};
        auto t = testing::random_table(rng, shape);
        for (auto& c : t.cells) c.values[0] = testing::draw_unit(rng);
        const auto back = parse_evaluation_table(evaluation_table_to_csv(t), normalized_scale(t.scale));
        REQUIRE(back.strategies == t.strategies);
        REQUIRE(back.prompts == t.prompts);
        for (std::size_t i = 0; i < t.cells.size(); ++i)
            for (std::size_t k = 0; k < t.scale.size(); ++k)
                CHECK(back.cells[i][k] == doctest::Approx(t.cells[i][k]).epsilon(1e-12));
    }
}

TEST_CASE("scale spec json round trip") {
    const auto scale = parse_scale_spec(kScale);
    const auto again = parse_scale_spec(scale_spec_to_json(scale));
    REQUIRE(again.size() == 3);
    CHECK(again.metrics[1].normalization == Normalization::inverse_minmax);
    CHECK(again.metrics[2].ordinal_levels == scale.metrics[2].ordinal_levels);
}

TEST_CASE("token records") {
    const auto recs = parse_token_records(
        R"({"prompt_id":"p1","strategy":"a","tokens":["x","y"],"uncond_logprob":[-1,-2],"cond_logprob":[-0.5,-0.5]})"
        "\n\n"
        R"({"prompt_id":"p2","strategy":"a","tokens":["z"],"uncond_logprob":[-1],"cond_logprob":[-1]})"
        "\n");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].tokens == std::vector<std::string>{"x", "y"});
    CHECK(recs[1].cond_logprob == std::vector<double>{-1});
    CHECK_THROWS_AS(parse_token_records("{not json}\n"), DataError);
}

TEST_CASE("csv parsing and formatting helpers") {
    const auto rows = parse_csv("a,\"b,c\",\"d\"\"e\"\r\n1,2,3\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
    CHECK(csv_escape("x,y") == "\"x,y\"");
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

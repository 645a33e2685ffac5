#include <doctest.h>

#include <random>

#include "gsdfront/report.hpp"
#include "random_tables.hpp"

using namespace gsdfront;

TEST_CASE("slug") {
    CHECK(report::slug("top_p") == "top_p");
    CHECK(report::slug("beam search/4") != "beam search/4");
}

TEST_CASE("report renderings are deterministic") {
    std::mt19937_64 rng(101);
    const auto t = testing::random_table(rng, {3, 5, 1, 1, 3, 0.25});
    TestOptions o;
    o.resamples = 30;
    o.seed = 2;
    const auto a = front_membership_test(t, "s1", o);
    const auto b = front_membership_test(t, "s1", o);
    CHECK(report::to_json(a).dump() == report::to_json(b).dump());
    CHECK(report::density_svg(a) == report::density_svg(b));
    CHECK(report::density_svg(a).rfind("<svg", 0) == 0);
    CHECK(report::resampled_csv(a.pairwise[0]).rfind("resample,statistic\n", 0) == 0);
    const auto sys = build_preference_system(t);
    const auto curve = contamination_curve(a.pairwise[0], t, sys, 3);
    CHECK(report::contamination_csv(curve).rfind("k,statistic,p_value\n", 0) == 0);
    CHECK(report::pcurve_svg({curve}, 0.05).find("</svg>") != std::string::npos);
    const auto j = report::to_json(gsd_front(t, sys));
    CHECK(j["strategies"].size() == 3);
}

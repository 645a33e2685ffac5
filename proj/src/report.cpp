#include "gsdfront/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace gsdfront::report {

namespace {

constexpr const char* kPalette[] = {"#d6477a", "#3b9c4a", "#2f6fd0", "#8a4fc2", "#d8a31a", "#3aa5a5", "#7a5230"};

std::string fixed(double x, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
    return buf;
}

Json anchors_json(const EvaluationTable& table) {
    Json out = Json::array();
    for (const auto& a : table.anchors)
        out.push_back({{"metric", a.metric}, {"method", to_string(a.method)}, {"min", a.min}, {"max", a.max}});
    return out;
}

} // namespace

std::string slug(const std::string& id) {
    std::string out;
    for (unsigned char c : id) out += std::isalnum(c) || c == '-' || c == '_' ? static_cast<char>(c) : '_';
    return out.empty() ? "_" : out;
}

Json table_summary(const EvaluationTable& table) {
    Json metrics = Json::array();
    for (const auto& m : table.scale.metrics) {
        Json j = {{"name", m.name}, {"scale", to_string(m.scale)}, {"normalization", to_string(m.normalization)}};
        if (m.scale == Scale::ordinal) j["ordinal_levels"] = m.ordinal_levels;
        metrics.push_back(std::move(j));
    }
    std::vector<std::string> datasets;
    for (const auto& p : table.prompts)
        if (std::find(datasets.begin(), datasets.end(), p.dataset) == datasets.end()) datasets.push_back(p.dataset);
    return {{"strategies", table.strategies},
            {"prompt_count", table.prompt_count()},
            {"datasets", datasets},
            {"cardinal_count", table.scale.cardinal_count()},
            {"metrics", metrics},
            {"normalization_anchors", anchors_json(table)}};
}

Json system_summary(const PreferenceSystem& system) {
    std::size_t strict = 0;
    for (const auto& [a, b] : system.r1) strict += a != b;
    return {{"nodes", system.node_count()},
            {"r1_strict_pairs", strict},
            {"r1_covering_edges", system.r1_reduced.size()},
            {"r2_quadruples", system.r2.size()},
            {"r2_generators", system.r2_generators.size()},
            {"r2_budget", system.r2_budget},
            {"r2_truncated", system.r2_truncated}};
}

Json to_json(const FrontResult& front) {
    Json matrix = Json::array();
    for (std::size_t i = 0; i < front.strategies.size(); ++i)
        for (std::size_t j = 0; j < front.strategies.size(); ++j) {
            if (i == j) continue;
            const auto& v = front.dominance[i][j];
            matrix.push_back({{"strategy", front.strategies[i]},
                              {"opponent", front.strategies[j]},
                              {"d", v.d},
                              {"weak", v.weak},
                              {"strict", v.strict}});
        }
    return {{"strategies", front.strategies}, {"front", front.front}, {"tolerance", front.tolerance},
            {"dominance", matrix}};
}

Json to_json(const PairwiseTestResult& test) {
    return {{"candidate", test.candidate},
            {"opponent", test.opponent},
            {"observed", test.observed.value},
            {"resamples", test.resampled.size()},
            {"threshold", test.threshold},
            {"p_value", test.p_value},
            {"alpha", test.alpha},
            {"reject", test.reject},
            {"seed", test.seed}};
}

Json to_json(const FrontTestResult& test) {
    Json pairs = Json::array();
    for (const auto& p : test.pairwise) pairs.push_back(to_json(p));
    return {{"candidate", test.candidate}, {"alpha", test.alpha}, {"reject_h0", test.reject_h0}, {"pairwise", pairs}};
}

Json to_json(const ContaminationCurve& curve) {
    Json points = Json::array();
    for (const auto& p : curve.points)
        points.push_back({{"k", p.k}, {"statistic", p.statistic}, {"p_value", p.p_value}});
    return {{"candidate", curve.candidate}, {"opponent", curve.opponent}, {"alpha", curve.alpha},
            {"breakdown", curve.breakdown}, {"points", points}};
}

Json to_json(const QTextParams& params) {
    return {{"weights", params.weights}, {"targets", params.targets}, {"strengths", params.strengths}};
}

Json to_json(const CalibrationResult& result) {
    return {{"runs", result.runs}, {"rejections", result.rejections}, {"rejection_rate", result.rejection_rate},
            {"p_values", result.p_values}};
}

Json agreement_json(const RatingPairs& pairs) {
    const auto kappa = weighted_kappa(pairs);
    const auto summary = agreement_summary(pairs);
    Json j;
    j["ratings"] = pairs.rater_a.size();
    j["levels"] = pairs.levels;
    j["weighted_kappa"] = kappa ? Json(*kappa) : Json(nullptr);
    std::vector<double> a(pairs.rater_a.begin(), pairs.rater_a.end());
    std::vector<double> b(pairs.rater_b.begin(), pairs.rater_b.end());
    try {
        j["spearman_rho"] = spearman_rho(a, b);
    } catch (const std::invalid_argument&) {
        j["spearman_rho"] = nullptr;
    }
    j["within_one_share"] = summary.within_one_share;
    j["mean_abs_diff"] = summary.mean_abs_diff;
    return j;
}

std::string resampled_csv(const PairwiseTestResult& test) {
    std::ostringstream os;
    os << "resample,statistic\n";
    for (std::size_t r = 0; r < test.resampled.size(); ++r) os << r + 1 << ',' << format_double(test.resampled[r]) << '\n';
    return os.str();
}

std::string contamination_csv(const ContaminationCurve& curve) {
    std::ostringstream os;
    os << "k,statistic,p_value\n";
    for (const auto& p : curve.points)
        os << p.k << ',' << format_double(p.statistic) << ',' << format_double(p.p_value) << '\n';
    return os.str();
}

namespace {

struct Frame {
    double x0, x1, y0, y1;
    double left = 60, right = 20, top = 20, bottom = 45, width = 640, height = 400;
    double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
    double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

void axes(std::ostringstream& os, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
    os << "<line x1=\"" << fixed(f.left) << "\" y1=\"" << fixed(f.py(f.y0)) << "\" x2=\"" << fixed(f.width - f.right)
       << "\" y2=\"" << fixed(f.py(f.y0)) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << fixed(f.left) << "\" y1=\"" << fixed(f.py(f.y0)) << "\" x2=\"" << fixed(f.left)
       << "\" y2=\"" << fixed(f.top) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double x = f.x0 + (f.x1 - f.x0) * t / 4.0;
        const double y = f.y0 + (f.y1 - f.y0) * t / 4.0;
        os << "<text x=\"" << fixed(f.px(x)) << "\" y=\"" << fixed(f.height - f.bottom + 16)
           << "\" font-size=\"11\" text-anchor=\"middle\">" << fixed(x, 3) << "</text>\n";
        os << "<text x=\"" << fixed(f.left - 6) << "\" y=\"" << fixed(f.py(y) + 4)
           << "\" font-size=\"11\" text-anchor=\"end\">" << fixed(y, 2) << "</text>\n";
    }
    os << "<text x=\"" << fixed((f.left + f.width - f.right) / 2) << "\" y=\"" << fixed(f.height - 8)
       << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    os << "<text x=\"14\" y=\"" << fixed((f.top + f.height - f.bottom) / 2) << "\" font-size=\"12\" "
       << "text-anchor=\"middle\" transform=\"rotate(-90 14 " << fixed((f.top + f.height - f.bottom) / 2) << ")\">"
       << ylabel << "</text>\n";
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string density_svg(const FrontTestResult& test) {
    double lo = 0.0, hi = 0.0;
    for (const auto& p : test.pairwise) {
        for (double r : p.resampled) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        lo = std::min(lo, p.observed.value);
        hi = std::max(hi, p.observed.value);
    }
    const double pad = std::max(0.02, 0.05 * (hi - lo));
    lo -= pad;
    hi += pad;
    constexpr int kGrid = 200;
    std::vector<std::vector<double>> densities;
    double ymax = 1e-12;
    for (const auto& p : test.pairwise) {
        const auto& xs = p.resampled;
        const double n = static_cast<double>(xs.size());
        const double mu = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        double var = 0.0;
        for (double x : xs) var += (x - mu) * (x - mu);
        const double sd = std::sqrt(var / std::max(1.0, n - 1.0));
        const double bw = std::max(1e-3, 1.06 * sd * std::pow(n, -0.2));
        std::vector<double> dens(kGrid + 1);
        for (int g = 0; g <= kGrid; ++g) {
            const double at = lo + (hi - lo) * g / kGrid;
            double s = 0.0;
            for (double x : xs) s += std::exp(-0.5 * ((at - x) / bw) * ((at - x) / bw));
            dens[g] = s / (n * bw * std::sqrt(2.0 * 3.14159265358979323846));
            ymax = std::max(ymax, dens[g]);
        }
        densities.push_back(std::move(dens));
    }
    Frame f{lo, hi, 0.0, ymax * 1.05};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    os << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    axes(os, f, "resampled D(" + escape_xml(test.candidate) + ", opponent)", "density");
    for (std::size_t i = 0; i < test.pairwise.size(); ++i) {
        const auto& p = test.pairwise[i];
        const char* color = kPalette[i % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (int g = 0; g <= kGrid; ++g) {
            const double at = lo + (hi - lo) * g / kGrid;
            os << fixed(f.px(at)) << ',' << fixed(f.py(densities[i][g])) << (g < kGrid ? " " : "");
        }
        os << "\"/>\n";
        os << "<line x1=\"" << fixed(f.px(p.observed.value)) << "\" y1=\"" << fixed(f.py(0)) << "\" x2=\""
           << fixed(f.px(p.observed.value)) << "\" y2=\"" << fixed(f.top) << "\" stroke=\"" << color
           << "\" stroke-dasharray=\"4 3\"/>\n";
        os << "<line x1=\"" << fixed(f.px(p.threshold)) << "\" y1=\"" << fixed(f.py(0)) << "\" x2=\""
           << fixed(f.px(p.threshold)) << "\" y2=\"" << fixed(f.py(0) - 12) << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fixed(f.width - f.right - 4) << "\" y=\"" << fixed(f.top + 14 + 14 * i)
           << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << color << "\">" << escape_xml(p.opponent)
           << " (p=" << fixed(p.p_value, 3) << ")</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string pcurve_svg(const std::vector<ContaminationCurve>& curves, double alpha) {
    std::size_t kmax = 1;
    for (const auto& c : curves)
        if (!c.points.empty()) kmax = std::max(kmax, c.points.back().k);
    Frame f{0.0, static_cast<double>(kmax), 0.0, 1.0};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    os << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    axes(os, f, "contaminated prompts k", "p-value");
    os << "<line x1=\"" << fixed(f.px(0)) << "\" y1=\"" << fixed(f.py(alpha)) << "\" x2=\"" << fixed(f.px(kmax))
       << "\" y2=\"" << fixed(f.py(alpha)) << "\" stroke=\"red\"/>\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        const char* color = kPalette[i % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < c.points.size(); ++j) {
            const auto& p = c.points[j];
            if (j > 0) os << fixed(f.px(static_cast<double>(p.k))) << ',' << fixed(f.py(c.points[j - 1].p_value)) << ' ';
            os << fixed(f.px(static_cast<double>(p.k))) << ',' << fixed(f.py(p.p_value))
               << (j + 1 < c.points.size() ? " " : "");
        }
        os << "\"/>\n";
        os << "<text x=\"" << fixed(f.left + 8) << "\" y=\"" << fixed(f.top + 14 + 14 * i) << "\" font-size=\"11\" fill=\""
           << color << "\">" << escape_xml(c.opponent) << " (breakdown " << c.breakdown << ")</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace gsdfront::report

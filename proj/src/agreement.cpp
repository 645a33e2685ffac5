#include "gsdfront/agreement.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "gsdfront/data_model.hpp"

namespace gsdfront {

std::vector<std::string> RatingPairs::violations() const {
    std::vector<std::string> out;
    if (levels < 2) out.push_back("rating scale needs at least two levels");
    if (rater_a.size() != rater_b.size()) out.push_back("rater lists differ in length");
    if (rater_a.empty()) out.push_back("no ratings");
    for (const auto* list : {&rater_a, &rater_b})
        for (int r : *list)
            if (r < 1 || r > levels) {
                out.push_back("rating " + std::to_string(r) + " outside 1.." + std::to_string(levels));
                return out;
            }
    return out;
}

namespace {

void require_valid(const RatingPairs& pairs) {
    auto v = pairs.violations();
    if (!v.empty()) throw std::invalid_argument("invalid rating pairs: " + v.front());
}

} // namespace

std::optional<double> weighted_kappa(const RatingPairs& pairs) {
    require_valid(pairs);
    const auto c = static_cast<std::size_t>(pairs.levels);
    const double n = static_cast<double>(pairs.rater_a.size());
    std::vector<double> observed(c * c, 0.0), row(c, 0.0), col(c, 0.0);
    for (std::size_t k = 0; k < pairs.rater_a.size(); ++k) {
        const auto i = static_cast<std::size_t>(pairs.rater_a[k] - 1);
        const auto j = static_cast<std::size_t>(pairs.rater_b[k] - 1);
        observed[i * c + j] += 1.0 / n;
        row[i] += 1.0 / n;
        col[j] += 1.0 / n;
    }
    double disagree_obs = 0.0, disagree_exp = 0.0;
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const double v = std::abs(static_cast<double>(i) - static_cast<double>(j)) / static_cast<double>(c - 1);
            disagree_obs += v * observed[i * c + j];
            disagree_exp += v * row[i] * col[j];
        }
    if (disagree_exp == 0.0) return std::nullopt;
    return 1.0 - disagree_obs / disagree_exp;
}

AgreementSummary agreement_summary(const RatingPairs& pairs) {
    require_valid(pairs);
    AgreementSummary s;
    double within = 0.0, total = 0.0;
    for (std::size_t k = 0; k < pairs.rater_a.size(); ++k) {
        const int d = std::abs(pairs.rater_a[k] - pairs.rater_b[k]);
        if (d <= 1) within += 1.0;
        total += d;
    }
    const double n = static_cast<double>(pairs.rater_a.size());
    s.within_one_share = within / n;
    s.mean_abs_diff = total / n;
    return s;
}

std::vector<RatingRow> parse_ratings(const std::string& csv_text) {
    auto rows = parse_csv(csv_text);
    if (rows.empty() || rows[0] != std::vector<std::string>{"prompt_id", "strategy", "rater_a", "rater_b"})
        throw DataError("ratings CSV parse failure: header must be prompt_id,strategy,rater_a,rater_b");
    std::vector<RatingRow> out;
    auto to_int = [](const std::string& s, std::size_t line) {
        char* end = nullptr;
        const long v = std::strtol(s.c_str(), &end, 10);
        if (s.empty() || *end != '\0')
            throw DataError("ratings CSV parse failure: line " + std::to_string(line) + " has a non-integer rating");
        return static_cast<int>(v);
    };
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 4) throw DataError("ratings CSV parse failure: line " + std::to_string(r + 1) + " needs 4 fields");
        out.push_back({row[0], row[1], to_int(row[2], r + 1), to_int(row[3], r + 1)});
    }
    return out;
}

std::vector<RatingRow> load_ratings(const std::filesystem::path& path) { return parse_ratings(read_text_file(path)); }

RatingPairs rating_pairs(const std::vector<RatingRow>& rows, int levels) {
    RatingPairs pairs;
    pairs.levels = levels;
    for (const auto& r : rows) {
        pairs.rater_a.push_back(r.rater_a);
        pairs.rater_b.push_back(r.rater_b);
    }
    return pairs;
}

} // namespace gsdfront

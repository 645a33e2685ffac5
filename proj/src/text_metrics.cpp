#include "gsdfront/text_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gsdfront {

namespace {

void check_logprobs(std::span<const double> logs, const char* what) {
    if (logs.empty()) throw std::invalid_argument(std::string(what) + ": empty log-probability list");
    for (double lp : logs)
        if (!std::isfinite(lp) || lp > 0.0)
            throw std::invalid_argument(std::string(what) + ": log-probabilities must be finite and <= 0");
}

double mean(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

} // namespace

double diversity(std::span<const std::string> tokens) {
    double product = 1.0;
    for (std::size_t n = 2; n <= 4; ++n) {
        if (tokens.size() < n) continue;
        const std::size_t total = tokens.size() - n + 1;
        std::set<std::vector<std::string>> unique;
        for (std::size_t i = 0; i < total; ++i) unique.emplace(tokens.begin() + i, tokens.begin() + i + n);
        product *= static_cast<double>(unique.size()) / static_cast<double>(total);
    }
    return product;
}

double perplexity(std::span<const double> uncond_logprob) {
    check_logprobs(uncond_logprob, "perplexity");
    return std::exp(-mean(uncond_logprob));
}

double coherence(std::span<const double> cond_logprob) {
    check_logprobs(cond_logprob, "coherence");
    return mean(cond_logprob);
}

double gaussian_penalty(double x, double mu, double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("gaussian_penalty: alpha must be >= 0");
    const double d = x - mu;
    return std::exp(-alpha * d * d);
}

std::vector<std::string> QTextParams::violations() const {
    std::vector<std::string> out;
    bool any_weight = false;
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) out.push_back("weight " + std::to_string(i + 1) + " must be >= 0");
        if (weights[i] > 0.0) any_weight = true;
        if (!(targets[i] >= 0.0 && targets[i] <= 1.0)) out.push_back("target " + std::to_string(i + 1) + " must lie in [0,1]");
        if (!(strengths[i] >= 0.0) || !std::isfinite(strengths[i])) out.push_back("strength " + std::to_string(i + 1) + " must be >= 0");
    }
    if (!any_weight) out.push_back("all weights are zero");
    return out;
}

double qtext(const std::array<double, 3>& normalized, const QTextParams& params) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double m = normalized[i];
        num += params.weights[i] * m * gaussian_penalty(m, params.targets[i], params.strengths[i]);
        den += params.weights[i];
    }
    if (den == 0.0) throw std::invalid_argument("qtext: all weights are zero");
    return num / den;
}

std::vector<std::array<double, 3>> qtext_inputs(std::span<const TextMetrics> metrics, QTextAnchors* anchors) {
    std::vector<std::array<double, 3>> rows(metrics.size());
    if (metrics.empty()) return rows;
    std::vector<double> ppl, coh, div;
    for (const auto& m : metrics) {
        ppl.push_back(m.perplexity);
        coh.push_back(m.coherence);
        div.push_back(m.diversity);
    }
    const auto p = normalize_column(ppl, Normalization::inverse_minmax);
    const auto c = normalize_column(coh, Normalization::minmax);
    const auto d = normalize_column(div, Normalization::minmax);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = {p[i], c[i], d[i]};
    if (anchors) {
        auto [pl, ph] = std::minmax_element(ppl.begin(), ppl.end());
        auto [cl, ch] = std::minmax_element(coh.begin(), coh.end());
        auto [dl, dh] = std::minmax_element(div.begin(), div.end());
        *anchors = {*pl, *ph, *cl, *ch, *dl, *dh};
    }
    return rows;
}

std::vector<TextMetrics> compute_text_metrics(std::span<const TokenRecord> records, const QTextParams& params,
                                              QTextAnchors* anchors) {
    std::vector<TextMetrics> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        TextMetrics m;
        m.prompt_id = r.prompt_id;
        m.strategy = r.strategy;
        m.diversity = diversity(r.tokens);
        m.perplexity = perplexity(r.uncond_logprob);
        m.coherence = coherence(r.cond_logprob);
        out.push_back(std::move(m));
    }
    const auto inputs = qtext_inputs(out, anchors);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].qtext = qtext(inputs[i], params);
    return out;
}

std::string text_metrics_to_csv(std::span<const TextMetrics> metrics) {
    std::ostringstream os;
    os << "prompt_id,strategy,diversity,perplexity,coherence,qtext\n";
    for (const auto& m : metrics)
        os << csv_escape(m.prompt_id) << ',' << csv_escape(m.strategy) << ',' << format_double(m.diversity) << ','
           << format_double(m.perplexity) << ',' << format_double(m.coherence) << ',' << format_double(m.qtext)
           << '\n';
    return os.str();
}

std::vector<double> average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("spearman_rho: lists differ in length");
    if (xs.size() < 2) throw std::invalid_argument("spearman_rho: need at least two observations");
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double mx = mean(rx), my = mean(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("spearman_rho: constant input list");
    return sxy / std::sqrt(sxx * syy);
}

QTextSearch QTextSearch::defaults() {
    QTextSearch s;
    for (int i = 0; i <= 8; ++i) s.weight_grid.push_back(0.25 * i);
    for (int i = 0; i <= 10; ++i) s.target_grid.push_back(0.1 * i);
    s.strength_grid = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    return s;
}

namespace {

// A candidate is nine grid indices: weights, targets, strengths.
using GridPoint = std::array<std::size_t, 9>;

std::size_t closest(const std::vector<double>& grid, double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - x) < std::abs(grid[best] - x)) best = i;
    return best;
}

class FitObjective {
public:
    FitObjective(std::span<const std::array<double, 3>> rows, std::span<const double> human, const QTextSearch& search)
        : rows_(rows), human_(human), search_(search) {}

    QTextParams params(const GridPoint& g) const {
        QTextParams p;
        for (std::size_t i = 0; i < 3; ++i) {
            p.weights[i] = search_.weight_grid[g[i]];
            p.targets[i] = search_.target_grid[g[3 + i]];
            p.strengths[i] = search_.strength_grid[g[6 + i]];
        }
        return p;
    }

    const std::vector<double>& grid(std::size_t coord) const {
        return coord < 3 ? search_.weight_grid : coord < 6 ? search_.target_grid : search_.strength_grid;
    }

    // nullopt when the correlation is undefined (all weights zero or constant scores).
    std::optional<double> rho(const GridPoint& g, QTextFit& fit) {
        if (auto it = cache_.find(g); it != cache_.end()) return it->second;
        const auto p = params(g);
        std::optional<double> result;
        if (p.weights[0] + p.weights[1] + p.weights[2] > 0.0) {
            std::vector<double> scores(rows_.size());
            for (std::size_t i = 0; i < rows_.size(); ++i) scores[i] = qtext(rows_[i], p);
            const bool constant = std::all_of(scores.begin(), scores.end(), [&](double s) { return s == scores[0]; });
            if (!constant) result = spearman_rho(scores, human_);
        }
        cache_.emplace(g, result);
        if (result) fit.evaluated.push_back({p, *result});
        return result;
    }

private:
    std::span<const std::array<double, 3>> rows_;
    std::span<const double> human_;
    const QTextSearch& search_;
    std::map<GridPoint, std::optional<double>> cache_;
};

} // namespace

QTextFit fit_qtext_params(std::span<const std::array<double, 3>> metric_rows, std::span<const double> human,
                          const QTextSearch& search) {
    if (metric_rows.size() != human.size()) throw std::invalid_argument("fit_qtext_params: row and rating counts differ");
    if (metric_rows.size() < 3) throw std::invalid_argument("fit_qtext_params: need at least 3 texts");
    if (std::all_of(human.begin(), human.end(), [&](double h) { return h == human[0]; }))
        throw std::invalid_argument("fit_qtext_params: human ratings are constant");
    if (search.weight_grid.empty() || search.target_grid.empty() || search.strength_grid.empty())
        throw std::invalid_argument("fit_qtext_params: empty search grid");

    QTextFit fit;
    FitObjective objective(metric_rows, human, search);

    std::vector<GridPoint> starts;
    {
        GridPoint base{};
        for (std::size_t i = 0; i < 3; ++i) {
            base[i] = closest(search.weight_grid, 1.0);
            base[3 + i] = closest(search.target_grid, 0.5);
            base[6 + i] = closest(search.strength_grid, 0.0);
        }
        starts.push_back(base);
        for (std::size_t k = 0; k < 3; ++k) {
            GridPoint single = base;
            for (std::size_t i = 0; i < 3; ++i) single[i] = closest(search.weight_grid, i == k ? 1.0 : 0.0);
            starts.push_back(single);
        }
        std::mt19937_64 gen(search.seed);
        for (std::size_t r = 0; r < search.restarts; ++r) {
            GridPoint g{};
            for (std::size_t c = 0; c < 9; ++c) g[c] = static_cast<std::size_t>(gen() % objective.grid(c).size());
            starts.push_back(g);
        }
    }

    for (const auto& start : starts) {
        GridPoint current = start;
        auto current_rho = objective.rho(current, fit);
        for (std::size_t round = 0; round < search.rounds; ++round) {
            bool moved = false;
            for (std::size_t c = 0; c < 9; ++c) {
                for (std::size_t v = 0; v < objective.grid(c).size(); ++v) {
                    if (v == current[c]) continue;
                    GridPoint trial = current;
                    trial[c] = v;
                    auto r = objective.rho(trial, fit);
                    if (r && (!current_rho || *r > *current_rho)) {
                        current = trial;
                        current_rho = r;
                        moved = true;
                    }
                }
            }
            if (!moved) break;
        }
    }

    if (fit.evaluated.empty()) throw std::invalid_argument("fit_qtext_params: no candidate has a defined correlation");
    const auto best = std::max_element(fit.evaluated.begin(), fit.evaluated.end(),
                                       [](const auto& a, const auto& b) { return a.rho < b.rho; });
    fit.params = best->params;
    fit.rho = best->rho;
    return fit;
}

} // namespace gsdfront

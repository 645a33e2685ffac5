#include "gsdfront/order_structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace gsdfront {

namespace {

bool ge(double a, double b) { return a >= b - kOrderTolerance; }

bool same_vector(const QualityVector& a, const QualityVector& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > kOrderTolerance) return false;
    return true;
}

class Bitset {
public:
    explicit Bitset(std::size_t n) : words_((n + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
    void merge(const Bitset& other) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
    }
    bool intersects(const Bitset& other) const {
        for (std::size_t k = 0; k < words_.size(); ++k)
            if (words_[k] & other.words_[k]) return true;
        return false;
    }

private:
    std::vector<std::uint64_t> words_;
};

struct QuadHash {
    std::size_t operator()(const Quadruple& q) const noexcept {
        std::uint64_t h = 0x9E3779B97F4A7C15ull;
        for (std::uint64_t x : {q.t, q.u, q.v, q.w}) {
            h ^= x + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

std::vector<IndexPair> strict_pairs(std::span<const IndexPair> r1) {
    std::vector<IndexPair> sorted(r1.begin(), r1.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<IndexPair> out;
    for (const auto& [a, b] : sorted) {
        if (a == b) continue;
        if (std::binary_search(sorted.begin(), sorted.end(), IndexPair{b, a})) continue;
        out.emplace_back(a, b);
    }
    return out;
}

// Strongly connected components of a directed graph, numbered in reverse topological order.
std::vector<std::size_t> strong_components(const std::vector<std::vector<std::size_t>>& adj, std::size_t& count) {
    const std::size_t n = adj.size();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, none), low(n, 0), comp(n, none), stack;
    std::vector<std::pair<std::size_t, std::size_t>> frames;
    std::size_t next = 0;
    count = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != none) continue;
        frames.emplace_back(root, 0);
        index[root] = low[root] = next++;
        stack.push_back(root);
        while (!frames.empty()) {
            auto& [v, k] = frames.back();
            if (k < adj[v].size()) {
                const std::size_t w = adj[v][k++];
                if (index[w] == none) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    frames.emplace_back(w, 0);
                } else if (comp[w] == none) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
            if (low[done] == index[done]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    comp[w] = count;
                } while (w != done);
                ++count;
            }
        }
    }
    return comp;
}

// Drops quadruples implied by chaining two others: (P1,P2) and (P2,P3) imply (P1,P3).
std::vector<Quadruple> reduce_r2_chains(std::vector<Quadruple> quads) {
    std::map<IndexPair, std::size_t> pair_id;
    auto id = [&](std::size_t a, std::size_t b) {
        return pair_id.try_emplace(IndexPair{a, b}, pair_id.size()).first->second;
    };
    std::vector<IndexPair> arcs;
    for (const auto& q : quads) arcs.emplace_back(id(q.t, q.u), id(q.v, q.w));
    const std::size_t n = pair_id.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [a, b] : arcs) adj[a].push_back(b);
    std::size_t count = 0;
    const auto comp = strong_components(adj, count);

    // Components come sinks first, so successors are finished before their predecessors.
    std::vector<std::vector<std::size_t>> succ(count);
    for (const auto& [a, b] : arcs)
        if (comp[a] != comp[b]) succ[comp[a]].push_back(comp[b]);
    std::vector<Bitset> reach(count, Bitset(count));
    for (std::size_t c = 0; c < count; ++c) {
        auto& s = succ[c];
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (auto d : s) {
            reach[c].set(d);
            reach[c].merge(reach[d]);
        }
    }
    auto redundant = [&](std::size_t c, std::size_t d) {
        for (auto e : succ[c])
            if (e != d && reach[e].test(d)) return true;
        return false;
    };

    std::vector<Quadruple> kept;
    std::set<IndexPair> used;
    for (std::size_t k = 0; k < quads.size(); ++k) {
        const auto c = comp[arcs[k].first];
        const auto d = comp[arcs[k].second];
        if (c == d || (!redundant(c, d) && used.emplace(c, d).second)) kept.push_back(quads[k]);
    }
    return kept;
}

} // namespace

bool weakly_dominates(const QualityVector& x, const QualityVector& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!ge(x[i], y[i])) return false;
    return true;
}

bool r2_holds(const QualityVector& t, const QualityVector& u, const QualityVector& v, const QualityVector& w,
              std::size_t cardinal_count) {
    if (!weakly_dominates(t, u) || !weakly_dominates(v, w)) return false;
    for (std::size_t i = 0; i < cardinal_count; ++i)
        if (!ge(t[i] - u[i], v[i] - w[i])) return false;
    for (std::size_t j = cardinal_count; j < t.size(); ++j)
        if (!(ge(t[j], v[j]) && ge(v[j], w[j]) && ge(w[j], u[j]))) return false;
    return true;
}

std::vector<IndexPair> build_r1(std::span<const QualityVector> vectors) {
    std::vector<IndexPair> out;
    for (std::size_t a = 0; a < vectors.size(); ++a)
        for (std::size_t b = 0; b < vectors.size(); ++b)
            if (a == b || weakly_dominates(vectors[a], vectors[b])) out.emplace_back(a, b);
    return out;
}

TransitiveReduction transitive_reduction(std::size_t node_count, std::span<const IndexPair> r1) {
    TransitiveReduction result;
    result.class_of.resize(node_count);
    std::vector<IndexPair> sorted(r1.begin(), r1.end());
    std::sort(sorted.begin(), sorted.end());
    auto related = [&](std::size_t a, std::size_t b) {
        return std::binary_search(sorted.begin(), sorted.end(), IndexPair{a, b});
    };
    for (std::size_t i = 0; i < node_count; ++i) {
        result.class_of[i] = i;
        for (std::size_t j = 0; j < i; ++j) {
            if (result.class_of[j] == j && related(i, j) && related(j, i)) {
                result.class_of[i] = j;
                break;
            }
        }
    }

    std::vector<Bitset> below(node_count, Bitset(node_count));
    std::vector<Bitset> above(node_count, Bitset(node_count));
    for (const auto& [a0, b0] : sorted) {
        const auto a = result.class_of[a0];
        const auto b = result.class_of[b0];
        if (a == b) continue;
        below[a].set(b);
        above[b].set(a);
    }
    for (std::size_t a = 0; a < node_count; ++a) {
        if (result.class_of[a] != a) continue;
        for (std::size_t b = 0; b < node_count; ++b) {
            if (!below[a].test(b)) continue;
            // (a,b) covers unless some c sits strictly between them.
            if (!below[a].intersects(above[b])) result.edges.emplace_back(a, b);
        }
    }
    return result;
}

R2Result build_r2(std::span<const QualityVector> vectors, std::span<const IndexPair> r1, std::size_t cardinal_count,
                  std::optional<std::size_t> budget) {
    R2Result result;
    auto pairs = strict_pairs(r1);
    const std::size_t full = pairs.size() * pairs.size();
    std::size_t limit = full;
    if (budget && full > *budget) {
        pairs = transitive_reduction(vectors.size(), r1).edges;
        result.truncated = true;
        limit = *budget;
    }
    result.candidate_pairs = pairs.size();
    for (std::size_t i = 0; i < pairs.size() && result.examined < limit; ++i) {
        const auto [t, u] = pairs[i];
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            if (result.examined >= limit) {
                result.truncated = true;
                break;
            }
            ++result.examined;
            if (i == j) continue;
            const auto [v, w] = pairs[j];
            if (r2_holds(vectors[t], vectors[u], vectors[v], vectors[w], cardinal_count))
                result.quadruples.push_back({t, u, v, w});
        }
    }
    return result;
}

std::vector<Quadruple> prune_implied_r2(std::span<const QualityVector> vectors, std::span<const Quadruple> r2,
                                        std::span<const IndexPair> covering_edges) {
    const std::size_t n = vectors.size();
    std::vector<std::vector<std::size_t>> lower(n), upper(n);
    for (const auto& [a, b] : covering_edges) {
        lower[a].push_back(b);
        upper[b].push_back(a);
    }
    std::unordered_set<Quadruple, QuadHash> present(r2.begin(), r2.end());
    auto implied_by = [&](const Quadruple& q) {
        if (q.t == q.v && q.u == q.w) return true;
        if (q.t == q.u || q.v == q.w) return false;
        return present.contains(q);
    };

    std::vector<Quadruple> kept;
    for (const auto& q : r2) {
        // Either side sharing an endpoint reduces the constraint to a single R1 comparison.
        if (q.t == q.v || q.u == q.w) continue;
        bool implied = false;
        for (auto t2 : lower[q.t])
            if (!implied && implied_by({t2, q.u, q.v, q.w})) implied = true;
        for (auto u2 : upper[q.u])
            if (!implied && implied_by({q.t, u2, q.v, q.w})) implied = true;
        for (auto v2 : upper[q.v])
            if (!implied && implied_by({q.t, q.u, v2, q.w})) implied = true;
        for (auto w2 : lower[q.w])
            if (!implied && implied_by({q.t, q.u, q.v, w2})) implied = true;
        if (!implied) kept.push_back(q);
    }
    return reduce_r2_chains(std::move(kept));
}

PreferenceSystem build_preference_system(std::span<const QualityVector> vectors, std::size_t cardinal_count,
                                         const SystemOptions& options) {
    PreferenceSystem sys;
    sys.cardinal_count = cardinal_count;
    sys.r2_budget = options.r2_budget;
    sys.node_of_cell.reserve(vectors.size());
    for (const auto& v : vectors) {
        auto it = std::find_if(sys.vectors.begin(), sys.vectors.end(),
                               [&](const QualityVector& x) { return same_vector(x, v); });
        if (it == sys.vectors.end()) {
            sys.node_of_cell.push_back(sys.vectors.size());
            sys.vectors.push_back(v);
        } else {
            sys.node_of_cell.push_back(static_cast<std::size_t>(it - sys.vectors.begin()));
        }
    }
    sys.r1 = build_r1(sys.vectors);
    sys.r1_reduced = transitive_reduction(sys.vectors.size(), sys.r1).edges;
    auto r2 = build_r2(sys.vectors, sys.r1, cardinal_count, options.r2_budget);
    sys.r2 = std::move(r2.quadruples);
    sys.r2_truncated = r2.truncated;
    sys.r2_generators = prune_implied_r2(sys.vectors, sys.r2, sys.r1_reduced);
    return sys;
}

PreferenceSystem build_preference_system(const EvaluationTable& table, const SystemOptions& options) {
    return build_preference_system(table.cells, table.scale.cardinal_count(), options);
}

std::vector<std::string> check_utility(const PreferenceSystem& system, std::span<const double> utility, double tol) {
    std::vector<std::string> out;
    if (utility.size() != system.node_count()) {
        out.push_back("utility has " + std::to_string(utility.size()) + " entries, expected " +
                      std::to_string(system.node_count()));
        return out;
    }
    for (const auto& [a, b] : system.r1)
        if (utility[a] < utility[b] - tol)
            out.push_back("R1 pair (" + std::to_string(a) + "," + std::to_string(b) + ") violated");
    for (const auto& q : system.r2)
        if (utility[q.t] - utility[q.u] < utility[q.v] - utility[q.w] - tol)
            out.push_back("R2 quadruple (" + std::to_string(q.t) + "," + std::to_string(q.u) + "," +
                          std::to_string(q.v) + "," + std::to_string(q.w) + ") violated");
    return out;
}

std::string r1_edge_list(std::span<const IndexPair> pairs) {
    std::ostringstream os;
    for (const auto& [a, b] : pairs) os << a << ' ' << b << '\n';
    return os.str();
}

std::string r2_edge_list(std::span<const Quadruple> quads) {
    std::ostringstream os;
    for (const auto& q : quads) os << q.t << ' ' << q.u << ' ' << q.v << ' ' << q.w << '\n';
    return os.str();
}

} // namespace gsdfront

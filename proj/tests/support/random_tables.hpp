#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gsdfront/data_model.hpp"

namespace gsdfront::testing {

struct Shape {
    std::size_t strategies = 2;
    std::size_t prompts = 3;
    std::size_t cardinal = 1;
    std::size_t ordinal = 1;
    std::size_t levels = 3;
    double grid = 0.25;
};

inline std::size_t draw_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

inline double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline ScaleSpec make_scale(std::size_t cardinal, std::size_t ordinal, std::size_t levels) {
    ScaleSpec scale;
    for (std::size_t i = 0; i < cardinal; ++i) scale.metrics.push_back({"c" + std::to_string(i + 1), Scale::cardinal});
    for (std::size_t i = 0; i < ordinal; ++i) {
        MetricSpec m{"o" + std::to_string(i + 1), Scale::ordinal};
        for (std::size_t l = 1; l <= levels; ++l) m.ordinal_levels.push_back(std::to_string(l));
        scale.metrics.push_back(m);
    }
    return scale;
}

// Empty table with the given strategies, prompts and scale; cells zero-filled.
inline EvaluationTable empty_table(std::size_t strategies, std::size_t prompts, ScaleSpec scale) {
    EvaluationTable t;
    for (std::size_t s = 0; s < strategies; ++s) t.strategies.push_back("s" + std::to_string(s + 1));
    for (std::size_t p = 0; p < prompts; ++p) t.prompts.push_back({"p" + std::to_string(p + 1), "d"});
    t.scale = std::move(scale);
    t.cells.assign(strategies * prompts, QualityVector{std::vector<double>(t.scale.size(), 0.0)});
    return t;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, const Shape& shape) {
    const auto steps = static_cast<std::size_t>(1.0 / shape.grid + 0.5);
    std::vector<double> v;
    for (std::size_t i = 0; i < shape.cardinal; ++i)
        v.push_back(static_cast<double>(draw_index(rng, steps + 1)) * shape.grid);
    for (std::size_t i = 0; i < shape.ordinal; ++i) v.push_back(ordinal_value(draw_index(rng, shape.levels), shape.levels));
    return v;
}

inline EvaluationTable random_table(std::mt19937_64& rng, const Shape& shape) {
    auto t = empty_table(shape.strategies, shape.prompts, make_scale(shape.cardinal, shape.ordinal, shape.levels));
    for (auto& c : t.cells) c.values = random_vector(rng, shape);
    return t;
}

// Random shape within the small-instance envelope used by the oracle checks.
inline Shape random_small_shape(std::mt19937_64& rng) {
    Shape s;
    s.strategies = 2 + draw_index(rng, 3);
    s.prompts = 1 + draw_index(rng, 5);
    const std::size_t n = 1 + draw_index(rng, 3);
    s.cardinal = std::min(n, draw_index(rng, 3));
    s.ordinal = n - s.cardinal;
    s.levels = 2 + draw_index(rng, 2);
    s.grid = 0.25;
    return s;
}

} // namespace gsdfront::testing

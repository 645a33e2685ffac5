#include "gsdfront/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace gsdfront {

using nlohmann::json;

std::size_t ScaleSpec::cardinal_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(metrics.begin(), metrics.end(),
        [](const MetricSpec& m) { return m.scale == Scale::cardinal; }));
}

std::vector<std::string> ScaleSpec::violations() const {
    std::vector<std::string> out;
    if (metrics.empty()) out.push_back("scale declares no metrics");
    bool seen_ordinal = false;
    std::set<std::string> names;
    for (const auto& m : metrics) {
        if (m.name.empty()) out.push_back("metric with empty name");
        if (!names.insert(m.name).second) out.push_back("duplicate metric name '" + m.name + "'");
        if (m.scale == Scale::ordinal) {
            seen_ordinal = true;
            if (m.ordinal_levels.empty())
                out.push_back("ordinal metric '" + m.name + "' declares no levels");
            std::set<std::string> levels(m.ordinal_levels.begin(), m.ordinal_levels.end());
            if (levels.size() != m.ordinal_levels.size())
                out.push_back("ordinal metric '" + m.name + "' repeats a level");
            if (m.normalization != Normalization::none)
                out.push_back("ordinal metric '" + m.name + "' cannot be normalized numerically");
        } else if (seen_ordinal) {
            out.push_back("cardinal metric '" + m.name + "' follows an ordinal metric");
        }
    }
    return out;
}

void ScaleSpec::check() const {
    auto v = violations();
    if (!v.empty()) throw DataError("invalid scale spec: " + v.front());
}

double ordinal_value(std::size_t rank, std::size_t level_count) {
    if (level_count <= 1) return 0.5;
    return static_cast<double>(rank) / static_cast<double>(level_count - 1);
}

const QualityVector& EvaluationTable::cell(std::size_t strategy, std::size_t prompt) const {
    return cells.at(strategy * prompts.size() + prompt);
}

QualityVector& EvaluationTable::cell(std::size_t strategy, std::size_t prompt) {
    return cells.at(strategy * prompts.size() + prompt);
}

std::optional<std::size_t> EvaluationTable::find_strategy(const std::string& id) const {
    auto it = std::find(strategies.begin(), strategies.end(), id);
    if (it == strategies.end()) return std::nullopt;
    return static_cast<std::size_t>(it - strategies.begin());
}

std::size_t EvaluationTable::strategy_index(const std::string& id) const {
    auto idx = find_strategy(id);
    if (!idx) throw std::invalid_argument("unknown strategy '" + id + "'");
    return *idx;
}

std::vector<double> normalize_column(std::span<const double> raw, Normalization method) {
    if (raw.empty()) throw std::invalid_argument("normalize_column: empty input");
    std::vector<double> out(raw.begin(), raw.end());
    if (method == Normalization::none) return out;
    auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi == lo) {
        std::fill(out.begin(), out.end(), 0.5);
        return out;
    }
    const double span = hi - lo;
    for (auto& x : out) {
        x = method == Normalization::minmax ? (x - lo) / span : (hi - x) / span;
    }
    return out;
}

ValidationReport validate(const EvaluationTable& table) {
    ValidationReport report;
    auto& v = report.violations;
    for (auto& s : table.scale.violations()) v.push_back(s);

    std::set<std::string> seen;
    for (const auto& s : table.strategies)
        if (!seen.insert(s).second) v.push_back("duplicate strategy id '" + s + "'");
    seen.clear();
    for (const auto& p : table.prompts)
        if (!seen.insert(p.id).second) v.push_back("duplicate prompt id '" + p.id + "'");

    const std::size_t expected = table.strategies.size() * table.prompts.size();
    if (table.cells.size() != expected) {
        v.push_back("cell map is not total: expected " + std::to_string(expected) + " cells, found " +
                    std::to_string(table.cells.size()));
        return report;
    }
    const std::size_t n = table.scale.size();
    for (std::size_t s = 0; s < table.strategies.size(); ++s) {
        for (std::size_t p = 0; p < table.prompts.size(); ++p) {
            const auto& cell = table.cell(s, p);
            const std::string where = "(" + table.strategies[s] + ", " + table.prompts[p].id + ")";
            if (cell.size() != n) {
                v.push_back("cell " + where + " has " + std::to_string(cell.size()) + " values, expected " +
                            std::to_string(n));
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double x = cell[i];
                const auto& metric = table.scale.metrics[i];
                if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
                    v.push_back("cell " + where + " metric '" + metric.name + "' value " + format_double(x) +
                                " outside [0,1]");
                    continue;
                }
                if (metric.scale == Scale::ordinal) {
                    const std::size_t c = metric.ordinal_levels.size();
                    bool on_level = false;
                    for (std::size_t r = 0; r < c && !on_level; ++r) on_level = ordinal_value(r, c) == x;
                    if (!on_level)
                        v.push_back("cell " + where + " metric '" + metric.name + "' value " + format_double(x) +
                                    " is not a mapped ordinal level");
                }
            }
        }
    }
    return report;
}

std::string to_string(Scale scale) { return scale == Scale::cardinal ? "cardinal" : "ordinal"; }

std::string to_string(Normalization method) {
    switch (method) {
    case Normalization::minmax: return "minmax";
    case Normalization::inverse_minmax: return "inverse_minmax";
    case Normalization::none: break;
    }
    return "none";
}

namespace {

Scale parse_scale(const std::string& s) {
    if (s == "cardinal") return Scale::cardinal;
    if (s == "ordinal") return Scale::ordinal;
    throw DataError("unknown scale '" + s + "'");
}

Normalization parse_normalization(const std::string& s) {
    if (s == "none") return Normalization::none;
    if (s == "minmax") return Normalization::minmax;
    if (s == "inverse_minmax") return Normalization::inverse_minmax;
    throw DataError("unknown normalization '" + s + "'");
}

std::string level_label(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    if (j.is_number()) return format_double(j.get<double>());
    throw DataError("ordinal level must be a string or a number");
}

std::optional<double> parse_number(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    if (b == e) return std::nullopt;
    double value = 0.0;
    const char* first = s.data() + b;
    const char* last = s.data() + e;
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        // from_chars rejects "inf"/"nan" spellings on some libstdc++ versions.
        std::string t(first, last);
        std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
        if (t == "inf" || t == "infinity") return HUGE_VAL;
        if (t == "-inf" || t == "-infinity") return -HUGE_VAL;
        if (t == "nan") return std::nan("");
        return std::nullopt;
    }
    return value;
}

std::size_t ordinal_rank(const MetricSpec& metric, const std::string& raw) {
    const auto& levels = metric.ordinal_levels;
    for (std::size_t r = 0; r < levels.size(); ++r)
        if (levels[r] == raw) return r;
    if (auto x = parse_number(raw)) {
        for (std::size_t r = 0; r < levels.size(); ++r) {
            auto l = parse_number(levels[r]);
            if (l && *l == *x) return r;
        }
    }
    throw DataError("level out of range: value '" + raw + "' is not a declared level of ordinal metric '" +
                    metric.name + "'");
}

} // namespace

ScaleSpec parse_scale_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DataError(std::string("scale spec parse failure: ") + e.what());
    }
    if (!j.is_object() || !j.contains("metrics") || !j["metrics"].is_array())
        throw DataError("scale spec parse failure: expected an object with a 'metrics' array");
    ScaleSpec spec;
    try {
        for (const auto& m : j["metrics"]) {
            MetricSpec metric;
            metric.name = m.at("name").get<std::string>();
            metric.scale = parse_scale(m.at("scale").get<std::string>());
            metric.normalization = parse_normalization(m.value("normalization", std::string("none")));
            if (m.contains("ordinal_levels") && !m["ordinal_levels"].is_null())
                for (const auto& l : m["ordinal_levels"]) metric.ordinal_levels.push_back(level_label(l));
            spec.metrics.push_back(std::move(metric));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("scale spec parse failure: ") + e.what());
    }
    spec.check();
    return spec;
}

ScaleSpec load_scale_spec(const std::filesystem::path& path) { return parse_scale_spec(read_text_file(path)); }

std::string scale_spec_to_json(const ScaleSpec& scale) {
    json metrics = json::array();
    for (const auto& m : scale.metrics) {
        json entry = {{"name", m.name}, {"scale", to_string(m.scale)}, {"normalization", to_string(m.normalization)}};
        if (m.scale == Scale::ordinal) entry["ordinal_levels"] = m.ordinal_levels;
        metrics.push_back(std::move(entry));
    }
    return json{{"metrics", metrics}}.dump(2) + "\n";
}

EvaluationTable parse_evaluation_table(const std::string& csv_text, const ScaleSpec& scale) {
    scale.check();
    auto rows = parse_csv(csv_text);
    if (rows.empty()) throw DataError("evaluation CSV parse failure: missing header");
    const auto& header = rows.front();
    if (header.size() < 3 || header[0] != "prompt_id" || header[1] != "dataset" || header[2] != "strategy")
        throw DataError("evaluation CSV parse failure: header must start with prompt_id,dataset,strategy");

    const std::size_t n = scale.size();
    // Column position of each declared metric.
    std::vector<std::size_t> column_of(n, 0);
    std::vector<bool> found(n, false);
    for (std::size_t c = 3; c < header.size(); ++c) {
        auto it = std::find_if(scale.metrics.begin(), scale.metrics.end(),
                               [&](const MetricSpec& m) { return m.name == header[c]; });
        if (it == scale.metrics.end()) throw DataError("unknown metric column '" + header[c] + "'");
        const auto i = static_cast<std::size_t>(it - scale.metrics.begin());
        if (found[i]) throw DataError("duplicate metric column '" + header[c] + "'");
        found[i] = true;
        column_of[i] = c;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!found[i]) throw DataError("metric '" + scale.metrics[i].name + "' has no column");

    EvaluationTable table;
    table.scale = scale;
    std::unordered_map<std::string, std::size_t> prompt_index, strategy_index;
    struct Row {
        std::size_t prompt, strategy;
        std::vector<double> values;
    };
    std::vector<Row> parsed;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && row[0].empty()) continue;
        const std::string line = "line " + std::to_string(r + 1);
        if (row.size() != header.size())
            throw DataError("evaluation CSV parse failure: " + line + " has " + std::to_string(row.size()) +
                            " fields, expected " + std::to_string(header.size()));
        auto [pit, new_prompt] = prompt_index.try_emplace(row[0], table.prompts.size());
        if (new_prompt) {
            table.prompts.push_back({row[0], row[1]});
        } else if (table.prompts[pit->second].dataset != row[1]) {
            throw DataError("prompt '" + row[0] + "' carries two dataset tags (" + line + ")");
        }
        auto [sit, new_strategy] = strategy_index.try_emplace(row[2], table.strategies.size());
        if (new_strategy) table.strategies.push_back(row[2]);

        Row out{pit->second, sit->second, std::vector<double>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            const auto& metric = scale.metrics[i];
            const auto& field = row[column_of[i]];
            if (metric.scale == Scale::ordinal) {
                out.values[i] = static_cast<double>(ordinal_rank(metric, field));
            } else {
                auto x = parse_number(field);
                if (!x) throw DataError("evaluation CSV parse failure: " + line + " metric '" + metric.name +
                                        "' is not a number: '" + field + "'");
                if (!std::isfinite(*x))
                    throw DataError("cardinal value non-finite: " + line + " metric '" + metric.name + "'");
                out.values[i] = *x;
            }
        }
        parsed.push_back(std::move(out));
    }

    const std::size_t m = table.prompts.size();
    const std::size_t k = table.strategies.size();
    if (m == 0 || k == 0) throw DataError("evaluation CSV holds no rows");
    std::vector<std::optional<std::vector<double>>> raw(m * k);
    for (auto& row : parsed) {
        auto& slot = raw[row.strategy * m + row.prompt];
        if (slot)
            throw DataError("duplicate cell (" + table.strategies[row.strategy] + ", " +
                            table.prompts[row.prompt].id + ")");
        slot = std::move(row.values);
    }
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t p = 0; p < m; ++p)
            if (!raw[s * m + p])
                throw DataError("missing cell (" + table.strategies[s] + ", " + table.prompts[p].id + ")");

    table.cells.assign(m * k, QualityVector{std::vector<double>(n)});
    std::vector<double> column(m * k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& metric = scale.metrics[i];
        for (std::size_t c = 0; c < m * k; ++c) column[c] = (*raw[c])[i];
        std::vector<double> normalized;
        if (metric.scale == Scale::ordinal) {
            normalized.resize(column.size());
            for (std::size_t c = 0; c < column.size(); ++c)
                normalized[c] = ordinal_value(static_cast<std::size_t>(column[c]), metric.ordinal_levels.size());
        } else {
            normalized = normalize_column(column, metric.normalization);
            auto [lo, hi] = std::minmax_element(column.begin(), column.end());
            table.anchors.push_back({metric.name, metric.normalization, *lo, *hi});
            if (metric.normalization == Normalization::none) {
                for (double x : column)
                    if (x < 0.0 || x > 1.0)
                        throw DataError("cardinal metric '" + metric.name + "' has value " + format_double(x) +
                                        " outside [0,1] and declares no normalization");
            }
        }
        for (std::size_t c = 0; c < m * k; ++c) table.cells[c].values[i] = normalized[c];
    }
    return table;
}

EvaluationTable load_evaluation_table(const std::filesystem::path& table_path,
                                      const std::filesystem::path& scale_path) {
    auto scale = load_scale_spec(scale_path);
    return parse_evaluation_table(read_text_file(table_path), scale);
}

ScaleSpec normalized_scale(const ScaleSpec& scale) {
    ScaleSpec out = scale;
    for (auto& m : out.metrics) m.normalization = Normalization::none;
    return out;
}

std::string evaluation_table_to_csv(const EvaluationTable& table) {
    std::ostringstream os;
    os << "prompt_id,dataset,strategy";
    for (const auto& m : table.scale.metrics) os << ',' << csv_escape(m.name);
    os << '\n';
    for (std::size_t p = 0; p < table.prompt_count(); ++p) {
        for (std::size_t s = 0; s < table.strategy_count(); ++s) {
            os << csv_escape(table.prompts[p].id) << ',' << csv_escape(table.prompts[p].dataset) << ','
               << csv_escape(table.strategies[s]);
            const auto& cell = table.cell(s, p);
            for (std::size_t i = 0; i < table.scale.size(); ++i) {
                const auto& metric = table.scale.metrics[i];
                os << ',';
                if (metric.scale == Scale::ordinal) {
                    const std::size_t c = metric.ordinal_levels.size();
                    std::size_t rank = 0;
                    for (std::size_t r = 0; r < c; ++r)
                        if (ordinal_value(r, c) == cell[i]) rank = r;
                    os << csv_escape(metric.ordinal_levels[rank]);
                } else {
                    os << format_double(cell[i]);
                }
            }
            os << '\n';
        }
    }
    return os.str();
}

std::vector<TokenRecord> parse_token_records(const std::string& jsonl_text) {
    std::vector<TokenRecord> records;
    std::istringstream in(jsonl_text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "token record line " + std::to_string(line_no);
        TokenRecord rec;
        try {
            auto j = json::parse(line);
            rec.prompt_id = j.at("prompt_id").get<std::string>();
            rec.strategy = j.at("strategy").get<std::string>();
            rec.tokens = j.at("tokens").get<std::vector<std::string>>();
            rec.uncond_logprob = j.at("uncond_logprob").get<std::vector<double>>();
            rec.cond_logprob = j.at("cond_logprob").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw DataError(where + ": parse failure: " + e.what());
        }
        if (rec.uncond_logprob.size() != rec.tokens.size() || rec.cond_logprob.size() != rec.tokens.size())
            throw DataError(where + ": log-probability lists must match the token count");
        for (const auto* list : {&rec.uncond_logprob, &rec.cond_logprob})
            for (double lp : *list)
                if (!std::isfinite(lp) || lp > 0.0)
                    throw DataError(where + ": log-probabilities must be finite and <= 0");
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<TokenRecord> load_token_records(const std::filesystem::path& path) {
    return parse_token_records(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    std::size_t i = 0;
    // Skip a UTF-8 byte order mark.
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        any = true;
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else {
            field += c;
        }
    }
    if (quoted) throw DataError("CSV parse failure: unterminated quoted field");
    if (any) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return std::to_string(value);
    return std::string(buf, ptr);
}

} // namespace gsdfront

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsdfront/agreement.hpp"
#include "gsdfront/gsd.hpp"
#include "gsdfront/inference.hpp"
#include "gsdfront/robustness.hpp"
#include "gsdfront/simulation.hpp"
#include "gsdfront/text_metrics.hpp"

// JSON, CSV and SVG renderings shared by the CLI and the Python module.
namespace gsdfront::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "gsdfront.report/1";

Json table_summary(const EvaluationTable& table);
Json system_summary(const PreferenceSystem& system);
Json to_json(const FrontResult& front);
Json to_json(const PairwiseTestResult& test);
Json to_json(const FrontTestResult& test);
Json to_json(const ContaminationCurve& curve);
Json to_json(const QTextParams& params);
Json to_json(const CalibrationResult& result);
Json agreement_json(const RatingPairs& pairs);

// `resample,statistic` rows in resample order.
std::string resampled_csv(const PairwiseTestResult& test);
// `k,statistic,p_value` rows.
std::string contamination_csv(const ContaminationCurve& curve);

// Kernel density polylines of the resampled statistics with observed markers and thresholds.
std::string density_svg(const FrontTestResult& test);
// Step curves of p_k against k with the significance line.
std::string pcurve_svg(const std::vector<ContaminationCurve>& curves, double alpha);

// File-name-safe form of a strategy id.
std::string slug(const std::string& id);

} // namespace gsdfront::report

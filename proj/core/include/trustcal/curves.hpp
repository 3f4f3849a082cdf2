#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trustcal/experiment.hpp"

namespace trustcal::experiment {

enum class CurveFormat { Csv, Json };

// "csv" or "json"; anything else is a UsageError.
CurveFormat parse_curve_format(std::string_view text);

// Columns: condition, round, integrated, total, percentage. CSV is canonical.
std::string export_curves(std::span<const TrustCurve> curves, CurveFormat format);
std::vector<TrustCurve> import_curves(std::string_view text, CurveFormat format);

}  // namespace trustcal::experiment

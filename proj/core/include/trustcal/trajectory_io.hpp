#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "trustcal/fit.hpp"

namespace trustcal::trust {

// One JSON object per line: {"round", "outcome", "tcc", "action"}.
std::string write_trajectory(std::span<const TrustObservation> trajectory);
std::vector<TrustObservation> read_trajectory(std::istream& in);
std::vector<TrustObservation> parse_trajectory(std::string_view text);

std::string params_to_json(const TrustParams& params);
TrustParams params_from_json(std::string_view text);

// Fitted parameters, the error on the input, and the config that produced them.
std::string fit_report_json(const FitResult& result, const FitConfig& config);

}  // namespace trustcal::trust

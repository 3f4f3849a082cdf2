#include "trustcal/trajectory_io.hpp"

#include <istream>
#include <sstream>

#include <json.hpp>

#include "trustcal/errors.hpp"

namespace trustcal::trust {

using nlohmann::json;

namespace {

json params_json(const TrustParams& p) {
  return {{"alpha0", p.alpha0},     {"beta0", p.beta0},       {"w_s", p.w_s},
          {"w_f", p.w_f},           {"w_repair", p.w_repair}, {"w_dampen", p.w_dampen},
          {"tcc_decay", p.tcc_decay}};
}

TrustObservation observation_from(const json& j) {
  TrustObservation obs;
  obs.round_number = j.at("round").get<int>();
  obs.outcome = parse_outcome(j.at("outcome").get<std::string>());
  if (j.contains("tcc") && !j.at("tcc").is_null()) {
    obs.tcc = parse_cue_kind(j.at("tcc").get<std::string>());
  }
  obs.action = parse_trust_action(j.at("action").get<std::string>());
  return obs;
}

}  // namespace

std::string write_trajectory(std::span<const TrustObservation> trajectory) {
  std::string out;
  for (const TrustObservation& obs : trajectory) {
    json j{{"round", obs.round_number},
           {"outcome", to_string(obs.outcome)},
           {"tcc", obs.tcc ? json(to_string(*obs.tcc)) : json(nullptr)},
           {"action", to_string(obs.action)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<TrustObservation> read_trajectory(std::istream& in) {
  std::vector<TrustObservation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(observation_from(json::parse(line)));
    } catch (const json::exception& e) {
      throw ConfigError("trajectory line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate_trajectory(out);
  return out;
}

std::vector<TrustObservation> parse_trajectory(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_trajectory(in);
}

std::string params_to_json(const TrustParams& params) { return params_json(params).dump(); }

TrustParams params_from_json(std::string_view text) {
  TrustParams p;
  try {
    json j = json::parse(text);
    p.alpha0 = j.value("alpha0", p.alpha0);
    p.beta0 = j.value("beta0", p.beta0);
    p.w_s = j.value("w_s", p.w_s);
    p.w_f = j.value("w_f", p.w_f);
    p.w_repair = j.value("w_repair", p.w_repair);
    p.w_dampen = j.value("w_dampen", p.w_dampen);
    p.tcc_decay = j.value("tcc_decay", p.tcc_decay);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed trust params: ") + e.what());
  }
  p.validate();
  return p;
}

std::string fit_report_json(const FitResult& result, const FitConfig& config) {
  json cfg{{"prior_bounds", {config.prior.lo, config.prior.hi}},
           {"weight_bounds", {config.weight.lo, config.weight.hi}},
           {"grid_points", config.grid_points},
           {"max_iterations", config.max_iterations},
           {"tolerance", config.tolerance},
           {"objective", to_string(config.objective)},
           {"fit_tcc_weights", config.fit_tcc_weights},
           {"tcc_decay", config.tcc_decay}};
  json doc{{"params", params_json(result.params)},
           {"rmse", result.rmse},
           {"objective_value", result.objective_value},
           {"iterations", result.iterations},
           {"config", cfg}};
  return doc.dump(2);
}

}  // namespace trustcal::trust

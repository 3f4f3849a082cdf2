#include "trustcal/policy.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trustcal/errors.hpp"

namespace trustcal::policy {

using nlohmann::json;

namespace {

bool unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::OverTrust: return "over_trust";
    case Classification::UnderTrust: return "under_trust";
    case Classification::Calibrated: return "calibrated";
  }
  return "calibrated";
}

TrustAssessment classify(double p_trust, double p_auto, double band_epsilon) {
  if (!unit_interval(p_trust) || !unit_interval(p_auto)) {
    throw DomainError("classify: probabilities must lie in [0,1]");
  }
  if (!(band_epsilon >= 0.0) || !std::isfinite(band_epsilon)) {
    throw DomainError("classify: band_epsilon must be >= 0");
  }
  TrustAssessment a{p_trust, p_auto, band_epsilon, Classification::Calibrated};
  if (p_trust - p_auto > band_epsilon) {
    a.classification = Classification::OverTrust;
  } else if (p_auto - p_trust > band_epsilon) {
    a.classification = Classification::UnderTrust;
  }
  return a;
}

ReliabilityEstimator::ReliabilityEstimator(std::size_t window) : window_(window) {
  if (window_ == 0) throw DomainError("reliability window must be >= 1");
}

void ReliabilityEstimator::record(trust::Outcome outcome) {
  recent_.push_back(outcome);
  if (recent_.size() > window_) recent_.pop_front();
}

ReliabilityEstimate ReliabilityEstimator::estimate() const {
  std::size_t successes = 0;
  for (trust::Outcome o : recent_) successes += o == trust::Outcome::Success ? 1 : 0;
  return {(static_cast<double>(successes) + 1.0) / (static_cast<double>(recent_.size()) + 2.0)};
}

CueCatalog CueCatalog::defaults() {
  CueCatalog c;
  c.repair = {
      "I am sorry, I was having difficulty identifying the correct target. I will do better next "
      "round.",
      "I am sorry, I am still having trouble with identification. Let me try something different "
      "to see if that will help.",
  };
  c.dampen = {
      "I am not going to be able to accurately identify targets next round.",
      "I am still having trouble identifying targets.",
  };
  return c;
}

const std::vector<std::string>& CueCatalog::texts(CueKind kind) const {
  return kind == CueKind::Repair ? repair : dampen;
}

const std::string& CueCatalog::text_for(CueKind kind, int round_number) const {
  const auto& list = texts(kind);
  if (list.empty()) {
    throw ConfigError("cue catalog has no " + std::string(to_string(kind)) + " utterances");
  }
  const int offset = std::max(0, round_number - start_round);
  return list[static_cast<std::size_t>(offset) % list.size()];
}

void CueCatalog::validate() const {
  if (repair.empty() || dampen.empty()) {
    throw ConfigError("cue catalog needs at least one utterance of each kind");
  }
  for (const auto* list : {&repair, &dampen}) {
    for (const std::string& text : *list) {
      if (text.empty()) throw ConfigError("cue catalog contains an empty utterance");
    }
  }
  if (start_round < 1) throw ConfigError("cue catalog start_round must be >= 1");
}

CueCatalog parse_cue_catalog(std::string_view json_text) {
  CueCatalog c;
  try {
    json j = json::parse(json_text);
    c.start_round = j.value("start_round", 4);
    c.repair = j.at("repair").get<std::vector<std::string>>();
    c.dampen = j.at("dampen").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed cue catalog: ") + e.what());
  }
  c.validate();
  return c;
}

CueCatalog load_cue_catalog(const std::filesystem::path& path) {
  return parse_cue_catalog(read_file(path));
}

std::string to_json(const CueCatalog& catalog) {
  return json{{"start_round", catalog.start_round},
              {"repair", catalog.repair},
              {"dampen", catalog.dampen}}
      .dump(2);
}

std::optional<Tcc> select_cue(const TrustAssessment& assessment, int round_number,
                              const CueCatalog& catalog) {
  CueKind kind;
  switch (assessment.classification) {
    case Classification::OverTrust: kind = CueKind::Dampen; break;
    case Classification::UnderTrust: kind = CueKind::Repair; break;
    default: return std::nullopt;
  }
  return Tcc{kind, catalog.text_for(kind, round_number), round_number};
}

std::string_view to_string(PolicyAction a) {
  switch (a) {
    case PolicyAction::Dampen: return "dampen";
    case PolicyAction::Repair: return "repair";
    case PolicyAction::Respect: return "respect";
    case PolicyAction::NoAction: return "no_action";
  }
  return "no_action";
}

std::string_view to_string(RespectHold h) {
  return h == RespectHold::UntilClear ? "until_clear" : "one_round";
}

RespectHold parse_respect_hold(std::string_view text) {
  if (text == "until_clear") return RespectHold::UntilClear;
  if (text == "one_round") return RespectHold::OneRound;
  throw ConfigError("unknown respect hold: " + std::string(text));
}

void PolicyConfig::validate() const {
  if (!(band_epsilon >= 0.0)) throw ConfigError("band_epsilon must be >= 0");
  if (!(delta >= 0.0)) throw ConfigError("delta must be >= 0");
  if (streak < 1) throw ConfigError("streak must be >= 1");
  if (reliability_window < 1) throw ConfigError("reliability window must be >= 1");
}

PolicyConfig parse_policy_config(std::string_view json_text) {
  PolicyConfig c;
  try {
    json j = json::parse(json_text);
    c.band_epsilon = j.value("band_epsilon", c.band_epsilon);
    c.delta = j.value("delta", c.delta);
    c.streak = j.value("streak", c.streak);
    c.reliability_window = j.value("window", c.reliability_window);
    if (j.contains("respect_hold")) c.hold = parse_respect_hold(j.at("respect_hold").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed policy config: ") + e.what());
  }
  c.validate();
  return c;
}

PolicyConfig load_policy_config(const std::filesystem::path& path) {
  return parse_policy_config(read_file(path));
}

std::string to_json(const PolicyConfig& config) {
  return json{{"band_epsilon", config.band_epsilon},
              {"delta", config.delta},
              {"streak", config.streak},
              {"window", config.reliability_window},
              {"respect_hold", to_string(config.hold)}}
      .dump(2);
}

int divergence_run(std::span<const double> predicted, std::span<const TrustAction> observed,
                   double delta) {
  if (predicted.size() != observed.size()) {
    throw DomainError("predicted and observed histories differ in length");
  }
  int run = 0;
  for (std::size_t i = predicted.size(); i-- > 0;) {
    if (std::abs(predicted[i] - action_value(observed[i])) > delta) {
      ++run;
    } else {
      break;
    }
  }
  return run;
}

PolicyDecision respect_or_calibrate(std::span<const double> predicted,
                                    std::span<const TrustAction> observed, double p_auto,
                                    const PolicyConfig& config) {
  if (predicted.size() != observed.size()) {
    throw DomainError("predicted and observed histories differ in length");
  }
  if (predicted.empty()) throw DomainError("respect_or_calibrate needs at least one round");
  config.validate();

  const int run = divergence_run(predicted, observed, config.delta);
  const TrustAssessment assessment = classify(predicted.back(), p_auto, config.band_epsilon);

  PolicyDecision d;
  d.rationale = {assessment.classification, predicted.back(), action_value(observed.back()),
                 p_auto, run};

  const bool respect = config.hold == RespectHold::UntilClear ? run >= config.streak
                                                              : run == config.streak;
  if (respect) {
    d.action = PolicyAction::Respect;
    return d;
  }
  switch (assessment.classification) {
    case Classification::OverTrust: d.action = PolicyAction::Dampen; break;
    case Classification::UnderTrust: d.action = PolicyAction::Repair; break;
    case Classification::Calibrated: d.action = PolicyAction::NoAction; break;
  }
  return d;
}

}  // namespace trustcal::policy

#include "trustcal/sim_human.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trustcal/errors.hpp"

namespace trustcal::sim {

using nlohmann::json;

void SimHumanParams::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(tau0)) throw DomainError("tau0 must lie in [0,1]");
  if (!(gain_pos >= 0.0) || !(gain_neg >= 0.0)) throw DomainError("gains must be >= 0");
  if (!(kappa >= 0.0)) throw DomainError("kappa must be >= 0");
  if (!unit(decay)) throw DomainError("decay must lie in [0,1]");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw DomainError("temperature must be > 0");
  }
}

SimHumanState make_state(const SimHumanParams& params) {
  params.validate();
  SimHumanState s;
  s.tau = params.tau0;
  s.rng.seed(params.seed);
  return s;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double integrate_probability(const SimHumanState& state, const SimHumanParams& params) {
  return sigmoid((state.tau - 0.5) / params.temperature);
}

TrustAction decide(SimHumanState& state, const SimHumanParams& params) {
  // 53-bit uniform in [0,1) built directly from the engine output.
  const double u = static_cast<double>(state.rng() >> 11) * 0x1.0p-53;
  return u < integrate_probability(state, params) ? TrustAction::Integrate : TrustAction::Discard;
}

SimHumanState observe_outcome(SimHumanState state, Points revealed_round_score,
                              const SimHumanParams& params) {
  state.tau += revealed_round_score > 0 ? params.gain_pos : -params.gain_neg;
  state.tau = std::clamp(state.tau, 0.0, 1.0);
  return state;
}

double cue_shift(const SimHumanParams& params, int repeat_index) {
  return params.kappa * std::pow(params.decay, repeat_index);
}

SimHumanState receive_tcc(SimHumanState state, CueKind cue, const SimHumanParams& params) {
  if (cue == CueKind::Repair) {
    state.tau += cue_shift(params, state.consecutive_repair);
    state.consecutive_repair += 1;
    state.consecutive_dampen = 0;
  } else {
    state.tau -= cue_shift(params, state.consecutive_dampen);
    state.consecutive_dampen += 1;
    state.consecutive_repair = 0;
  }
  state.tau = std::clamp(state.tau, 0.0, 1.0);
  return state;
}

SimHumanState note_no_cue(SimHumanState state) {
  state.consecutive_repair = 0;
  state.consecutive_dampen = 0;
  return state;
}

const Preset& calibrated_preset() {
  static const Preset preset = [] {
    Preset p;
    p.name = "calibrated-v1";
    p.params.tau0 = 0.6;
    p.params.gain_pos = 0.08;
    p.params.gain_neg = 0.1;
    p.params.kappa = 0.3;
    p.params.decay = 0.5;
    p.params.temperature = 0.15;
    p.manipulation_fail_prob = 0.05;
    return p;
  }();
  return preset;
}

Preset parse_preset(std::string_view json_text) {
  Preset p = calibrated_preset();
  try {
    json j = json::parse(json_text);
    p.name = j.at("name").get<std::string>();
    const json& q = j.at("params");
    p.params.tau0 = q.value("tau0", p.params.tau0);
    p.params.gain_pos = q.value("gain_pos", p.params.gain_pos);
    p.params.gain_neg = q.value("gain_neg", p.params.gain_neg);
    p.params.kappa = q.value("kappa", p.params.kappa);
    p.params.decay = q.value("decay", p.params.decay);
    p.params.temperature = q.value("temperature", p.params.temperature);
    p.manipulation_fail_prob = j.value("manipulation_fail_prob", p.manipulation_fail_prob);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed preset: ") + e.what());
  }
  try {
    p.params.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid preset: ") + e.what());
  }
  if (!(p.manipulation_fail_prob >= 0.0 && p.manipulation_fail_prob <= 1.0)) {
    throw ConfigError("manipulation_fail_prob must lie in [0,1]");
  }
  return p;
}

Preset load_preset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open preset " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_preset(buf.str());
}

std::string to_json(const Preset& preset) {
  const SimHumanParams& q = preset.params;
  return json{{"name", preset.name},
              {"params",
               {{"tau0", q.tau0},
                {"gain_pos", q.gain_pos},
                {"gain_neg", q.gain_neg},
                {"kappa", q.kappa},
                {"decay", q.decay},
                {"temperature", q.temperature}}},
              {"manipulation_fail_prob", preset.manipulation_fail_prob}}
      .dump(2);
}

SimHumanParams participant_params(const PopulationSpec& spec, std::size_t index) {
  SimHumanParams p = spec.preset.params;
  std::mt19937_64 rng(derive_seed(spec.master_seed, 2 * index));
  std::normal_distribution<double> noise(0.0, 1.0);
  auto jitter = [&](double v) { return v * (1.0 + spec.jitter * noise(rng)); };

  p.tau0 = std::clamp(jitter(p.tau0), 0.0, 1.0);
  p.gain_pos = std::max(0.0, jitter(p.gain_pos));
  p.gain_neg = std::max(0.0, jitter(p.gain_neg));
  p.kappa = std::max(0.0, jitter(p.kappa));
  p.decay = std::clamp(jitter(p.decay), 0.0, 1.0);
  p.temperature = std::max(1e-3, jitter(p.temperature));
  p.seed = derive_seed(spec.master_seed, 2 * index + 1);
  return p;
}

}  // namespace trustcal::sim

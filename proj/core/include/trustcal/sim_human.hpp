#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>

#include "trustcal/common.hpp"

namespace trustcal::sim {

// Synthetic participant. Internal trust tau moves with each revealed robot
// round and with trust calibration cues; the trust action is a logistic
// draw around tau = 0.5.
struct SimHumanParams {
  double tau0 = 0.6;
  double gain_pos = 0.08;
  double gain_neg = 0.1;
  double kappa = 0.3;
  double decay = 0.5;
  double temperature = 0.15;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SimHumanParams&) const = default;
};

struct SimHumanState {
  double tau = 0.5;
  int consecutive_repair = 0;
  int consecutive_dampen = 0;
  std::mt19937_64 rng;
};

SimHumanState make_state(const SimHumanParams& params);

double sigmoid(double x);
double integrate_probability(const SimHumanState& state, const SimHumanParams& params);

// Draws the trust action; advances the state's RNG.
TrustAction decide(SimHumanState& state, const SimHumanParams& params);

SimHumanState observe_outcome(SimHumanState state, Points revealed_round_score,
                              const SimHumanParams& params);
SimHumanState receive_tcc(SimHumanState state, CueKind cue, const SimHumanParams& params);
SimHumanState note_no_cue(SimHumanState state);

// Cue shift for the n-th consecutive cue of one kind (n counted from 0).
double cue_shift(const SimHumanParams& params, int repeat_index);

struct Preset {
  std::string name;
  SimHumanParams params;
  double manipulation_fail_prob = 0.05;
};

// Frozen parameter set used for headless reproduction runs.
const Preset& calibrated_preset();

Preset parse_preset(std::string_view json_text);
Preset load_preset(const std::filesystem::path& path);
std::string to_json(const Preset& preset);

struct PopulationSpec {
  std::size_t count = 30;
  Preset preset = calibrated_preset();
  double jitter = 0.1;  // relative sigma applied to every parameter
  std::uint64_t master_seed = 1;
};

// Per-participant parameters: each default scaled by (1 + N(0, jitter)),
// then clamped to its valid range.
SimHumanParams participant_params(const PopulationSpec& spec, std::size_t index);

}  // namespace trustcal::sim

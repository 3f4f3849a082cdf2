#pragma once

#include <optional>
#include <span>
#include <vector>

#include "trustcal/common.hpp"

namespace trustcal::trust {

// Per-person Beta trust parameters. alpha0/beta0 are prior pseudo-counts and
// w_s/w_f weight each observed robot success/failure. The cue weights and
// decay turn trust calibration cues into discounted pseudo-evidence.
struct TrustParams {
  double alpha0 = 1.0;
  double beta0 = 1.0;
  double w_s = 1.0;
  double w_f = 1.0;
  double w_repair = 0.0;
  double w_dampen = 0.0;
  double tcc_decay = 0.5;

  void validate() const;
  bool operator==(const TrustParams&) const = default;
};

enum class Outcome { Success, Failure };

// A round counts as a robot success only when its score is strictly positive.
constexpr Outcome outcome_from_score(Points score) {
  return score > 0 ? Outcome::Success : Outcome::Failure;
}

std::string_view to_string(Outcome outcome);
Outcome parse_outcome(std::string_view text);

struct TrustState {
  double alpha = 1.0;
  double beta = 1.0;
  int round_index = 0;
  int consecutive_repair = 0;
  int consecutive_dampen = 0;

  bool operator==(const TrustState&) const = default;
};

TrustState init(const TrustParams& params);
TrustState update(TrustState state, Outcome outcome, const TrustParams& params);
TrustState apply_tcc(TrustState state, CueKind cue, const TrustParams& params);
// A round without any cue ends both consecutive-cue streaks.
TrustState clear_cue_streak(TrustState state);

inline double mean_trust(const TrustState& state) { return state.alpha / (state.alpha + state.beta); }

struct TrustDeltas {
  double on_success = 0.0;
  double on_failure = 0.0;
};

TrustDeltas predict_deltas(const TrustState& state, const TrustParams& params);

struct TrustObservation {
  int round_number = 0;
  Outcome outcome = Outcome::Failure;
  std::optional<CueKind> tcc;
  TrustAction action = TrustAction::Discard;

  bool operator==(const TrustObservation&) const = default;
};

// Throws DomainError unless round numbers strictly increase.
void validate_trajectory(std::span<const TrustObservation> trajectory);

// Expected trust at each decision point. A round's cue is applied before its
// prediction; its outcome only after, because the action is made blind.
std::vector<double> predict_trajectory(std::span<const TrustObservation> trajectory,
                                       const TrustParams& params);

// Final state after folding the whole trajectory.
TrustState final_state(std::span<const TrustObservation> trajectory, const TrustParams& params);

}  // namespace trustcal::trust

#include "trustcal/trust_model.hpp"

#include <cmath>
#include <string>

#include "trustcal/errors.hpp"

namespace trustcal::trust {

void TrustParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(alpha0) || alpha0 <= 0.0) throw DomainError("alpha0 must be > 0");
  if (!finite(beta0) || beta0 <= 0.0) throw DomainError("beta0 must be > 0");
  if (!finite(w_s) || w_s < 0.0 || !finite(w_f) || w_f < 0.0) {
    throw DomainError("outcome weights must be >= 0");
  }
  if (!finite(w_repair) || w_repair < 0.0 || !finite(w_dampen) || w_dampen < 0.0) {
    throw DomainError("cue weights must be >= 0");
  }
  if (!(tcc_decay >= 0.0 && tcc_decay <= 1.0)) throw DomainError("tcc_decay must lie in [0,1]");
}

std::string_view to_string(Outcome outcome) {
  return outcome == Outcome::Success ? "success" : "failure";
}

Outcome parse_outcome(std::string_view text) {
  if (text == "success") return Outcome::Success;
  if (text == "failure") return Outcome::Failure;
  throw DomainError("unknown outcome: " + std::string(text));
}

TrustState init(const TrustParams& params) {
  params.validate();
  TrustState s;
  s.alpha = params.alpha0;
  s.beta = params.beta0;
  return s;
}

TrustState update(TrustState state, Outcome outcome, const TrustParams& params) {
  if (outcome == Outcome::Success) {
    state.alpha += params.w_s;
  } else {
    state.beta += params.w_f;
  }
  state.round_index += 1;
  return state;
}

TrustState apply_tcc(TrustState state, CueKind cue, const TrustParams& params) {
  if (cue == CueKind::Repair) {
    state.alpha += params.w_repair * std::pow(params.tcc_decay, state.consecutive_repair);
    state.consecutive_repair += 1;
    state.consecutive_dampen = 0;
  } else {
    state.beta += params.w_dampen * std::pow(params.tcc_decay, state.consecutive_dampen);
    state.consecutive_dampen += 1;
    state.consecutive_repair = 0;
  }
  return state;
}

TrustState clear_cue_streak(TrustState state) {
  state.consecutive_repair = 0;
  state.consecutive_dampen = 0;
  return state;
}

TrustDeltas predict_deltas(const TrustState& state, const TrustParams& params) {
  const double now = mean_trust(state);
  return {mean_trust(update(state, Outcome::Success, params)) - now,
          mean_trust(update(state, Outcome::Failure, params)) - now};
}

void validate_trajectory(std::span<const TrustObservation> trajectory) {
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    if (trajectory[i].round_number <= trajectory[i - 1].round_number) {
      throw DomainError("trajectory round numbers must strictly increase");
    }
  }
}

namespace {

TrustState pre_decision(TrustState state, const TrustObservation& obs, const TrustParams& params) {
  return obs.tcc ? apply_tcc(state, *obs.tcc, params) : clear_cue_streak(state);
}

}  // namespace

std::vector<double> predict_trajectory(std::span<const TrustObservation> trajectory,
                                       const TrustParams& params) {
  validate_trajectory(trajectory);
  std::vector<double> out;
  out.reserve(trajectory.size());
  TrustState state = init(params);
  for (const TrustObservation& obs : trajectory) {
    state = pre_decision(state, obs, params);
    out.push_back(mean_trust(state));
    state = update(state, obs.outcome, params);
  }
  return out;
}

TrustState final_state(std::span<const TrustObservation> trajectory, const TrustParams& params) {
  validate_trajectory(trajectory);
  TrustState state = init(params);
  for (const TrustObservation& obs : trajectory) {
    state = update(pre_decision(state, obs, params), obs.outcome, params);
  }
  return state;
}

}  // namespace trustcal::trust

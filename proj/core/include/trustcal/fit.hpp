#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "trustcal/trust_model.hpp"

namespace trustcal::trust {

enum class FitObjective { Rmse, LogLikelihood };

std::string_view to_string(FitObjective objective);
FitObjective parse_fit_objective(std::string_view text);

struct ParamBounds {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const ParamBounds&) const = default;
};

struct FitConfig {
  ParamBounds prior{0.1, 10.0};   // alpha0 and beta0
  ParamBounds weight{0.0, 5.0};   // w_s, w_f and, when enabled, cue weights
  int grid_points = 20;
  int max_iterations = 50;
  double tolerance = 1e-6;
  FitObjective objective = FitObjective::Rmse;
  // Cue weights join the coordinate-descent stage only; the grid stays 4-D.
  bool fit_tcc_weights = false;
  double tcc_decay = 0.5;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct FitResult {
  TrustParams params;
  double rmse = 0.0;
  double objective_value = 0.0;
  int iterations = 0;
};

// Root-mean-square error between predicted trust and the 1/0 trust actions.
double rmse(std::span<const TrustObservation> trajectory, const TrustParams& params);

// Mean negative Bernoulli log-likelihood of the actions.
double negative_log_likelihood(std::span<const TrustObservation> trajectory,
                               const TrustParams& params);

// Bounded grid search followed by step-halving coordinate descent.
// Deterministic for a given trajectory and config regardless of threading.
FitResult fit(std::span<const TrustObservation> trajectory, const FitConfig& config);

// Refit after every trust decision: result i is fitted on rounds [0, i].
std::vector<FitResult> fit_online(std::span<const TrustObservation> trajectory,
                                  const FitConfig& config);

}  // namespace trustcal::trust

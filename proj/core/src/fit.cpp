#include "trustcal/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "trustcal/errors.hpp"

namespace trustcal::trust {

std::string_view to_string(FitObjective objective) {
  return objective == FitObjective::Rmse ? "rmse" : "loglik";
}

FitObjective parse_fit_objective(std::string_view text) {
  if (text == "rmse") return FitObjective::Rmse;
  if (text == "loglik" || text == "log_likelihood") return FitObjective::LogLikelihood;
  throw UsageError("unknown fit objective: " + std::string(text));
}

void FitConfig::validate() const {
  if (!(prior.lo > 0.0 && prior.hi >= prior.lo)) throw DomainError("prior bounds must be positive");
  if (!(weight.lo >= 0.0 && weight.hi >= weight.lo)) {
    throw DomainError("weight bounds must be non-negative");
  }
  if (grid_points < 1) throw DomainError("grid_points must be >= 1");
  if (max_iterations < 0) throw DomainError("max_iterations must be >= 0");
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be > 0");
  if (!(tcc_decay >= 0.0 && tcc_decay <= 1.0)) throw DomainError("tcc_decay must lie in [0,1]");
}

namespace {

constexpr double kProbFloor = 1e-9;

// Single pass over the trajectory without allocation.
template <typename Accumulate>
void walk(std::span<const TrustObservation> trajectory, const TrustParams& params,
          Accumulate&& accumulate) {
  TrustState state;
  state.alpha = params.alpha0;
  state.beta = params.beta0;
  for (const TrustObservation& obs : trajectory) {
    state = obs.tcc ? apply_tcc(state, *obs.tcc, params) : clear_cue_streak(state);
    accumulate(mean_trust(state), action_value(obs.action));
    state = update(state, obs.outcome, params);
  }
}

double rmse_unchecked(std::span<const TrustObservation> trajectory, const TrustParams& params) {
  double sum = 0.0;
  walk(trajectory, params, [&](double predicted, double observed) {
    const double e = predicted - observed;
    sum += e * e;
  });
  return std::sqrt(sum / static_cast<double>(trajectory.size()));
}

double nll_unchecked(std::span<const TrustObservation> trajectory, const TrustParams& params) {
  double sum = 0.0;
  walk(trajectory, params, [&](double predicted, double observed) {
    const double p = std::clamp(predicted, kProbFloor, 1.0 - kProbFloor);
    sum -= observed > 0.5 ? std::log(p) : std::log1p(-p);
  });
  return sum / static_cast<double>(trajectory.size());
}

double objective(std::span<const TrustObservation> trajectory, const TrustParams& params,
                 FitObjective kind) {
  return kind == FitObjective::Rmse ? rmse_unchecked(trajectory, params)
                                    : nll_unchecked(trajectory, params);
}

double grid_value(const ParamBounds& b, int points, int i) {
  if (points == 1) return 0.5 * (b.lo + b.hi);
  return b.lo + (b.hi - b.lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

double grid_spacing(const ParamBounds& b, int points) {
  return points == 1 ? 0.5 * (b.hi - b.lo) : (b.hi - b.lo) / static_cast<double>(points - 1);
}

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  std::size_t index = 0;

  bool better_than(const Candidate& other) const {
    return value < other.value || (value == other.value && index < other.index);
  }
};

TrustParams grid_params(std::size_t flat, const FitConfig& config) {
  const auto n = static_cast<std::size_t>(config.grid_points);
  std::array<int, 4> idx{};
  for (int axis = 3; axis >= 0; --axis) {
    idx[static_cast<std::size_t>(axis)] = static_cast<int>(flat % n);
    flat /= n;
  }
  TrustParams p;
  p.alpha0 = grid_value(config.prior, config.grid_points, idx[0]);
  p.beta0 = grid_value(config.prior, config.grid_points, idx[1]);
  p.w_s = grid_value(config.weight, config.grid_points, idx[2]);
  p.w_f = grid_value(config.weight, config.grid_points, idx[3]);
  p.w_repair = 0.0;
  p.w_dampen = 0.0;
  p.tcc_decay = config.tcc_decay;
  return p;
}

Candidate grid_search(std::span<const TrustObservation> trajectory, const FitConfig& config) {
  const auto n = static_cast<std::size_t>(config.grid_points);
  const std::size_t total = n * n * n * n;
  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, 64);
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));

  std::vector<Candidate> best(threads);
  auto scan = [&](unsigned worker) {
    const std::size_t begin = total * worker / threads;
    const std::size_t end = total * (worker + 1) / threads;
    Candidate local;
    for (std::size_t i = begin; i < end; ++i) {
      Candidate c{objective(trajectory, grid_params(i, config), config.objective), i};
      if (c.better_than(local)) local = c;
    }
    best[worker] = local;
  };

  if (threads == 1) {
    scan(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(scan, w);
  }

  Candidate winner;
  for (const Candidate& c : best) {
    if (c.better_than(winner)) winner = c;
  }
  return winner;
}

struct Axis {
  double TrustParams::*field;
  ParamBounds bounds;
  double step;
};

}  // namespace

double rmse(std::span<const TrustObservation> trajectory, const TrustParams& params) {
  if (trajectory.empty()) throw DomainError("rmse of an empty trajectory");
  params.validate();
  return rmse_unchecked(trajectory, params);
}

double negative_log_likelihood(std::span<const TrustObservation> trajectory,
                               const TrustParams& params) {
  if (trajectory.empty()) throw DomainError("likelihood of an empty trajectory");
  params.validate();
  return nll_unchecked(trajectory, params);
}

FitResult fit(std::span<const TrustObservation> trajectory, const FitConfig& config) {
  if (trajectory.empty()) throw DomainError("cannot fit an empty trajectory");
  config.validate();
  validate_trajectory(trajectory);

  const Candidate seed = grid_search(trajectory, config);
  TrustParams best = grid_params(seed.index, config);
  double best_value = seed.value;

  std::vector<Axis> axes{
      {&TrustParams::alpha0, config.prior, grid_spacing(config.prior, config.grid_points)},
      {&TrustParams::beta0, config.prior, grid_spacing(config.prior, config.grid_points)},
      {&TrustParams::w_s, config.weight, grid_spacing(config.weight, config.grid_points)},
      {&TrustParams::w_f, config.weight, grid_spacing(config.weight, config.grid_points)},
  };
  if (config.fit_tcc_weights) {
    axes.push_back({&TrustParams::w_repair, config.weight, grid_spacing(config.weight, config.grid_points)});
    axes.push_back({&TrustParams::w_dampen, config.weight, grid_spacing(config.weight, config.grid_points)});
  }

  int iterations = 0;
  for (; iterations < config.max_iterations; ++iterations) {
    double gained = 0.0;
    for (Axis& axis : axes) {
      for (double sign : {1.0, -1.0}) {
        TrustParams trial = best;
        trial.*axis.field =
            std::clamp(best.*axis.field + sign * axis.step, axis.bounds.lo, axis.bounds.hi);
        if (trial.*axis.field == best.*axis.field) continue;
        const double value = objective(trajectory, trial, config.objective);
        if (value < best_value) {
          gained += best_value - value;
          best_value = value;
          best = trial;
          break;
        }
      }
    }
    if (gained < config.tolerance) {
      double widest = 0.0;
      for (Axis& axis : axes) {
        axis.step *= 0.5;
        widest = std::max(widest, axis.step);
      }
      if (widest < config.tolerance) {
        ++iterations;
        break;
      }
    }
  }

  FitResult result;
  result.params = best;
  result.rmse = rmse_unchecked(trajectory, best);
  result.objective_value = best_value;
  result.iterations = iterations;
  return result;
}

std::vector<FitResult> fit_online(std::span<const TrustObservation> trajectory,
                                  const FitConfig& config) {
  if (trajectory.empty()) throw DomainError("cannot fit an empty trajectory");
  std::vector<FitResult> out;
  out.reserve(trajectory.size());
  for (std::size_t i = 1; i <= trajectory.size(); ++i) {
    out.push_back(fit(trajectory.first(i), config));
  }
  return out;
}

}  // namespace trustcal::trust

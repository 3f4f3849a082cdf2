#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trustcal/common.hpp"
#include "trustcal/trust_model.hpp"

namespace trustcal::policy {

enum class Classification { OverTrust, UnderTrust, Calibrated };

std::string_view to_string(Classification c);

struct TrustAssessment {
  double p_trust = 0.0;
  double p_auto = 0.0;
  double band_epsilon = 0.0;
  Classification classification = Classification::Calibrated;
};

// OverTrust iff p_trust - p_auto > band_epsilon, UnderTrust iff
// p_auto - p_trust > band_epsilon, otherwise Calibrated.
TrustAssessment classify(double p_trust, double p_auto, double band_epsilon);

struct ReliabilityEstimate {
  double p_auto = 0.5;
};

// Rolling success frequency over the last `window` rounds with Laplace
// smoothing, (successes + 1) / (n + 2).
class ReliabilityEstimator {
 public:
  explicit ReliabilityEstimator(std::size_t window = 5);

  void record(trust::Outcome outcome);
  ReliabilityEstimate estimate() const;
  std::size_t size() const { return recent_.size(); }

 private:
  std::size_t window_;
  std::deque<trust::Outcome> recent_;
};

struct Tcc {
  CueKind kind = CueKind::Repair;
  std::string text;
  int round_number = 0;
  bool operator==(const Tcc&) const = default;
};

// Ordered utterances per cue kind. Cues cycle through each list starting at
// `start_round`, so the first cue delivered in that round uses entry 0.
struct CueCatalog {
  std::vector<std::string> repair;
  std::vector<std::string> dampen;
  int start_round = 4;

  static CueCatalog defaults();
  const std::vector<std::string>& texts(CueKind kind) const;
  const std::string& text_for(CueKind kind, int round_number) const;
  void validate() const;
  bool operator==(const CueCatalog&) const = default;
};

CueCatalog parse_cue_catalog(std::string_view json_text);
CueCatalog load_cue_catalog(const std::filesystem::path& path);
std::string to_json(const CueCatalog& catalog);

// Dampen for OverTrust, Repair for UnderTrust, nothing when Calibrated.
std::optional<Tcc> select_cue(const TrustAssessment& assessment, int round_number,
                              const CueCatalog& catalog);

enum class PolicyAction { Dampen, Repair, Respect, NoAction };
enum class RespectHold { UntilClear, OneRound };

std::string_view to_string(PolicyAction a);
std::string_view to_string(RespectHold h);
RespectHold parse_respect_hold(std::string_view text);

struct PolicyConfig {
  double band_epsilon = 0.1;
  double delta = 0.35;
  int streak = 2;
  std::size_t reliability_window = 5;
  RespectHold hold = RespectHold::UntilClear;

  void validate() const;
};

PolicyConfig parse_policy_config(std::string_view json_text);
PolicyConfig load_policy_config(const std::filesystem::path& path);
std::string to_json(const PolicyConfig& config);

struct Rationale {
  Classification classification = Classification::Calibrated;
  double predicted = 0.0;
  double observed = 0.0;
  double p_auto = 0.0;
  // Consecutive most-recent rounds with |predicted - observed| > delta.
  int divergence_streak = 0;
};

struct PolicyDecision {
  PolicyAction action = PolicyAction::NoAction;
  Rationale rationale;
};

// Length of the run of divergent rounds ending at the latest round.
int divergence_run(std::span<const double> predicted, std::span<const TrustAction> observed,
                   double delta);

// Respect when the latest `streak` rounds all diverge from the model's
// prediction (an outside cause is suspected); otherwise calibrate against
// the latest predicted trust.
PolicyDecision respect_or_calibrate(std::span<const double> predicted,
                                    std::span<const TrustAction> observed, double p_auto,
                                    const PolicyConfig& config);

}  // namespace trustcal::policy

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trustcal/event_log.hpp"
#include "trustcal/protocol.hpp"
#include "trustcal/session.hpp"
#include "trustcal/sim_human.hpp"
#include "trustcal/trust_model.hpp"

namespace trustcal::experiment {

struct RoundRecord {
  int round_number = 0;
  game::RobotReport report{0, 0, 0};
  std::optional<policy::Tcc> tcc;
  TrustAction trust_action = TrustAction::Discard;
  Points team_score_after = 0;
  // The trust action was logged before the round's reveal.
  bool action_before_reveal = true;
};

struct Session {
  std::string session_id;
  std::string participant_id;
  ConditionId condition = ConditionId::ControlPositive;
  std::vector<RoundRecord> rounds;
  std::vector<bool> manipulation_results;
  bool excluded = false;
  bool complete = false;
};

// Projects a session log into the per-round record used for analysis.
Session session_from_log(std::span<const service::Event> events);

std::vector<Session> load_sessions(const service::EventStore& store);

struct RunResult {
  std::vector<Session> sessions;
  std::vector<std::vector<service::Event>> logs;  // parallel to sessions
};

// Plays every simulated participant through the full ten-round protocol.
// Participants run in parallel; output is ordered by participant index and
// is identical for a fixed master seed.
RunResult run_condition(const Condition& condition, const sim::PopulationSpec& population,
                        const ProtocolConfig& protocol = {}, unsigned threads = 0);

// Marks sessions that failed two or more manipulation checks.
std::vector<Session> apply_exclusions(std::vector<Session> sessions);

// Sessions that count toward trust percentages.
bool counts_toward_curves(const Session& session);

struct CurvePoint {
  int round_number = 0;
  int integrated = 0;
  int total = 0;
  double percentage = 0.0;
  bool operator==(const CurvePoint&) const = default;
};

struct TrustCurve {
  std::string condition;
  std::vector<CurvePoint> points;
  bool operator==(const TrustCurve&) const = default;
};

// Fraction of retained, complete sessions that integrated in `round_number`.
// Throws DomainError when no session qualifies.
CurvePoint trust_percentage(std::span<const Session> sessions, int round_number);

// Points for rounds 1..10 that have at least one qualifying session.
TrustCurve trust_curve(std::string condition, std::span<const Session> sessions);

// Trust observations for model fitting, one per completed round.
std::vector<trust::TrustObservation> trajectory_of(const Session& session);

struct ReplayIssue {
  std::string session_id;
  int round = 0;
  std::string message;
};

struct ReplayReport {
  std::size_t sessions_checked = 0;
  std::size_t rounds_checked = 0;
  std::vector<ReplayIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Independent game-core replay of a log: re-derives every team score from
// the condition schedule and the logged selections and compares it with the
// logged value, and checks blind ordering and sequence density.
void validate_log(std::span<const service::Event> events, ReplayReport& report);

std::string to_json(const ReplayReport& report);
std::string to_json(const Session& session);

}  // namespace trustcal::experiment

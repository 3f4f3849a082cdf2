#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "trustcal/game.hpp"
#include "trustcal/policy.hpp"
#include "trustcal/protocol.hpp"

namespace trustcal::service {

// Errors surfaced to API clients; `status` is the HTTP status to report.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class NotFound : public ServiceError {
 public:
  explicit NotFound(const std::string& what) : ServiceError(404, what) {}
};

// Ordering violations and duplicates.
class Conflict : public ServiceError {
 public:
  explicit Conflict(const std::string& what) : ServiceError(409, what) {}
};

class ValidationError : public ServiceError {
 public:
  explicit ValidationError(const std::string& what) : ServiceError(422, what) {}
};

// ---------------------------------------------------------------------------
// Event payloads

struct SessionCreated {
  std::string participant_id;
  ConditionId condition = ConditionId::ControlPositive;
  std::uint64_t seed = 0;
  ProtocolConfig protocol;
  bool operator==(const SessionCreated&) const = default;
};

struct RoundStarted {
  game::RoundLayout layout;
  bool operator==(const RoundStarted&) const = default;
};

struct HumanMoved {
  int round = 0;
  game::Direction direction = game::Direction::Up;
  game::Cell to;
  bool operator==(const HumanMoved&) const = default;
};

struct TargetSelected {
  int round = 0;
  game::TargetId target_id = 0;
  Points delta = 0;
  bool operator==(const TargetSelected&) const = default;
};

struct TccDelivered {
  policy::Tcc cue;
  bool operator==(const TccDelivered&) const = default;
};

struct TrustActionSubmitted {
  int round = 0;
  TrustAction action = TrustAction::Discard;
  bool operator==(const TrustActionSubmitted&) const = default;
};

struct RoundRevealed {
  int round = 0;
  int gold = 0;
  int red = 0;
  Points robot_score = 0;
  std::vector<game::PlacedTarget> robot_targets;
  Points team_score_after = 0;
  bool operator==(const RoundRevealed&) const = default;
};

struct ManipulationAnswered {
  int question_id = 0;
  int answer = 0;
  bool correct = false;
  bool operator==(const ManipulationAnswered&) const = default;
};

struct SessionCompleted {
  Points team_score = 0;
  bool operator==(const SessionCompleted&) const = default;
};

using EventPayload =
    std::variant<SessionCreated, RoundStarted, HumanMoved, TargetSelected, TccDelivered,
                 TrustActionSubmitted, RoundRevealed, ManipulationAnswered, SessionCompleted>;

std::string_view event_type(const EventPayload& payload);

struct Event {
  std::string session_id;
  std::uint64_t sequence = 0;  // dense from 1 within a session
  std::int64_t timestamp_ms = 0;
  EventPayload payload;
  bool operator==(const Event&) const = default;
};

// ---------------------------------------------------------------------------
// State folded from the log

enum class Awaiting { Move, Select, TrustAction, Answer, Done };

std::string_view to_string(Awaiting a);

struct RevealRecord {
  int round = 0;
  TrustAction action = TrustAction::Discard;
  int gold = 0;
  int red = 0;
  Points robot_score = 0;
  std::vector<game::PlacedTarget> robot_targets;
  Points team_score_after = 0;
  std::optional<policy::Tcc> tcc;
  bool operator==(const RevealRecord&) const = default;
};

struct SessionState {
  std::string session_id;
  std::string participant_id;
  ConditionId condition = ConditionId::ControlPositive;
  std::uint64_t seed = 0;
  ProtocolConfig protocol;

  game::GameMap map;
  game::Cell human_position;
  int round = 0;
  int steps_left = 0;
  Points team_score = 0;

  // Current round, hidden from the human until the trust action.
  std::optional<game::RobotReport> current_report;
  std::vector<game::TargetId> current_robot_targets;
  std::optional<policy::Tcc> current_cue;
  std::optional<TrustAction> pending_action;

  std::vector<RevealRecord> reveals;
  std::vector<bool> manipulation_results;
  std::vector<int> answered_questions;
  std::optional<int> pending_question;
  bool completed = false;

  std::uint64_t last_sequence = 0;
  std::int64_t created_ms = 0;
  std::int64_t last_timestamp_ms = 0;

  Awaiting awaiting() const;
  game::Agent human() const;
  bool operator==(const SessionState&) const = default;
};

// Applies one event. Throws DomainError when the event cannot follow the
// current state (sequence gap, wrong session, out-of-order protocol step).
void apply(SessionState& state, const Event& event);

SessionState rebuild(std::span<const Event> events);

// ---------------------------------------------------------------------------
// Human-facing projection

struct VisibleTarget {
  game::TargetId id = 0;
  game::Cell position;
  game::TargetKind kind = game::TargetKind::GoldStar;
  bool selected = false;
  bool operator==(const VisibleTarget&) const = default;
};

struct PendingQuestion {
  int id = 0;
  std::string text;
  std::vector<std::string> choices;
  bool operator==(const PendingQuestion&) const = default;
};

// What the participant may see. Never carries the current round's robot
// report; that arrives only in the trust-action response and afterwards.
struct SessionView {
  std::string session_id;
  std::string participant_id;
  ConditionId condition = ConditionId::ControlPositive;
  int round = 0;
  int total_rounds = game::kRoundsPerGame;
  Awaiting awaiting = Awaiting::Move;
  Points team_score = 0;
  int steps_left = 0;
  int width = 0;
  int height = 0;
  game::Cell human_position;
  std::vector<game::Cell> obstacles;
  std::vector<game::Cell> searched_by_human;
  std::vector<game::Cell> searched_by_robot;
  std::vector<VisibleTarget> own_targets;
  std::optional<policy::Tcc> pending_cue;
  std::optional<PendingQuestion> pending_question;
  std::vector<RevealRecord> reveals;
  bool expired = false;
  bool operator==(const SessionView&) const = default;
};

SessionView make_view(const SessionState& state);

struct SessionSummary {
  std::string session_id;
  std::string participant_id;
  ConditionId condition = ConditionId::ControlPositive;
  bool completed = false;
  bool expired = false;
  Points team_score = 0;
  std::vector<RevealRecord> rounds;
  std::vector<bool> manipulation_results;
  bool excluded = false;
  bool operator==(const SessionSummary&) const = default;
};

SessionSummary make_summary(const SessionState& state);

// ---------------------------------------------------------------------------
// Command side: single-writer state machine for one session

class SessionEngine {
 public:
  static SessionEngine create(std::string session_id, std::string participant_id,
                              ConditionId condition, std::uint64_t seed,
                              const ProtocolConfig& protocol, std::int64_t now_ms);
  static SessionEngine replay(std::vector<Event> events);

  const SessionState& state() const { return state_; }
  const std::vector<Event>& events() const { return events_; }

  // Each command validates against the current state, appends the resulting
  // events and returns just those new events.
  std::vector<Event> move(game::Direction direction, std::int64_t now_ms);
  std::vector<Event> select_target(game::TargetId id, std::int64_t now_ms);
  std::vector<Event> answer_manipulation(int question_id, int answer, std::int64_t now_ms);
  std::vector<Event> submit_trust_action(int round, TrustAction action, std::int64_t now_ms);

 private:
  SessionEngine() = default;

  std::vector<Event> commit(std::vector<EventPayload> payloads, std::int64_t now_ms);

  SessionState state_;
  std::vector<Event> events_;
};

// Payloads that open `round`, planned against the map as it stands in `state`.
std::vector<EventPayload> round_start_payloads(const SessionState& state, int round);

}  // namespace trustcal::service

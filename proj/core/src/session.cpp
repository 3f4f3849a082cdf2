#include "trustcal/session.hpp"

#include <algorithm>
#include <string>

#include "trustcal/errors.hpp"

namespace trustcal::service {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void reject(const std::string& what) { throw DomainError("session log: " + what); }

bool round_active(const SessionState& s) { return s.current_report.has_value() && !s.completed; }

bool question_after(const SessionState& s, int round) {
  const auto& rounds = s.protocol.manipulation_after_rounds;
  return std::find(rounds.begin(), rounds.end(), round) != rounds.end();
}

std::optional<int> next_question(const SessionState& s) {
  for (const ManipulationQuestion& q : manipulation_questions()) {
    if (std::find(s.answered_questions.begin(), s.answered_questions.end(), q.id) ==
        s.answered_questions.end()) {
      return q.id;
    }
  }
  return std::nullopt;
}

void discover_human(SessionState& s) { game::discover(s.map, s.human()); }

void apply_payload(SessionState& s, const SessionCreated& e) {
  if (s.last_sequence != 0) reject("SessionCreated must be the first event");
  s.participant_id = e.participant_id;
  s.condition = e.condition;
  s.seed = e.seed;
  s.protocol = e.protocol;
  s.map = game::GameMap::empty(e.protocol.layout.width, e.protocol.layout.height,
                               e.protocol.layout.obstacles);
  s.human_position = e.protocol.layout.human_start;
}

void apply_payload(SessionState& s, const RoundStarted& e) {
  if (s.completed) reject("round started after completion");
  if (s.current_report) reject("round started before the previous round was revealed");
  if (s.pending_question) reject("round started with a manipulation question pending");
  if (e.layout.round_number != s.round + 1) reject("rounds must start in order");
  game::AppliedRound applied = game::apply_layout(s.map, e.layout);
  s.round = e.layout.round_number;
  s.current_report = std::move(applied.report);
  s.current_robot_targets = std::move(applied.robot_targets);
  s.current_cue.reset();
  s.pending_action.reset();
  s.steps_left = s.protocol.step_budget;
  discover_human(s);
}

void apply_payload(SessionState& s, const TccDelivered& e) {
  if (!round_active(s) || e.cue.round_number != s.round) reject("cue outside its round");
  if (s.pending_action) reject("cue delivered after the trust action");
  s.current_cue = e.cue;
}

void apply_payload(SessionState& s, const HumanMoved& e) {
  if (!round_active(s) || e.round != s.round || s.pending_action) reject("move outside a round");
  if (s.steps_left <= 0) reject("move beyond the step budget");
  if (game::step(s.human_position, e.direction) != e.to || !s.map.walkable(e.to)) {
    reject("illegal move");
  }
  s.human_position = e.to;
  s.steps_left -= 1;
  discover_human(s);
}

void apply_payload(SessionState& s, const TargetSelected& e) {
  if (!round_active(s) || e.round != s.round || s.pending_action) {
    reject("selection outside a round");
  }
  const Points delta = game::select_target(s.map, s.human(), e.target_id);
  if (delta != e.delta) reject("selection delta does not match the target");
  s.team_score += delta;
}

void apply_payload(SessionState& s, const TrustActionSubmitted& e) {
  if (!round_active(s) || e.round != s.round) reject("trust action outside its round");
  if (s.pending_action) reject("second trust action in one round");
  s.pending_action = e.action;
}

void apply_payload(SessionState& s, const RoundRevealed& e) {
  if (!s.pending_action || !s.current_report || e.round != s.round) {
    reject("reveal before the trust action");
  }
  const game::RobotReport& report = *s.current_report;
  if (report.gold_found() != e.gold || report.red_found() != e.red ||
      report.score() != e.robot_score) {
    reject("reveal does not match the robot report");
  }
  auto result = game::apply_trust_action(std::move(s.map), report, *s.pending_action, s.team_score);
  if (result.team_score != e.team_score_after) reject("reveal team score mismatch");
  s.map = std::move(result.map);
  s.team_score = result.team_score;
  s.reveals.push_back(RevealRecord{e.round, *s.pending_action, e.gold, e.red, e.robot_score,
                                   e.robot_targets, e.team_score_after, s.current_cue});
  s.current_report.reset();
  s.current_robot_targets.clear();
  s.current_cue.reset();
  s.pending_action.reset();
  s.steps_left = 0;
  if (question_after(s, e.round)) s.pending_question = next_question(s);
}

void apply_payload(SessionState& s, const ManipulationAnswered& e) {
  if (!s.pending_question || *s.pending_question != e.question_id) {
    reject("answer to a question that was not asked");
  }
  s.manipulation_results.push_back(e.correct);
  s.answered_questions.push_back(e.question_id);
  s.pending_question.reset();
}

void apply_payload(SessionState& s, const SessionCompleted& e) {
  if (s.current_report || s.pending_question || s.round != game::kRoundsPerGame) {
    reject("session completed early");
  }
  if (e.team_score != s.team_score) reject("final team score mismatch");
  s.completed = true;
}

const ManipulationQuestion& question_by_id(int id) {
  for (const ManipulationQuestion& q : manipulation_questions()) {
    if (q.id == id) return q;
  }
  throw ValidationError("unknown manipulation question " + std::to_string(id));
}

}  // namespace

std::string_view event_type(const EventPayload& payload) {
  return std::visit(Overloaded{
                        [](const SessionCreated&) { return std::string_view("SessionCreated"); },
                        [](const RoundStarted&) { return std::string_view("RoundStarted"); },
                        [](const HumanMoved&) { return std::string_view("HumanMoved"); },
                        [](const TargetSelected&) { return std::string_view("TargetSelected"); },
                        [](const TccDelivered&) { return std::string_view("TccDelivered"); },
                        [](const TrustActionSubmitted&) {
                          return std::string_view("TrustActionSubmitted");
                        },
                        [](const RoundRevealed&) { return std::string_view("RoundRevealed"); },
                        [](const ManipulationAnswered&) {
                          return std::string_view("ManipulationAnswered");
                        },
                        [](const SessionCompleted&) { return std::string_view("SessionCompleted"); },
                    },
                    payload);
}

std::string_view to_string(Awaiting a) {
  switch (a) {
    case Awaiting::Move: return "move";
    case Awaiting::Select: return "select";
    case Awaiting::TrustAction: return "trust_action";
    case Awaiting::Answer: return "answer";
    case Awaiting::Done: return "done";
  }
  return "done";
}

Awaiting SessionState::awaiting() const {
  if (completed) return Awaiting::Done;
  if (pending_question) return Awaiting::Answer;
  if (!current_report) return Awaiting::Done;
  if (steps_left > 0) return Awaiting::Move;
  for (const game::Target& t : map.targets) {
    if (t.discovered_by == game::Role::Human && !t.selected) return Awaiting::Select;
  }
  return Awaiting::TrustAction;
}

game::Agent SessionState::human() const {
  return {game::Role::Human, human_position, protocol.human_radius};
}

void apply(SessionState& state, const Event& event) {
  if (event.sequence != state.last_sequence + 1) {
    reject("sequence gap: expected " + std::to_string(state.last_sequence + 1) + ", got " +
           std::to_string(event.sequence));
  }
  if (state.last_sequence == 0) {
    state.session_id = event.session_id;
    state.created_ms = event.timestamp_ms;
  } else if (event.session_id != state.session_id) {
    reject("event belongs to another session");
  }
  std::visit([&](const auto& payload) { apply_payload(state, payload); }, event.payload);
  state.last_sequence = event.sequence;
  state.last_timestamp_ms = event.timestamp_ms;
}

SessionState rebuild(std::span<const Event> events) {
  SessionState state;
  for (const Event& e : events) apply(state, e);
  return state;
}

SessionView make_view(const SessionState& s) {
  SessionView v;
  v.session_id = s.session_id;
  v.participant_id = s.participant_id;
  v.condition = s.condition;
  v.round = s.round;
  v.awaiting = s.awaiting();
  v.team_score = s.team_score;
  v.steps_left = s.steps_left;
  v.width = s.map.width;
  v.height = s.map.height;
  v.human_position = s.human_position;
  v.obstacles.assign(s.map.obstacles.begin(), s.map.obstacles.end());
  v.searched_by_human.assign(s.map.searched_by_human.begin(), s.map.searched_by_human.end());
  v.searched_by_robot.assign(s.map.searched_by_robot.begin(), s.map.searched_by_robot.end());
  for (game::TargetId i = 0; i < s.map.targets.size(); ++i) {
    const game::Target& t = s.map.targets[i];
    if (t.discovered_by == game::Role::Human) v.own_targets.push_back({i, t.position, t.kind, t.selected});
  }
  if (round_active(s)) v.pending_cue = s.current_cue;
  if (s.pending_question) {
    const ManipulationQuestion& q = question_by_id(*s.pending_question);
    v.pending_question = PendingQuestion{q.id, q.text, q.choices};
  }
  v.reveals = s.reveals;
  return v;
}

SessionSummary make_summary(const SessionState& s) {
  SessionSummary m;
  m.session_id = s.session_id;
  m.participant_id = s.participant_id;
  m.condition = s.condition;
  m.completed = s.completed;
  m.team_score = s.team_score;
  m.rounds = s.reveals;
  m.manipulation_results = s.manipulation_results;
  m.excluded = excluded_by_manipulation(s.manipulation_results);
  return m;
}

std::vector<EventPayload> round_start_payloads(const SessionState& state, int round) {
  const Condition condition = Condition::standard(state.condition);
  const game::ScheduleRow& row = condition.schedule.row(round);
  std::vector<EventPayload> out;
  out.push_back(RoundStarted{game::plan_round(state.map, round, row.gold, row.red,
                                              state.protocol.layout,
                                              derive_seed(state.seed, static_cast<std::uint64_t>(round)))});
  if (condition.cue_planned(round)) {
    const CueKind kind = *condition.cue_kind;
    out.push_back(TccDelivered{policy::Tcc{kind, state.protocol.catalog.text_for(kind, round), round}});
  }
  return out;
}

SessionEngine SessionEngine::create(std::string session_id, std::string participant_id,
                                    ConditionId condition, std::uint64_t seed,
                                    const ProtocolConfig& protocol, std::int64_t now_ms) {
  protocol.validate();
  SessionEngine engine;
  engine.state_.session_id = session_id;
  engine.commit({SessionCreated{std::move(participant_id), condition, seed, protocol}}, now_ms);
  engine.commit(round_start_payloads(engine.state_, 1), now_ms);
  return engine;
}

SessionEngine SessionEngine::replay(std::vector<Event> events) {
  SessionEngine engine;
  engine.state_ = rebuild(events);
  engine.events_ = std::move(events);
  return engine;
}

std::vector<Event> SessionEngine::commit(std::vector<EventPayload> payloads, std::int64_t now_ms) {
  std::vector<Event> out;
  out.reserve(payloads.size());
  for (EventPayload& payload : payloads) {
    Event e{state_.session_id, state_.last_sequence + 1, now_ms, std::move(payload)};
    apply(state_, e);
    events_.push_back(e);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Event> SessionEngine::move(game::Direction direction, std::int64_t now_ms) {
  if (state_.awaiting() != Awaiting::Move) {
    throw Conflict("cannot move now (awaiting " + std::string(to_string(state_.awaiting())) + ")");
  }
  const game::Cell to = game::step(state_.human_position, direction);
  if (!state_.map.walkable(to)) throw ValidationError("move blocked by a wall or the map edge");
  return commit({HumanMoved{state_.round, direction, to}}, now_ms);
}

std::vector<Event> SessionEngine::select_target(game::TargetId id, std::int64_t now_ms) {
  const Awaiting awaiting = state_.awaiting();
  if (awaiting == Awaiting::Done || awaiting == Awaiting::Answer) {
    throw Conflict("cannot select a target now");
  }
  const auto& targets = state_.map.targets;
  if (id >= targets.size() || targets[id].discovered_by != game::Role::Human) {
    throw ValidationError("target " + std::to_string(id) + " has not been discovered by you");
  }
  if (targets[id].selected) throw Conflict("target " + std::to_string(id) + " already selected");
  return commit({TargetSelected{state_.round, id, targets[id].value}}, now_ms);
}

std::vector<Event> SessionEngine::answer_manipulation(int question_id, int answer,
                                                      std::int64_t now_ms) {
  if (!state_.pending_question) throw Conflict("no manipulation question is pending");
  if (*state_.pending_question != question_id) {
    throw Conflict("question " + std::to_string(question_id) + " is not the pending question");
  }
  const ManipulationQuestion& q = question_by_id(question_id);
  if (answer < 0 || answer >= static_cast<int>(q.choices.size())) {
    throw ValidationError("answer index out of range");
  }
  std::vector<Event> out = commit({ManipulationAnswered{question_id, answer, answer == q.correct}}, now_ms);
  std::vector<EventPayload> next;
  if (state_.round >= game::kRoundsPerGame) {
    next.push_back(SessionCompleted{state_.team_score});
  } else {
    next = round_start_payloads(state_, state_.round + 1);
  }
  for (Event& e : commit(std::move(next), now_ms)) out.push_back(std::move(e));
  return out;
}

std::vector<Event> SessionEngine::submit_trust_action(int round, TrustAction action,
                                                      std::int64_t now_ms) {
  if (state_.completed) throw Conflict("session already completed");
  if (state_.pending_question) throw Conflict("answer the pending question first");
  if (round != state_.round || !state_.current_report) {
    throw Conflict("trust action for round " + std::to_string(round) + " is out of order (current round " +
                   std::to_string(state_.round) + ")");
  }
  if (state_.pending_action) throw Conflict("trust action already submitted for this round");

  const game::RobotReport& report = *state_.current_report;
  RoundRevealed reveal;
  reveal.round = round;
  reveal.gold = report.gold_found();
  reveal.red = report.red_found();
  reveal.robot_score = report.score();
  for (game::TargetId id : state_.current_robot_targets) {
    const game::Target& t = state_.map.targets[id];
    reveal.robot_targets.push_back({t.position, t.kind});
  }
  reveal.team_score_after =
      state_.team_score + (action == TrustAction::Integrate ? report.score() : 0);

  std::vector<Event> out = commit({TrustActionSubmitted{round, action}, std::move(reveal)}, now_ms);
  if (state_.pending_question) return out;

  std::vector<EventPayload> next;
  if (round >= game::kRoundsPerGame) {
    next.push_back(SessionCompleted{state_.team_score});
  } else {
    next = round_start_payloads(state_, round + 1);
  }
  for (Event& e : commit(std::move(next), now_ms)) out.push_back(std::move(e));
  return out;
}

}  // namespace trustcal::service

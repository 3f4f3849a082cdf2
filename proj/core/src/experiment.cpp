#include "trustcal/experiment.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <thread>

#include <json.hpp>

#include "trustcal/errors.hpp"

namespace trustcal::experiment {

using nlohmann::json;
using service::Event;

Session session_from_log(std::span<const Event> events) {
  Session s;
  std::map<int, RoundRecord> rounds;
  std::map<int, TrustAction> actions;
  for (const Event& e : events) {
    if (s.session_id.empty()) s.session_id = e.session_id;
    if (const auto* c = std::get_if<service::SessionCreated>(&e.payload)) {
      s.participant_id = c->participant_id;
      s.condition = c->condition;
    } else if (const auto* r = std::get_if<service::RoundStarted>(&e.payload)) {
      int gold = 0;
      int red = 0;
      for (const auto& t : r->layout.robot_targets) {
        (t.kind == game::TargetKind::GoldStar ? gold : red) += 1;
      }
      RoundRecord rec;
      rec.round_number = r->layout.round_number;
      rec.report = game::RobotReport(rec.round_number, gold, red, r->layout.robot_cells);
      rounds.insert_or_assign(rec.round_number, std::move(rec));
    } else if (const auto* t = std::get_if<service::TccDelivered>(&e.payload)) {
      if (auto it = rounds.find(t->cue.round_number); it != rounds.end()) it->second.tcc = t->cue;
    } else if (const auto* a = std::get_if<service::TrustActionSubmitted>(&e.payload)) {
      actions[a->round] = a->action;
    } else if (const auto* v = std::get_if<service::RoundRevealed>(&e.payload)) {
      auto it = rounds.find(v->round);
      if (it == rounds.end()) continue;
      RoundRecord& rec = it->second;
      auto act = actions.find(v->round);
      rec.action_before_reveal = act != actions.end();
      rec.trust_action = rec.action_before_reveal ? act->second : TrustAction::Discard;
      rec.team_score_after = v->team_score_after;
      s.rounds.push_back(rec);
    } else if (const auto* q = std::get_if<service::ManipulationAnswered>(&e.payload)) {
      s.manipulation_results.push_back(q->correct);
    } else if (std::holds_alternative<service::SessionCompleted>(e.payload)) {
      s.complete = true;
    }
  }
  return s;
}

std::vector<Session> load_sessions(const service::EventStore& store) {
  std::vector<Session> out;
  for (const std::string& id : store.list()) {
    const std::vector<Event> events = store.load(id);
    out.push_back(session_from_log(events));
  }
  return out;
}

namespace {

// Scripted in-round play for a synthetic participant: a seeded random walk
// that picks up every gold star it finds and leaves red circles alone.
class SimPlayer {
 public:
  SimPlayer(sim::SimHumanParams params, double manipulation_fail_prob)
      : params_(params),
        mind_(sim::make_state(params)),
        walk_rng_(derive_seed(params.seed, 0x5157)),
        fail_prob_(manipulation_fail_prob) {}

  void play(service::SessionEngine& engine) {
    std::int64_t clock = 0;
    auto now = [&] { return clock += 1000; };
    int cue_round = 0;

    while (engine.state().awaiting() != service::Awaiting::Done) {
      const service::SessionState& st = engine.state();
      if (st.awaiting() == service::Awaiting::Answer) {
        answer(engine, now());
        continue;
      }
      if (cue_round != st.round) {
        cue_round = st.round;
        mind_ = st.current_cue ? sim::receive_tcc(mind_, st.current_cue->kind, params_)
                               : sim::note_no_cue(mind_);
      }
      pick_gold(engine, now);
      if (engine.state().awaiting() == service::Awaiting::Move) {
        engine.move(random_direction(engine.state()), now());
        continue;
      }
      const int round = engine.state().round;
      const TrustAction action = sim::decide(mind_, params_);
      engine.submit_trust_action(round, action, now());
      mind_ = sim::observe_outcome(mind_, engine.state().reveals.back().robot_score, params_);
    }
  }

 private:
  template <typename Now>
  void pick_gold(service::SessionEngine& engine, Now& now) {
    const auto& targets = engine.state().map.targets;
    for (game::TargetId id = 0; id < targets.size(); ++id) {
      const game::Target& t = engine.state().map.targets[id];
      if (t.discovered_by == game::Role::Human && !t.selected && t.kind == game::TargetKind::GoldStar) {
        engine.select_target(id, now());
      }
    }
  }

  game::Direction random_direction(const service::SessionState& st) {
    std::vector<game::Direction> legal;
    for (game::Direction d : {game::Direction::Up, game::Direction::Down, game::Direction::Left,
                              game::Direction::Right}) {
      if (st.map.walkable(game::step(st.human_position, d))) legal.push_back(d);
    }
    std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
    return legal[pick(walk_rng_)];
  }

  void answer(service::SessionEngine& engine, std::int64_t now) {
    const int qid = *engine.state().pending_question;
    const ManipulationQuestion* question = nullptr;
    for (const auto& q : manipulation_questions()) {
      if (q.id == qid) question = &q;
    }
    std::bernoulli_distribution fail(fail_prob_);
    int choice = question->correct;
    if (fail(walk_rng_)) choice = (question->correct + 1) % static_cast<int>(question->choices.size());
    engine.answer_manipulation(qid, choice, now);
  }

  sim::SimHumanParams params_;
  sim::SimHumanState mind_;
  std::mt19937_64 walk_rng_;
  double fail_prob_;
};

}  // namespace

RunResult run_condition(const Condition& condition, const sim::PopulationSpec& population,
                        const ProtocolConfig& protocol, unsigned threads) {
  condition.validate();
  protocol.validate();
  const std::size_t n = population.count;
  RunResult result;
  result.sessions.resize(n);
  result.logs.resize(n);
  if (n == 0) return result;

  auto run_one = [&](std::size_t i) {
    const sim::SimHumanParams params = sim::participant_params(population, i);
    char pid[32];
    std::snprintf(pid, sizeof pid, "sim-%05zu", i);
    const std::string session_id = std::string(to_string(condition.id)) + "-" + pid;
    auto engine = service::SessionEngine::create(session_id, pid, condition.id,
                                                 derive_seed(params.seed, 0xC0DE), protocol, 0);
    SimPlayer player(params, population.preset.manipulation_fail_prob);
    player.play(engine);
    result.sessions[i] = session_from_log(engine.events());
    result.logs[i] = engine.events();
  };

  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) run_one(i);
      });
    }
  }
  return result;
}

std::vector<Session> apply_exclusions(std::vector<Session> sessions) {
  for (Session& s : sessions) s.excluded = excluded_by_manipulation(s.manipulation_results);
  return sessions;
}

bool counts_toward_curves(const Session& session) { return session.complete && !session.excluded; }

CurvePoint trust_percentage(std::span<const Session> sessions, int round_number) {
  CurvePoint p;
  p.round_number = round_number;
  for (const Session& s : sessions) {
    if (!counts_toward_curves(s)) continue;
    for (const RoundRecord& r : s.rounds) {
      if (r.round_number != round_number) continue;
      ++p.total;
      if (r.trust_action == TrustAction::Integrate) ++p.integrated;
    }
  }
  if (p.total == 0) {
    throw DomainError("no retained sessions reached round " + std::to_string(round_number));
  }
  p.percentage = static_cast<double>(p.integrated) / static_cast<double>(p.total);
  return p;
}

TrustCurve trust_curve(std::string condition, std::span<const Session> sessions) {
  TrustCurve curve{std::move(condition), {}};
  for (int r = 1; r <= game::kRoundsPerGame; ++r) {
    const bool any = std::any_of(sessions.begin(), sessions.end(), [&](const Session& s) {
      return counts_toward_curves(s) &&
             std::any_of(s.rounds.begin(), s.rounds.end(),
                         [&](const RoundRecord& rec) { return rec.round_number == r; });
    });
    if (any) curve.points.push_back(trust_percentage(sessions, r));
  }
  return curve;
}

std::vector<trust::TrustObservation> trajectory_of(const Session& session) {
  std::vector<trust::TrustObservation> out;
  for (const RoundRecord& r : session.rounds) {
    trust::TrustObservation obs;
    obs.round_number = r.round_number;
    obs.outcome = trust::outcome_from_score(r.report.score());
    if (r.tcc) obs.tcc = r.tcc->kind;
    obs.action = r.trust_action;
    out.push_back(obs);
  }
  return out;
}

void validate_log(std::span<const Event> events, ReplayReport& report) {
  ++report.sessions_checked;
  const std::string id = events.empty() ? std::string("<empty>") : events.front().session_id;
  auto issue = [&](int round, std::string message) {
    report.issues.push_back({id, round, std::move(message)});
  };
  if (events.empty()) {
    issue(0, "empty log");
    return;
  }
  const auto* created = std::get_if<service::SessionCreated>(&events.front().payload);
  if (!created) {
    issue(0, "log does not start with SessionCreated");
    return;
  }
  const Condition condition = Condition::standard(created->condition);

  std::vector<game::TargetKind> kinds;  // by target id, in placement order
  std::map<int, TrustAction> actions;
  Points human_total = 0;
  Points integrated_total = 0;
  int current_round = 0;
  bool completed = false;

  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.sequence != i + 1) issue(current_round, "sequence gap at position " + std::to_string(i));
    if (e.session_id != id) issue(current_round, "foreign session id in log");
    if (completed) issue(current_round, "event after SessionCompleted");

    if (const auto* r = std::get_if<service::RoundStarted>(&e.payload)) {
      current_round = r->layout.round_number;
      int gold = 0;
      int red = 0;
      for (const auto& t : r->layout.robot_targets) {
        kinds.push_back(t.kind);
        (t.kind == game::TargetKind::GoldStar ? gold : red) += 1;
      }
      for (const auto& t : r->layout.human_targets) kinds.push_back(t.kind);
      const game::ScheduleRow& row = condition.schedule.row(current_round);
      if (gold != row.gold || red != row.red) issue(current_round, "robot targets differ from schedule");
    } else if (const auto* sel = std::get_if<service::TargetSelected>(&e.payload)) {
      if (sel->target_id >= kinds.size()) {
        issue(sel->round, "selection of an unknown target");
        continue;
      }
      const Points expected = kinds[sel->target_id] == game::TargetKind::GoldStar ? 100 : -100;
      if (sel->delta != expected) issue(sel->round, "selection delta does not match target kind");
      human_total += expected;
    } else if (const auto* t = std::get_if<service::TccDelivered>(&e.payload)) {
      if (!condition.cue_planned(t->cue.round_number) || t->cue.kind != condition.cue_kind) {
        issue(t->cue.round_number, "cue not in the condition's plan");
      }
    } else if (const auto* a = std::get_if<service::TrustActionSubmitted>(&e.payload)) {
      if (!actions.emplace(a->round, a->action).second) issue(a->round, "second trust action");
    } else if (const auto* v = std::get_if<service::RoundRevealed>(&e.payload)) {
      ++report.rounds_checked;
      auto act = actions.find(v->round);
      if (act == actions.end()) {
        issue(v->round, "reveal before trust action");
        continue;
      }
      const game::ScheduleRow& row = condition.schedule.row(v->round);
      if (v->robot_score != row.score || v->gold != row.gold || v->red != row.red) {
        issue(v->round, "revealed robot report differs from schedule");
      }
      if (act->second == TrustAction::Integrate) integrated_total += row.score;
      if (v->team_score_after != human_total + integrated_total) {
        issue(v->round, "team score " + std::to_string(v->team_score_after) + " != replay " +
                            std::to_string(human_total + integrated_total));
      }
    } else if (const auto* done = std::get_if<service::SessionCompleted>(&e.payload)) {
      completed = true;
      if (done->team_score != human_total + integrated_total) {
        issue(current_round, "final team score differs from replay");
      }
    }
  }
  if (condition.cue_kind) {
    // Every planned cue round that was played must have delivered its cue.
    for (int r : condition.tcc_rounds()) {
      if (r > current_round) break;
      const bool delivered = std::any_of(events.begin(), events.end(), [&](const Event& e) {
        const auto* t = std::get_if<service::TccDelivered>(&e.payload);
        return t && t->cue.round_number == r;
      });
      if (!delivered) issue(r, "planned cue missing");
    }
  }
}

std::string to_json(const ReplayReport& report) {
  json issues = json::array();
  for (const ReplayIssue& i : report.issues) {
    issues.push_back({{"session_id", i.session_id}, {"round", i.round}, {"message", i.message}});
  }
  return json{{"ok", report.ok()},
              {"sessions_checked", report.sessions_checked},
              {"rounds_checked", report.rounds_checked},
              {"issues", issues}}
      .dump(2);
}

std::string to_json(const Session& session) {
  json rounds = json::array();
  for (const RoundRecord& r : session.rounds) {
    rounds.push_back({{"round", r.round_number},
                      {"gold", r.report.gold_found()},
                      {"red", r.report.red_found()},
                      {"robot_score", r.report.score()},
                      {"tcc", r.tcc ? json(to_string(r.tcc->kind)) : json(nullptr)},
                      {"action", to_string(r.trust_action)},
                      {"team_score_after", r.team_score_after}});
  }
  return json{{"session_id", session.session_id},
              {"participant_id", session.participant_id},
              {"condition", to_string(session.condition)},
              {"complete", session.complete},
              {"excluded", session.excluded},
              {"manipulation_results", session.manipulation_results},
              {"rounds", rounds}}
      .dump();
}

}  // namespace trustcal::experiment

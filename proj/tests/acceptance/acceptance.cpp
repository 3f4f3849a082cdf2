// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include "trustcal/errors.hpp"
#include "trustcal/event_log.hpp"
#include "trustcal/experiment.hpp"
#include "trustcal/fit.hpp"
#include "trustcal/http_api.hpp"
#include "trustcal/policy.hpp"
#include "trustcal/schedule.hpp"
#include "trustcal/session_service.hpp"
#include "trustcal/sim_human.hpp"
#include "trustcal/trust_model.hpp"

using namespace trustcal;
using nlohmann::json;

namespace {

// Tolerances.
constexpr double kAlgebraTol = 1e-12;
constexpr double kFitHeldOutRmse = 0.05;
constexpr double kCueShiftMin = 20.0;   // percentage points
constexpr double kCueShiftMax = 30.0;   // 20-point target plus the 10-point band
constexpr double kDecayRatio = 0.25;

struct Result {
  bool pass = true;
  std::string detail;
};

struct Check {
  Result* out;
  void operator()(bool ok, const std::string& what) {
    if (!ok && out->pass) {
      out->pass = false;
      out->detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------------

Result schedule_fidelity() {
  Result o;
  Check check{&o};
  struct Row { int round, gold, red; Points score; };
  const Row negative[] = {{1, 2, 3, -100}, {2, 1, 4, -300}, {3, 1, 2, -100}, {4, 2, 3, -100},
                          {5, 0, 2, -200}, {6, 0, 1, -100}, {7, 0, 1, -100}, {8, 0, 2, -200},
                          {9, 2, 3, -100}, {10, 1, 2, -100}};
  const Row positive[] = {{1, 3, 2, 100}, {2, 1, 0, 100}, {3, 2, 0, 200}, {4, 4, 1, 300},
                          {5, 4, 0, 400}, {6, 4, 3, 100}, {7, 1, 0, 100}, {8, 2, 0, 200},
                          {9, 3, 2, 100}, {10, 4, 3, 100}};

  // Play every condition through the engine, integrating each round, and
  // compare what the reveals show against the tabulated rows.
  int matched = 0;
  for (ConditionId id : kAllConditions) {
    const bool pos = id == ConditionId::ControlPositive || id == ConditionId::TccPositive;
    const Row* table = pos ? positive : negative;
    auto engine = service::SessionEngine::create("ac1", "p", id, 17, ProtocolConfig{}, 0);
    std::int64_t now = 0;
    Points running = 0;
    for (int r = 1; r <= 10; ++r) {
      engine.submit_trust_action(r, TrustAction::Integrate, ++now);
      if (const auto& q = engine.state().pending_question) {
        engine.answer_manipulation(*q, manipulation_questions()[static_cast<std::size_t>(*q - 1)].correct, ++now);
      }
      const service::RevealRecord& rev = engine.state().reveals.back();
      const Row& row = table[r - 1];
      running += row.score;
      const bool ok = rev.round == row.round && rev.gold == row.gold && rev.red == row.red &&
                      rev.robot_score == row.score && game::round_score(row.gold, row.red) == row.score &&
                      rev.team_score_after == running &&
                      static_cast<int>(rev.robot_targets.size()) == row.gold + row.red;
      check(ok, std::string(to_string(id)) + " round " + std::to_string(r) + " differs");
      if (ok && (id == ConditionId::ControlNegative || id == ConditionId::ControlPositive)) ++matched;
    }
  }
  check(matched == 20, "matched " + std::to_string(matched) + "/20 rows");
  for (int i = 0; i < 10; ++i) {
    const auto& n = game::all_negative_schedule().rows[static_cast<std::size_t>(i)];
    const auto& p = game::all_positive_schedule().rows[static_cast<std::size_t>(i)];
    check(n.gold == negative[i].gold && n.red == negative[i].red && n.score == negative[i].score,
          "built-in negative schedule row " + std::to_string(i + 1));
    check(p.gold == positive[i].gold && p.red == positive[i].red && p.score == positive[i].score,
          "built-in positive schedule row " + std::to_string(i + 1));
  }
  if (o.pass) o.detail = "20/20 rows exact";
  return o;
}

// ---------------------------------------------------------------------------

Result trust_algebra() {
  Result o;
  Check check{&o};
  std::mt19937_64 rng(0xA1);
  std::uniform_real_distribution<double> prior(0.1, 10.0);
  std::uniform_real_distribution<double> weight(0.0, 5.0);
  std::uniform_int_distribution<int> length(1, 60);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution zero_weight(0.1);
  double worst = 0.0;

  for (int trial = 0; trial < 10000 && o.pass; ++trial) {
    trust::TrustParams p;
    p.alpha0 = prior(rng);
    p.beta0 = prior(rng);
    p.w_s = zero_weight(rng) ? 0.0 : weight(rng);
    p.w_f = zero_weight(rng) ? 0.0 : weight(rng);
    trust::TrustState s = trust::init(p);
    int succ = 0;
    int fail = 0;
    const int n = length(rng);
    for (int i = 0; i < n; ++i) {
      const bool success = coin(rng);
      const double before = trust::mean_trust(s);
      s = trust::update(s, success ? trust::Outcome::Success : trust::Outcome::Failure, p);
      (success ? succ : fail) += 1;
      const double a = p.alpha0 + p.w_s * succ;
      const double b = p.beta0 + p.w_f * fail;
      const double err = std::max(std::abs(s.alpha - a) / a, std::abs(s.beta - b) / b);
      worst = std::max(worst, err);
      check(err <= kAlgebraTol, "closed form mismatch " + std::to_string(err));
      const double m = trust::mean_trust(s);
      check(m > 0.0 && m < 1.0, "mean_trust outside (0,1)");
      if (success && p.w_s > 0.0) check(m > before, "success did not raise trust");
      if (!success && p.w_f > 0.0) check(m < before, "failure did not lower trust");
      if (success) check(m >= before, "success lowered trust");
      if (!success) check(m <= before, "failure raised trust");
    }
  }
  if (o.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "10000 strings, worst relative error %.2e", worst);
    o.detail = buf;
  }
  return o;
}

// ---------------------------------------------------------------------------

Result fit_recovery() {
  Result o;
  const trust::TrustParams truth{2.0, 1.0, 1.5, 1.0, 0.0, 0.0, 0.5};
  std::mt19937_64 rng(20261015);
  std::bernoulli_distribution robot(0.75);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  std::vector<trust::TrustObservation> all;
  std::vector<double> true_trust;
  trust::TrustState s = trust::init(truth);
  for (int i = 1; i <= 200; ++i) {
    trust::TrustObservation obs;
    obs.round_number = i;
    obs.outcome = robot(rng) ? trust::Outcome::Success : trust::Outcome::Failure;
    const double t = trust::mean_trust(s);
    true_trust.push_back(t);
    obs.action = u(rng) < t ? TrustAction::Integrate : TrustAction::Discard;
    s = trust::update(s, obs.outcome, truth);
    all.push_back(obs);
  }

  const auto fitted = trust::fit(std::span(all).first(100), trust::FitConfig{});
  const auto predicted = trust::predict_trajectory(all, fitted.params);
  double sum = 0.0;
  for (std::size_t i = 100; i < 200; ++i) {
    const double e = predicted[i] - true_trust[i];
    sum += e * e;
  }
  const double held_out = std::sqrt(sum / 100.0);
  o.pass = held_out <= kFitHeldOutRmse;
  char buf[160];
  std::snprintf(buf, sizeof buf, "held-out RMSE %.4f (limit %.2f); fitted a0=%.3f b0=%.3f ws=%.3f wf=%.3f",
                held_out, kFitHeldOutRmse, fitted.params.alpha0, fitted.params.beta0, fitted.params.w_s,
                fitted.params.w_f);
  o.detail = buf;
  return o;
}

// ---------------------------------------------------------------------------

// Mean round-4 minus round-3 integrate rate, in percentage points.
double cue_shift_points(ConditionId id, int seeds) {
  double total = 0.0;
  for (int seed = 1; seed <= seeds; ++seed) {
    sim::PopulationSpec spec;
    spec.count = 30;
    spec.master_seed = static_cast<std::uint64_t>(seed);
    const auto result = experiment::run_condition(Condition::standard(id), spec);
    const auto kept = experiment::apply_exclusions(result.sessions);
    const double r3 = experiment::trust_percentage(kept, 3).percentage;
    const double r4 = experiment::trust_percentage(kept, 4).percentage;
    total += 100.0 * (r4 - r3);
  }
  return total / seeds;
}

Result cue_direction() {
  Result o;
  Check check{&o};
  const double tcc_pos = cue_shift_points(ConditionId::TccPositive, 10);
  const double tcc_neg = cue_shift_points(ConditionId::TccNegative, 10);
  const double ctl_pos = cue_shift_points(ConditionId::ControlPositive, 10);
  const double ctl_neg = cue_shift_points(ConditionId::ControlNegative, 10);
  check(-tcc_pos >= kCueShiftMin && -tcc_pos <= kCueShiftMax, "tcc-positive drop outside band");
  check(tcc_neg >= kCueShiftMin && tcc_neg <= kCueShiftMax, "tcc-negative rise outside band");
  // Controls must not move against the sign of the robot's performance.
  check(ctl_pos >= 0.0, "control-positive fell");
  check(ctl_neg <= 0.0, "control-negative rose");
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "round 3->4: tcc-positive %+.1f, tcc-negative %+.1f, control-positive %+.1f, "
                "control-negative %+.1f points",
                tcc_pos, tcc_neg, ctl_pos, ctl_neg);
  o.detail = o.pass ? buf : o.detail + "; " + buf;
  return o;
}

// ---------------------------------------------------------------------------

Result cue_decay() {
  Result o;
  Check check{&o};
  // Simulated participant: tau shift of each consecutive cue, measured away
  // from the clamps.
  const sim::SimHumanParams params = sim::calibrated_preset().params;
  sim::SimHumanState s = sim::make_state(params);
  s.tau = 0.2;
  std::vector<double> effects;
  for (int i = 0; i < 3; ++i) {
    const double before = s.tau;
    s = sim::receive_tcc(s, CueKind::Repair, params);
    effects.push_back(s.tau - before);
  }
  check(params.decay == 0.5, "preset decay is not 0.5");
  check(effects[2] <= kDecayRatio * effects[0] + 1e-15, "third sim cue exceeds a quarter of the first");
  check(sim::cue_shift(params, 2) == kDecayRatio * sim::cue_shift(params, 0), "sim cue_shift not exact");

  // Trust model: pseudo-evidence added by consecutive cues.
  trust::TrustParams tp;
  tp.w_dampen = 2.0;
  tp.tcc_decay = 0.5;
  trust::TrustState t = trust::init(tp);
  std::vector<double> added;
  for (int i = 0; i < 3; ++i) {
    const double before = t.beta;
    t = trust::apply_tcc(t, CueKind::Dampen, tp);
    added.push_back(t.beta - before);
  }
  check(added[0] == 2.0 && added[1] == 1.0 && added[2] == 0.5, "model cue evidence not 2, 1, 0.5");
  char buf[128];
  std::snprintf(buf, sizeof buf, "third/first = %.4f (sim), %.4f (model)", effects[2] / effects[0],
                added[2] / added[0]);
  if (o.pass) o.detail = buf;
  return o;
}

// ---------------------------------------------------------------------------

Result exclusion_rule() {
  Result o;
  Check check{&o};
  for (int fails = 0; fails <= 3; ++fails) {
    std::vector<bool> results(3, true);
    for (int i = 0; i < fails; ++i) results[static_cast<std::size_t>(i)] = false;
    check(excluded_by_manipulation(results) == (fails >= 2), "boundary at " + std::to_string(fails));
  }

  std::mt19937_64 rng(0xE6);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution fail(0.35);
  std::bernoulli_distribution incomplete(0.1);
  int sets = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<experiment::Session> sessions;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      experiment::Session s;
      s.complete = !incomplete(rng);
      s.manipulation_results = {!fail(rng), !fail(rng), !fail(rng)};
      const int rounds = s.complete ? 10 : static_cast<int>(rng() % 10);
      for (int r = 1; r <= rounds; ++r) {
        experiment::RoundRecord rec;
        rec.round_number = r;
        rec.trust_action = coin(rng) ? TrustAction::Integrate : TrustAction::Discard;
        s.rounds.push_back(rec);
      }
      sessions.push_back(std::move(s));
    }
    sessions = experiment::apply_exclusions(std::move(sessions));
    for (int r = 1; r <= 10; ++r) {
      int num = 0;
      int den = 0;
      for (const auto& s : sessions) {
        const int failed = static_cast<int>(std::count(s.manipulation_results.begin(),
                                                       s.manipulation_results.end(), false));
        if (failed >= 2 || !s.complete) continue;
        ++den;
        if (s.rounds[static_cast<std::size_t>(r - 1)].trust_action == TrustAction::Integrate) ++num;
      }
      if (den == 0) {
        bool threw = false;
        try {
          experiment::trust_percentage(sessions, r);
        } catch (const DomainError&) {
          threw = true;
        }
        check(threw, "empty denominator did not raise");
        continue;
      }
      const auto p = experiment::trust_percentage(sessions, r);
      check(p.integrated == num && p.total == den &&
                p.percentage == static_cast<double>(num) / static_cast<double>(den),
            "recount mismatch in round " + std::to_string(r));
    }
    ++sets;
  }

  // Same rule end to end: simulated participants who often fail checks,
  // recounted from the raw log events.
  sim::PopulationSpec spec;
  spec.count = 60;
  spec.master_seed = 77;
  spec.preset.manipulation_fail_prob = 0.5;
  const auto run = experiment::run_condition(Condition::standard(ConditionId::TccNegative), spec);
  const auto kept = experiment::apply_exclusions(run.sessions);
  int excluded = 0;
  for (int r = 1; r <= 10; ++r) {
    int num = 0;
    int den = 0;
    for (const auto& log : run.logs) {
      int failed = 0;
      std::optional<TrustAction> action;
      for (const auto& e : log) {
        if (const auto* a = std::get_if<service::ManipulationAnswered>(&e.payload)) failed += !a->correct;
        if (const auto* t = std::get_if<service::TrustActionSubmitted>(&e.payload); t && t->round == r) {
          action = t->action;
        }
      }
      if (r == 1 && failed >= 2) ++excluded;
      if (failed >= 2 || !action) continue;
      ++den;
      num += *action == TrustAction::Integrate;
    }
    const auto p = experiment::trust_percentage(kept, r);
    check(p.integrated == num && p.total == den, "pipeline recount mismatch in round " + std::to_string(r));
  }
  check(excluded > 0 && excluded < 60, "pipeline run did not exercise exclusion");
  if (o.pass) {
    o.detail = std::to_string(sets) + " random sets recounted; pipeline excluded " +
               std::to_string(excluded) + "/60";
  }
  return o;
}

// ---------------------------------------------------------------------------

policy::Classification classify_oracle(double t, double a, double eps) {
  if (t - a > eps) return policy::Classification::OverTrust;
  if (a - t > eps) return policy::Classification::UnderTrust;
  return policy::Classification::Calibrated;
}

Result policy_correctness() {
  Result o;
  Check check{&o};
  using policy::Classification;
  check(policy::classify(0.9, 0.4, 0.05).classification == Classification::OverTrust, "(0.9,0.4)");
  check(policy::classify(0.3, 0.8, 0.05).classification == Classification::UnderTrust, "(0.3,0.8)");
  check(policy::classify(0.5, 0.5, 0.05).classification == Classification::Calibrated, "(0.5,0.5)");
  for (int i = 0; i <= 100; ++i) {
    const double p = i / 100.0;
    check(policy::classify(p, p, 0.0).classification == Classification::Calibrated, "classify(p,p,0)");
  }

  {
    policy::PolicyConfig c;
    c.delta = 0.4;
    c.streak = 3;
    const std::vector<double> pred{0.8, 0.85, 0.9};
    const std::vector<TrustAction> obs(3, TrustAction::Discard);
    check(policy::respect_or_calibrate(pred, obs, 0.5, c).action == policy::PolicyAction::Respect,
          "three divergent rounds should be respected");
    const std::vector<double> one{0.8};
    const std::vector<TrustAction> integ{TrustAction::Integrate};
    check(policy::respect_or_calibrate(one, integ, 0.5, c).action != policy::PolicyAction::Respect,
          "single consistent round respected");
    check(policy::respect_or_calibrate(std::span(pred).first(2), std::span(obs).first(2), 0.5, c).action !=
              policy::PolicyAction::Respect,
          "unmet streak respected");
  }

  // Exhaustive: every action string of length 1..6, paired with every
  // outcome string of the same length driving the default trust model.
  const trust::TrustParams model;
  std::size_t cases = 0;
  for (int len = 1; len <= 6; ++len) {
    for (unsigned outcomes = 0; outcomes < (1u << len); ++outcomes) {
      std::vector<trust::TrustObservation> traj;
      for (int i = 0; i < len; ++i) {
        traj.push_back({i + 1, (outcomes >> i) & 1u ? trust::Outcome::Success : trust::Outcome::Failure,
                        std::nullopt, TrustAction::Discard});
      }
      const auto predicted = trust::predict_trajectory(traj, model);
      for (unsigned acts = 0; acts < (1u << len); ++acts) {
        std::vector<TrustAction> observed;
        for (int i = 0; i < len; ++i) {
          observed.push_back((acts >> i) & 1u ? TrustAction::Integrate : TrustAction::Discard);
        }
        for (double delta : {0.3, 0.35, 0.5}) {
          // Hand count of trailing divergent rounds.
          int run = 0;
          for (int i = len - 1; i >= 0; --i) {
            const double seen = (acts >> i) & 1u ? 1.0 : 0.0;
            if (std::abs(predicted[static_cast<std::size_t>(i)] - seen) > delta) {
              ++run;
            } else {
              break;
            }
          }
          for (int streak : {1, 2, 3}) {
            for (auto hold : {policy::RespectHold::UntilClear, policy::RespectHold::OneRound}) {
              for (double p_auto : {0.2, 0.5, 0.8}) {
                policy::PolicyConfig c;
                c.delta = delta;
                c.streak = streak;
                c.hold = hold;
                const auto d = policy::respect_or_calibrate(predicted, observed, p_auto, c);
                const bool respect = hold == policy::RespectHold::UntilClear ? run >= streak : run == streak;
                policy::PolicyAction expected = policy::PolicyAction::Respect;
                if (!respect) {
                  switch (classify_oracle(predicted.back(), p_auto, c.band_epsilon)) {
                    case Classification::OverTrust: expected = policy::PolicyAction::Dampen; break;
                    case Classification::UnderTrust: expected = policy::PolicyAction::Repair; break;
                    case Classification::Calibrated: expected = policy::PolicyAction::NoAction; break;
                  }
                }
                check(d.action == expected && d.rationale.divergence_streak == run,
                      "mismatch at length " + std::to_string(len));
                ++cases;
              }
            }
          }
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " enumerated cases agree with the oracle";
  return o;
}

// ---------------------------------------------------------------------------

// Checks a pre-decision response body against what the log says the
// participant is allowed to know.
struct BlindnessOracle {
  int round = 0;
  std::set<std::pair<int, int>> robot_cells_now;
  std::set<std::pair<int, int>> robot_targets_now;
  std::set<std::pair<int, int>> locked;  // cells from integrated rounds

  void observe(const service::Event& e, std::map<int, std::set<std::pair<int, int>>>& cells_by_round,
               std::map<int, TrustAction>& actions) {
    if (const auto* r = std::get_if<service::RoundStarted>(&e.payload)) {
      round = r->layout.round_number;
      robot_cells_now.clear();
      robot_targets_now.clear();
      for (const auto& c : r->layout.robot_cells) robot_cells_now.insert({c.x, c.y});
      for (const auto& t : r->layout.robot_targets) robot_targets_now.insert({t.position.x, t.position.y});
      cells_by_round[round] = robot_cells_now;
    }
    if (const auto* t = std::get_if<service::TrustActionSubmitted>(&e.payload)) actions[t->round] = t->action;
    if (const auto* v = std::get_if<service::RoundRevealed>(&e.payload)) {
      if (actions[v->round] == TrustAction::Integrate) {
        locked.insert(cells_by_round[v->round].begin(), cells_by_round[v->round].end());
      }
    }
  }

  std::string violation(const json& body, const std::map<int, TrustAction>& actions) const {
    const json& reveals = body.contains("rounds") ? body.at("rounds") : body.at("reveals");
    for (const json& r : reveals) {
      if (!actions.contains(r.at("round").get<int>())) return "reveal of an undecided round";
    }
    if (body.contains("searched_by_robot")) {
      for (const json& c : body.at("searched_by_robot")) {
        if (!locked.contains({c.at(0).get<int>(), c.at(1).get<int>()})) return "unlocked robot cell shown";
      }
    }
    if (body.contains("own_targets")) {
      for (const json& t : body.at("own_targets")) {
        const json& c = t.at("cell");
        if (robot_targets_now.contains({c.at(0).get<int>(), c.at(1).get<int>()})) {
          return "robot target shown as own";
        }
      }
    }
    for (const char* key : {"robot_score", "gold", "red", "robot_targets", "report"}) {
      if (body.contains(key)) return std::string("top-level key ") + key;
    }
    return {};
  }
};

Result event_sourcing() {
  Result o;
  Check check{&o};
  std::int64_t now = 0;
  auto store = std::make_shared<service::MemoryEventStore>();
  service::SessionService svc(store, service::ServiceConfig{}, [&] { return now; });
  service::HttpApi api(svc);
  auto call = [&](const std::string& method, const std::string& path, const json& body) {
    return api.handle({method, path, body.is_null() ? "" : body.dump()});
  };

  std::mt19937_64 rng(0x8E5);
  std::size_t probes = 0;
  std::size_t rebuilds = 0;
  const char* dirs[] = {"up", "down", "left", "right"};
  for (int n = 0; n < 1000 && o.pass; ++n) {
    const ConditionId condition = kAllConditions[n % 4];
    sim::PopulationSpec spec;
    spec.master_seed = 1000 + static_cast<std::uint64_t>(n);
    sim::SimHumanParams params = sim::participant_params(spec, 0);
    sim::SimHumanState human = sim::make_state(params);

    const std::string id = svc.create_session(condition, "p" + std::to_string(n), rng());
    BlindnessOracle oracle;
    std::map<int, std::set<std::pair<int, int>>> cells_by_round;
    std::map<int, TrustAction> actions;
    std::size_t seen = 0;
    auto sync = [&] {
      const auto events = store->load(id);
      for (; seen < events.size(); ++seen) oracle.observe(events[seen], cells_by_round, actions);
    };

    while (o.pass) {
      now += 500;
      sync();
      const service::SessionView view = svc.get_view(id);
      if (view.awaiting == service::Awaiting::Done) break;
      if (view.awaiting == service::Awaiting::Answer) {
        const int q = view.pending_question->id;
        svc.answer_manipulation(id, q, manipulation_questions()[static_cast<std::size_t>(q - 1)].correct);
        continue;
      }
      // Adversarial probes before the decision.
      const std::string base = "/sessions/" + id;
      for (int k = 0; k < 3; ++k) {
        service::HttpResponse r;
        switch (rng() % 6) {
          case 0: r = call("GET", base, nullptr); break;
          case 1: r = call("GET", base + "/summary", nullptr); break;
          case 2: r = call("POST", base + "/select", {{"target_id", rng() % 60}}); break;
          case 3: r = call("POST", base + "/trust-action", {{"round", view.round + 1}, {"action", "integrate"}}); break;
          case 4: r = call("POST", base + "/manipulation", {{"question_id", 1 + rng() % 3}, {"answer", 0}}); break;
          default: r = call("POST", base + "/move", {{"direction", dirs[rng() % 4]}}); break;
        }
        ++probes;
        sync();
        if (r.status == 200) {
          const json body = json::parse(r.body);
          const std::string bad = oracle.violation(body, actions);
          check(bad.empty(), "blindness: " + bad);
        } else {
          check(r.status == 404 || r.status == 409 || r.status == 422, "unexpected status " + std::to_string(r.status));
        }
      }
      const service::SessionView after = svc.get_view(id);
      if (after.awaiting == service::Awaiting::Done || after.awaiting == service::Awaiting::Answer ||
          after.round != view.round) {
        continue;
      }

      // Honest play: walk a little, pick up own finds, then decide.
      if (after.awaiting == service::Awaiting::Select) {
        for (const auto& t : after.own_targets) {
          if (!t.selected) {
            svc.select_target(id, t.id);
            break;
          }
        }
        continue;
      }
      if (after.awaiting == service::Awaiting::Move && rng() % 4 != 0) {
        const auto d = static_cast<game::Direction>(rng() % 4);
        try {
          svc.move(id, d);
        } catch (const service::ValidationError&) {
        }
        continue;
      }
      if (after.pending_cue) {
        human = sim::receive_tcc(human, after.pending_cue->kind, params);
      } else {
        human = sim::note_no_cue(human);
      }
      const TrustAction action = sim::decide(human, params);
      const auto response = svc.submit_trust_action(id, after.round, action);
      human = sim::observe_outcome(human, response.reveal.robot_score, params);
    }

    sync();
    const service::SessionState live = svc.live_state(id);
    check(svc.rebuild_from_log(id) == live, "rebuild differs from live state for " + id);
    check(service::rebuild(service::parse_log(service::write_log(id, store->load(id)))) == live,
          "serialized log does not rebuild to live state for " + id);
    check(live.completed && live.reveals.size() == 10, "session did not complete");
    ++rebuilds;
    if (n % 97 == 0) svc.evict_cache();
  }
  if (o.pass) {
    o.detail = std::to_string(rebuilds) + " sessions rebuilt exactly; " + std::to_string(probes) +
               " adversarial probes, no leaks";
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Result()> run;
  };
  const Criterion criteria[] = {
      {"AC1 schedule fidelity", schedule_fidelity},
      {"AC2 trust-model algebra", trust_algebra},
      {"AC3 fit recovery", fit_recovery},
      {"AC4 cue direction", cue_direction},
      {"AC5 cue decay", cue_decay},
      {"AC6 exclusion rule", exclusion_rule},
      {"AC7 policy correctness", policy_correctness},
      {"AC8 event sourcing", event_sourcing},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = Clock::now();
    Result out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("[%s] %s: %s (%.2fs)\n", out.pass ? "PASS" : "FAIL", c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !out.pass;
  }
  return failures == 0 ? 0 : 1;
}

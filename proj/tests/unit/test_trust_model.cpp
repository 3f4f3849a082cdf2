#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "trustcal/errors.hpp"
#include "trustcal/trust_model.hpp"

using namespace trustcal;
using namespace trustcal::trust;

namespace {

// Closed form with no cues: counts only, independent of order.
double closed_form(const TrustParams& p, int successes, int failures) {
  const double a = p.alpha0 + p.w_s * successes;
  const double b = p.beta0 + p.w_f * failures;
  return a / (a + b);
}

TrustParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> prior(0.1, 10.0);
  std::uniform_real_distribution<double> weight(0.0, 5.0);
  TrustParams p;
  p.alpha0 = prior(rng);
  p.beta0 = prior(rng);
  p.w_s = weight(rng);
  p.w_f = weight(rng);
  p.w_repair = weight(rng);
  p.w_dampen = weight(rng);
  return p;
}

std::vector<Outcome> random_outcomes(std::mt19937_64& rng, int n) {
  std::bernoulli_distribution coin(0.5);
  std::vector<Outcome> out;
  for (int i = 0; i < n; ++i) out.push_back(coin(rng) ? Outcome::Success : Outcome::Failure);
  return out;
}

}  // namespace

TEST_CASE("uniform prior starts at one half") {
  CHECK(mean_trust(init(TrustParams{})) == doctest::Approx(0.5));
}

TEST_CASE("worked examples") {
  TrustParams p;  // 1, 1, 1, 1
  TrustState s = init(p);
  s = update(s, Outcome::Success, p);
  CHECK(mean_trust(s) == doctest::Approx(2.0 / 3.0));
  s = update(s, Outcome::Failure, p);
  CHECK(mean_trust(s) == doctest::Approx(0.5));
  CHECK(s.round_index == 2);

  TrustParams q{2.0, 1.0, 1.5, 1.0};
  TrustState t = update(update(init(q), Outcome::Success, q), Outcome::Success, q);
  CHECK(mean_trust(t) == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("outcome follows the sign of the round score") {
  CHECK(outcome_from_score(100) == Outcome::Success);
  CHECK(outcome_from_score(0) == Outcome::Failure);
  CHECK(outcome_from_score(-300) == Outcome::Failure);
}

TEST_CASE("incremental updates agree with the closed form") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const TrustParams p = random_params(rng);
    TrustState s = init(p);
    int succ = 0;
    int fail = 0;
    for (Outcome o : random_outcomes(rng, 30)) {
      s = update(s, o, p);
      (o == Outcome::Success ? succ : fail) += 1;
      REQUIRE(mean_trust(s) == doctest::Approx(closed_form(p, succ, fail)).epsilon(1e-12));
    }
  }
}

TEST_CASE("final trust does not depend on outcome order") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const TrustParams p = random_params(rng);
    auto outcomes = random_outcomes(rng, 20);
    TrustState a = init(p);
    for (Outcome o : outcomes) a = update(a, o, p);
    std::shuffle(outcomes.begin(), outcomes.end(), rng);
    TrustState b = init(p);
    for (Outcome o : outcomes) b = update(b, o, p);
    CHECK(mean_trust(a) == doctest::Approx(mean_trust(b)).epsilon(1e-12));
  }
}

TEST_CASE("success never lowers trust and failure never raises it") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const TrustParams p = random_params(rng);
    TrustState s = init(p);
    for (Outcome o : random_outcomes(rng, 10)) s = update(s, o, p);
    const TrustDeltas d = predict_deltas(s, p);
    CHECK(d.on_success >= 0.0);
    CHECK(d.on_failure <= 0.0);
  }
}

TEST_CASE("trust stays inside the unit interval") {
  std::mt19937_64 rng(14);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 300; ++trial) {
    const TrustParams p = random_params(rng);
    TrustState s = init(p);
    for (Outcome o : random_outcomes(rng, 25)) {
      if (coin(rng)) s = apply_tcc(s, coin(rng) ? CueKind::Repair : CueKind::Dampen, p);
      s = update(s, o, p);
      CHECK(mean_trust(s) > 0.0);
      CHECK(mean_trust(s) < 1.0);
    }
  }
}

TEST_CASE("repair raises trust and dampen lowers it") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    TrustParams p = random_params(rng);
    p.w_repair = std::max(p.w_repair, 0.01);
    p.w_dampen = std::max(p.w_dampen, 0.01);
    const TrustState s = init(p);
    CHECK(mean_trust(apply_tcc(s, CueKind::Repair, p)) > mean_trust(s));
    CHECK(mean_trust(apply_tcc(s, CueKind::Dampen, p)) < mean_trust(s));
  }
}

TEST_CASE("consecutive cues of one kind decay geometrically") {
  TrustParams p;
  p.w_repair = 2.0;
  p.tcc_decay = 0.5;
  TrustState s = init(p);
  s = apply_tcc(s, CueKind::Repair, p);
  CHECK(s.alpha == doctest::Approx(3.0));
  s = apply_tcc(s, CueKind::Repair, p);
  CHECK(s.alpha == doctest::Approx(4.0));
  s = apply_tcc(s, CueKind::Repair, p);
  CHECK(s.alpha == doctest::Approx(4.5));
  CHECK(s.consecutive_repair == 3);

  // A cue-free round restores full strength.
  s = clear_cue_streak(s);
  s = apply_tcc(s, CueKind::Repair, p);
  CHECK(s.alpha == doctest::Approx(6.5));

  // The opposite kind resets the streak too.
  s = apply_tcc(s, CueKind::Dampen, p);
  CHECK(s.consecutive_repair == 0);
  CHECK(s.consecutive_dampen == 1);
}

TEST_CASE("predict_trajectory applies the cue before and the outcome after each decision") {
  TrustParams p;
  p.w_dampen = 1.0;
  const std::vector<TrustObservation> traj{
      {1, Outcome::Success, std::nullopt, TrustAction::Integrate},
      {2, Outcome::Failure, CueKind::Dampen, TrustAction::Discard},
  };
  const auto pred = predict_trajectory(traj, p);
  REQUIRE(pred.size() == 2);
  CHECK(pred[0] == doctest::Approx(0.5));
  CHECK(pred[1] == doctest::Approx(2.0 / 4.0));  // alpha 2, beta 1 + 1
  const TrustState end = final_state(traj, p);
  CHECK(end.alpha == doctest::Approx(2.0));
  CHECK(end.beta == doctest::Approx(3.0));
}

TEST_CASE("trajectory and parameter validation") {
  const std::vector<TrustObservation> bad{{2, Outcome::Success, {}, TrustAction::Integrate},
                                          {2, Outcome::Success, {}, TrustAction::Integrate}};
  CHECK_THROWS_AS(predict_trajectory(bad, TrustParams{}), DomainError);
  CHECK_THROWS_AS(validate_trajectory(bad), DomainError);
  TrustParams p;
  p.alpha0 = 0.0;
  CHECK_THROWS_AS(init(p), DomainError);
  p = {};
  p.w_f = -1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.tcc_decay = 1.5;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK_THROWS_AS(parse_outcome("win"), DomainError);
}

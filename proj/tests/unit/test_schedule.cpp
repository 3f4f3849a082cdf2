#include <doctest.h>

#include <filesystem>

#include "trustcal/errors.hpp"
#include "trustcal/game.hpp"
#include "trustcal/schedule.hpp"

using namespace trustcal;
using namespace trustcal::game;

namespace {

const std::filesystem::path kData = TRUSTCAL_DATA_DIR;

// Reference rows (round, gold, red, score).
const ScheduleRow kNegative[] = {{1, 2, 3, -100}, {2, 1, 4, -300}, {3, 1, 2, -100},
                                 {4, 2, 3, -100}, {5, 0, 2, -200}, {6, 0, 1, -100},
                                 {7, 0, 1, -100}, {8, 0, 2, -200}, {9, 2, 3, -100},
                                 {10, 1, 2, -100}};
const ScheduleRow kPositive[] = {{1, 3, 2, 100}, {2, 1, 0, 100}, {3, 2, 0, 200}, {4, 4, 1, 300},
                                 {5, 4, 0, 400}, {6, 4, 3, 100}, {7, 1, 0, 100}, {8, 2, 0, 200},
                                 {9, 3, 2, 100}, {10, 4, 3, 100}};

}  // namespace

TEST_CASE("built-in schedules match the tabulated rows") {
  REQUIRE(all_negative_schedule().rows.size() == 10);
  REQUIRE(all_positive_schedule().rows.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(all_negative_schedule().rows[i] == kNegative[i]);
    CHECK(all_positive_schedule().rows[i] == kPositive[i]);
  }
}

TEST_CASE("round_score reproduces every tabulated score") {
  for (const auto* table : {kNegative, kPositive}) {
    for (int i = 0; i < 10; ++i) {
      CHECK(round_score(table[i].gold, table[i].red) == table[i].score);
    }
  }
}

TEST_CASE("bundled schedule files equal the built-in schedules") {
  CHECK(load_schedule(kData / "schedules/all_negative.json") == all_negative_schedule());
  CHECK(load_schedule(kData / "schedules/all_positive.json") == all_positive_schedule());
}

TEST_CASE("schedule json round trip") {
  CHECK(parse_schedule(to_json(all_positive_schedule())) == all_positive_schedule());
}

TEST_CASE("schedules reject bad rows") {
  CHECK_THROWS_AS(parse_schedule(R"({"name":"x","rounds":[{"round":1,"gold":1,"red":0,"score":100}]})"),
                  ConfigError);
  Schedule s = all_negative_schedule();
  s.rows[3].score = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = all_negative_schedule();
  std::swap(s.rows[0], s.rows[1]);
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(parse_schedule("{not json"), ConfigError);
  CHECK_THROWS_AS(load_schedule(kData / "missing.json"), ConfigError);
  CHECK_THROWS_AS(all_positive_schedule().row(11), DomainError);
}

#include "trustcal/schedule.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trustcal/errors.hpp"
#include "trustcal/game.hpp"

namespace trustcal::game {

using nlohmann::json;

namespace {

Schedule make(std::string name, std::initializer_list<ScheduleRow> rows) {
  Schedule s{std::move(name), rows};
  s.validate();
  return s;
}

}  // namespace

const ScheduleRow& Schedule::row(int round) const {
  if (round < 1 || round > static_cast<int>(rows.size())) {
    throw DomainError("schedule " + name + " has no round " + std::to_string(round));
  }
  return rows[static_cast<std::size_t>(round - 1)];
}

void Schedule::validate() const {
  if (rows.size() != kRoundsPerGame) {
    throw ConfigError("schedule " + name + " must have exactly 10 rounds, got " +
                      std::to_string(rows.size()));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ScheduleRow& r = rows[i];
    if (r.round != static_cast<int>(i) + 1) {
      throw ConfigError("schedule " + name + " rounds must run 1..10 in order");
    }
    if (r.gold < 0 || r.red < 0) throw ConfigError("schedule " + name + " has negative counts");
    if (r.score != round_score(r.gold, r.red)) {
      throw ConfigError("schedule " + name + " round " + std::to_string(r.round) +
                        ": score does not equal 100*(gold-red)");
    }
  }
}

const Schedule& all_negative_schedule() {
  static const Schedule s = make("all_negative", {
                                                     {1, 2, 3, -100},
                                                     {2, 1, 4, -300},
                                                     {3, 1, 2, -100},
                                                     {4, 2, 3, -100},
                                                     {5, 0, 2, -200},
                                                     {6, 0, 1, -100},
                                                     {7, 0, 1, -100},
                                                     {8, 0, 2, -200},
                                                     {9, 2, 3, -100},
                                                     {10, 1, 2, -100},
                                                 });
  return s;
}

const Schedule& all_positive_schedule() {
  static const Schedule s = make("all_positive", {
                                                     {1, 3, 2, 100},
                                                     {2, 1, 0, 100},
                                                     {3, 2, 0, 200},
                                                     {4, 4, 1, 300},
                                                     {5, 4, 0, 400},
                                                     {6, 4, 3, 100},
                                                     {7, 1, 0, 100},
                                                     {8, 2, 0, 200},
                                                     {9, 3, 2, 100},
                                                     {10, 4, 3, 100},
                                                 });
  return s;
}

Schedule parse_schedule(std::string_view json_text) {
  Schedule s;
  try {
    json doc = json::parse(json_text);
    s.name = doc.at("name").get<std::string>();
    for (const json& r : doc.at("rounds")) {
      s.rows.push_back({r.at("round").get<int>(), r.at("gold").get<int>(), r.at("red").get<int>(),
                        r.at("score").get<Points>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed schedule: ") + e.what());
  }
  s.validate();
  return s;
}

Schedule load_schedule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schedule " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_schedule(buf.str());
}

std::string to_json(const Schedule& schedule) {
  json rounds = json::array();
  for (const ScheduleRow& r : schedule.rows) {
    rounds.push_back({{"round", r.round}, {"gold", r.gold}, {"red", r.red}, {"score", r.score}});
  }
  return json{{"name", schedule.name}, {"rounds", rounds}}.dump(2);
}

}  // namespace trustcal::game

#include "trustcal/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "trustcal/errors.hpp"

namespace trustcal {

std::string_view to_string(ConditionId id) {
  switch (id) {
    case ConditionId::ControlPositive: return "control-positive";
    case ConditionId::ControlNegative: return "control-negative";
    case ConditionId::TccPositive: return "tcc-positive";
    case ConditionId::TccNegative: return "tcc-negative";
  }
  return "control-positive";
}

ConditionId parse_condition(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c == '-' || c == '_' || c == ' ') continue;
    key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (key == "controlpositive") return ConditionId::ControlPositive;
  if (key == "controlnegative") return ConditionId::ControlNegative;
  if (key == "tccpositive") return ConditionId::TccPositive;
  if (key == "tccnegative") return ConditionId::TccNegative;
  throw DomainError("unknown condition: " + std::string(text));
}

Condition Condition::standard(ConditionId id) {
  Condition c;
  c.id = id;
  const bool positive = id == ConditionId::ControlPositive || id == ConditionId::TccPositive;
  c.schedule = positive ? game::all_positive_schedule() : game::all_negative_schedule();
  if (id == ConditionId::TccPositive) c.cue_kind = CueKind::Dampen;
  if (id == ConditionId::TccNegative) c.cue_kind = CueKind::Repair;
  return c;
}

bool Condition::cue_planned(int round_number) const {
  return cue_kind.has_value() && round_number >= first_cue_round &&
         round_number <= game::kRoundsPerGame;
}

std::vector<int> Condition::tcc_rounds() const {
  std::vector<int> rounds;
  for (int r = 1; r <= game::kRoundsPerGame; ++r) {
    if (cue_planned(r)) rounds.push_back(r);
  }
  return rounds;
}

void Condition::validate() const {
  schedule.validate();
  if (cue_kind && (first_cue_round < 2 || first_cue_round > game::kRoundsPerGame)) {
    throw ConfigError("first cue round must lie in 2..10");
  }
}

const std::vector<ManipulationQuestion>& manipulation_questions() {
  static const std::vector<ManipulationQuestion> questions{
      {1,
       "How many points is a gold star worth?",
       {"-100 points", "0 points", "100 points"},
       2},
      {2,
       "When you decide to integrate or discard the robot's map, what do you know about the "
       "robot's findings for that round?",
       {"Its score and targets", "Nothing; the decision is made before they are shown",
        "Only its score"},
       1},
      {3,
       "What happens to the area the robot searched when you integrate its map?",
       {"You cannot search it again", "You must search it again", "It is cleared of all targets"},
       0},
  };
  return questions;
}

void ProtocolConfig::validate() const {
  layout.validate();
  catalog.validate();
  if (step_budget < 0) throw ConfigError("step budget must be >= 0");
  if (human_radius < 1) throw ConfigError("human discovery radius must be >= 1");
  if (manipulation_after_rounds.size() != manipulation_questions().size()) {
    throw ConfigError("need one manipulation round per question");
  }
  int prev = 0;
  for (int r : manipulation_after_rounds) {
    if (r <= prev || r > game::kRoundsPerGame) {
      throw ConfigError("manipulation rounds must increase within 1..10");
    }
    prev = r;
  }
}

bool excluded_by_manipulation(const std::vector<bool>& results) {
  const auto failures = std::count(results.begin(), results.end(), false);
  return failures >= 2;
}

}  // namespace trustcal

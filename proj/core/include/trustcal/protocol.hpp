#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trustcal/game.hpp"
#include "trustcal/policy.hpp"
#include "trustcal/schedule.hpp"

namespace trustcal {

enum class ConditionId { ControlPositive, ControlNegative, TccPositive, TccNegative };

inline constexpr ConditionId kAllConditions[] = {
    ConditionId::ControlPositive, ConditionId::ControlNegative, ConditionId::TccPositive,
    ConditionId::TccNegative};

std::string_view to_string(ConditionId id);
// Accepts "tcc-positive", "TccPositive", "tcc_positive" and similar spellings.
ConditionId parse_condition(std::string_view text);

// A condition: the robot's ten-round schedule plus its cue plan.
struct Condition {
  ConditionId id = ConditionId::ControlPositive;
  game::Schedule schedule;
  std::optional<CueKind> cue_kind;  // none for controls
  int first_cue_round = 4;

  // Standard conditions: positive conditions dampen, negative ones repair.
  static Condition standard(ConditionId id);

  bool cue_planned(int round_number) const;
  std::vector<int> tcc_rounds() const;
  void validate() const;
};

struct ManipulationQuestion {
  int id = 0;
  std::string text;
  std::vector<std::string> choices;
  int correct = 0;
};

// Three comprehension checks about the game mechanics.
const std::vector<ManipulationQuestion>& manipulation_questions();

// Everything a session needs besides its condition and seed. Recorded in the
// first event of every session log so a log replays on its own.
struct ProtocolConfig {
  game::LayoutConfig layout = game::LayoutConfig::standard();
  int step_budget = 15;
  int human_radius = 1;
  std::vector<int> manipulation_after_rounds{2, 5, 8};
  policy::CueCatalog catalog = policy::CueCatalog::defaults();

  void validate() const;
  bool operator==(const ProtocolConfig&) const = default;
};

// Excluded when two or more of the three manipulation checks were failed.
bool excluded_by_manipulation(const std::vector<bool>& results);

}  // namespace trustcal

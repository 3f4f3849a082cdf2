#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "trustcal/common.hpp"
#include "trustcal/errors.hpp"

namespace trustcal::game {

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

using CellSet = std::set<Cell>;

enum class TargetKind { GoldStar, RedCircle };
enum class Role { Human, Robot };

inline constexpr Points kGoldStarValue = 100;
inline constexpr Points kRedCircleValue = -100;

constexpr Points target_value(TargetKind kind) {
  return kind == TargetKind::GoldStar ? kGoldStarValue : kRedCircleValue;
}

std::string_view to_string(TargetKind kind);
std::string_view to_string(Role role);
TargetKind parse_target_kind(std::string_view text);

struct Target {
  Cell position;
  TargetKind kind = TargetKind::GoldStar;
  Points value = kGoldStarValue;
  std::optional<Role> discovered_by;
  bool selected = false;

  bool operator==(const Target&) const = default;

  static Target make(Cell position, TargetKind kind) {
    return Target{position, kind, target_value(kind), std::nullopt, false};
  }
};

// Index into GameMap::targets.
using TargetId = std::size_t;

struct GameMap {
  int width = 20;
  int height = 20;
  CellSet obstacles;
  std::vector<Target> targets;
  CellSet searched_by_human;
  CellSet searched_by_robot;
  // Rounds whose trust action has been applied.
  std::set<int> resolved_rounds;

  static GameMap empty(int width, int height, CellSet obstacles = {});

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  bool is_obstacle(Cell c) const { return obstacles.contains(c); }
  bool walkable(Cell c) const { return in_bounds(c) && !is_obstacle(c); }
  std::optional<TargetId> target_at(Cell c) const;

  // Places a new undiscovered target; throws DomainError on an illegal cell.
  TargetId add_target(Cell position, TargetKind kind);

  // Throws DomainError when any structural invariant is broken.
  void validate() const;
  bool operator==(const GameMap&) const = default;
};

struct Agent {
  Role role = Role::Human;
  Cell position;
  int discovery_radius = 1;
  bool operator==(const Agent&) const = default;
};

int chebyshev(Cell a, Cell b);

// Cells within the agent's discovery square, clipped to the map.
CellSet coverage(const GameMap& map, const Agent& agent);

// Discovers every undiscovered target within the agent's radius that the
// agent is allowed to search, and records the covered cells. Humans cannot
// search cells locked by an integrated robot report.
std::vector<TargetId> discover(GameMap& map, const Agent& agent);

// Selects a target previously discovered by this agent; returns its value.
Points select_target(GameMap& map, const Agent& agent, TargetId id);

constexpr Points round_score(int gold, int red) {
  if (gold < 0 || red < 0) throw DomainError("round_score: negative target count");
  return 100 * static_cast<Points>(gold - red);
}

class RobotReport {
 public:
  RobotReport(int round_number, int gold_found, int red_found, CellSet searched_cells = {});

  // Builds a report from a tabulated row, rejecting an inconsistent score.
  static RobotReport from_row(int round_number, int gold_found, int red_found, Points score,
                              CellSet searched_cells = {});

  int round_number() const { return round_number_; }
  int gold_found() const { return gold_found_; }
  int red_found() const { return red_found_; }
  Points score() const { return score_; }
  const CellSet& searched_cells() const { return searched_cells_; }

  bool operator==(const RobotReport&) const = default;

 private:
  int round_number_;
  int gold_found_;
  int red_found_;
  Points score_;
  CellSet searched_cells_;
};

struct TrustActionResult {
  Points team_score = 0;
  GameMap map;
};

// Integrate adds the report score and locks the robot's cells against human
// search. Discard leaves the score alone and releases the robot's finds so
// the human may search that area later.
TrustActionResult apply_trust_action(GameMap map, const RobotReport& report, TrustAction action,
                                     Points team_score);

enum class Direction { Up, Down, Left, Right };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);
Cell step(Cell from, Direction d);

// Seeded per-round target layout with a scripted robot sweep.
struct LayoutConfig {
  int width = 20;
  int height = 20;
  CellSet obstacles;
  int human_gold = 3;
  int human_red = 2;
  int robot_radius = 2;
  Cell human_start{0, 0};

  static LayoutConfig standard();
  void validate() const;
  bool operator==(const LayoutConfig&) const = default;
};

struct PlacedTarget {
  Cell position;
  TargetKind kind;
  bool operator==(const PlacedTarget&) const = default;
};

struct RoundLayout {
  int round_number = 0;
  CellSet robot_cells;
  std::vector<PlacedTarget> robot_targets;
  std::vector<PlacedTarget> human_targets;
  bool operator==(const RoundLayout&) const = default;
};

// The robot sweeps one row per round; its searched area is that row
// widened by its discovery radius.
CellSet robot_sweep(const GameMap& map, int round_number, int robot_radius);

RoundLayout plan_round(const GameMap& map, int round_number, int gold, int red,
                       const LayoutConfig& config, std::uint64_t seed);

struct AppliedRound {
  RobotReport report;
  std::vector<TargetId> robot_targets;
};

// Places the layout's targets; the robot discovers and selects its own.
AppliedRound apply_layout(GameMap& map, const RoundLayout& layout);

}  // namespace trustcal::game

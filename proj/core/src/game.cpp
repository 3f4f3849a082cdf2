#include "trustcal/game.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <string>

#include "trustcal/errors.hpp"

namespace trustcal::game {

namespace {

std::string describe(Cell c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

}  // namespace

std::string_view to_string(TargetKind kind) {
  return kind == TargetKind::GoldStar ? "gold_star" : "red_circle";
}

std::string_view to_string(Role role) { return role == Role::Human ? "human" : "robot"; }

TargetKind parse_target_kind(std::string_view text) {
  if (text == "gold_star") return TargetKind::GoldStar;
  if (text == "red_circle") return TargetKind::RedCircle;
  throw DomainError("unknown target kind: " + std::string(text));
}

GameMap GameMap::empty(int width, int height, CellSet obstacles) {
  GameMap map;
  map.width = width;
  map.height = height;
  map.obstacles = std::move(obstacles);
  map.validate();
  return map;
}

std::optional<TargetId> GameMap::target_at(Cell c) const {
  for (TargetId i = 0; i < targets.size(); ++i) {
    if (targets[i].position == c) return i;
  }
  return std::nullopt;
}

TargetId GameMap::add_target(Cell position, TargetKind kind) {
  if (!in_bounds(position)) throw DomainError("target out of bounds at " + describe(position));
  if (is_obstacle(position)) throw DomainError("target on obstacle at " + describe(position));
  if (target_at(position)) throw DomainError("cell already holds a target: " + describe(position));
  targets.push_back(Target::make(position, kind));
  return targets.size() - 1;
}

void GameMap::validate() const {
  if (width <= 0 || height <= 0) throw DomainError("map dimensions must be positive");
  for (Cell c : obstacles) {
    if (!in_bounds(c)) throw DomainError("obstacle out of bounds at " + describe(c));
  }
  CellSet occupied;
  for (const Target& t : targets) {
    if (!in_bounds(t.position)) throw DomainError("target out of bounds at " + describe(t.position));
    if (is_obstacle(t.position)) throw DomainError("target on obstacle at " + describe(t.position));
    if (!occupied.insert(t.position).second) {
      throw DomainError("two targets share cell " + describe(t.position));
    }
    if (t.value != target_value(t.kind)) throw DomainError("target value does not match its kind");
    if (t.selected && !t.discovered_by) throw DomainError("selected target was never discovered");
  }
  for (const CellSet* searched : {&searched_by_human, &searched_by_robot}) {
    for (Cell c : *searched) {
      if (!walkable(c)) throw DomainError("searched cell not walkable: " + describe(c));
    }
  }
}

int chebyshev(Cell a, Cell b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

CellSet coverage(const GameMap& map, const Agent& agent) {
  CellSet cells;
  const int r = agent.discovery_radius;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      Cell c{agent.position.x + dx, agent.position.y + dy};
      if (map.walkable(c)) cells.insert(c);
    }
  }
  return cells;
}

std::vector<TargetId> discover(GameMap& map, const Agent& agent) {
  if (!map.in_bounds(agent.position)) {
    throw DomainError("agent out of bounds at " + describe(agent.position));
  }
  if (agent.discovery_radius < 1) throw DomainError("discovery radius must be at least 1");

  CellSet covered = coverage(map, agent);
  if (agent.role == Role::Human) {
    std::erase_if(covered, [&](Cell c) { return map.searched_by_robot.contains(c); });
  }

  std::vector<TargetId> found;
  for (TargetId i = 0; i < map.targets.size(); ++i) {
    Target& t = map.targets[i];
    if (t.discovered_by || !covered.contains(t.position)) continue;
    t.discovered_by = agent.role;
    found.push_back(i);
  }
  CellSet& searched = agent.role == Role::Human ? map.searched_by_human : map.searched_by_robot;
  searched.insert(covered.begin(), covered.end());
  return found;
}

Points select_target(GameMap& map, const Agent& agent, TargetId id) {
  if (id >= map.targets.size()) throw DomainError("no such target: " + std::to_string(id));
  Target& t = map.targets[id];
  if (t.discovered_by != agent.role) {
    throw DomainError("target " + std::to_string(id) + " not discovered by this agent");
  }
  if (t.selected) throw DomainError("target " + std::to_string(id) + " already selected");
  t.selected = true;
  return t.value;
}

RobotReport::RobotReport(int round_number, int gold_found, int red_found, CellSet searched_cells)
    : round_number_(round_number),
      gold_found_(gold_found),
      red_found_(red_found),
      score_(round_score(gold_found, red_found)),
      searched_cells_(std::move(searched_cells)) {}

RobotReport RobotReport::from_row(int round_number, int gold_found, int red_found, Points score,
                                  CellSet searched_cells) {
  RobotReport report(round_number, gold_found, red_found, std::move(searched_cells));
  if (report.score() != score) {
    throw DomainError("round " + std::to_string(round_number) + ": score " +
                      std::to_string(score) + " != 100*(gold-red) = " +
                      std::to_string(report.score()));
  }
  return report;
}

TrustActionResult apply_trust_action(GameMap map, const RobotReport& report, TrustAction action,
                                     Points team_score) {
  if (!map.resolved_rounds.insert(report.round_number()).second) {
    throw DomainError("trust action already applied for round " +
                      std::to_string(report.round_number()));
  }
  if (action == TrustAction::Integrate) {
    team_score += report.score();
    for (Cell c : report.searched_cells()) {
      if (map.walkable(c)) map.searched_by_robot.insert(c);
    }
  } else {
    for (Target& t : map.targets) {
      if (t.discovered_by == Role::Robot && report.searched_cells().contains(t.position) &&
          !map.searched_by_robot.contains(t.position)) {
        t.discovered_by.reset();
        t.selected = false;
      }
    }
  }
  return {team_score, std::move(map)};
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Up: return "up";
    case Direction::Down: return "down";
    case Direction::Left: return "left";
    case Direction::Right: return "right";
  }
  return "up";
}

Direction parse_direction(std::string_view text) {
  if (text == "up") return Direction::Up;
  if (text == "down") return Direction::Down;
  if (text == "left") return Direction::Left;
  if (text == "right") return Direction::Right;
  throw DomainError("unknown direction: " + std::string(text));
}

Cell step(Cell from, Direction d) {
  switch (d) {
    case Direction::Up: return {from.x, from.y - 1};
    case Direction::Down: return {from.x, from.y + 1};
    case Direction::Left: return {from.x - 1, from.y};
    case Direction::Right: return {from.x + 1, from.y};
  }
  return from;
}

LayoutConfig LayoutConfig::standard() {
  LayoutConfig config;
  // Two interior walls with gaps, standing in for the building.
  for (int y = 4; y <= 9; ++y) config.obstacles.insert({10, y});
  for (int x = 3; x <= 8; ++x) config.obstacles.insert({x, 14});
  for (int x = 13; x <= 17; ++x) config.obstacles.insert({x, 12});
  return config;
}

void LayoutConfig::validate() const {
  GameMap probe;
  probe.width = width;
  probe.height = height;
  probe.obstacles = obstacles;
  probe.validate();
  if (human_gold < 0 || human_red < 0) throw DomainError("human target counts must be >= 0");
  if (robot_radius < 1) throw DomainError("robot radius must be at least 1");
  if (!probe.walkable(human_start)) throw DomainError("human start cell is not walkable");
}

CellSet robot_sweep(const GameMap& map, int round_number, int robot_radius) {
  // Rows 1, 3, 5, ... wrapping on tall maps.
  const int row = (2 * (round_number - 1) + 1) % map.height;
  Agent sweeper{Role::Robot, {0, row}, robot_radius};
  CellSet cells;
  for (int x = 0; x < map.width; ++x) {
    sweeper.position = {x, row};
    CellSet part = coverage(map, sweeper);
    cells.insert(part.begin(), part.end());
  }
  return cells;
}

namespace {

std::vector<Cell> pick_cells(std::vector<Cell> candidates, std::size_t count, std::mt19937_64& rng,
                             int round_number, const char* who) {
  if (candidates.size() < count) {
    throw DomainError("round " + std::to_string(round_number) + ": not enough free cells for " +
                      who + " targets");
  }
  // Partial Fisher-Yates with explicit index draws keeps the layout
  // independent of std::shuffle's implementation.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
    std::swap(candidates[i], candidates[pick(rng)]);
  }
  candidates.resize(count);
  return candidates;
}

std::vector<PlacedTarget> label(const std::vector<Cell>& cells, int gold) {
  std::vector<PlacedTarget> out;
  out.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out.push_back({cells[i], static_cast<int>(i) < gold ? TargetKind::GoldStar : TargetKind::RedCircle});
  }
  return out;
}

}  // namespace

RoundLayout plan_round(const GameMap& map, int round_number, int gold, int red,
                       const LayoutConfig& config, std::uint64_t seed) {
  if (gold < 0 || red < 0) throw DomainError("target counts must be >= 0");
  std::mt19937_64 rng(seed);

  RoundLayout layout;
  layout.round_number = round_number;
  layout.robot_cells = robot_sweep(map, round_number, config.robot_radius);

  std::vector<Cell> robot_free;
  for (Cell c : layout.robot_cells) {
    if (!map.target_at(c)) robot_free.push_back(c);
  }
  auto robot_cells = pick_cells(std::move(robot_free), static_cast<std::size_t>(gold + red), rng,
                                round_number, "robot");
  layout.robot_targets = label(robot_cells, gold);

  // Human targets avoid the robot's sweep and locked cells. Fresh cells are
  // preferred; once the map runs short the count is capped.
  CellSet taken(robot_cells.begin(), robot_cells.end());
  std::vector<Cell> fresh;
  std::vector<Cell> revisited;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      Cell c{x, y};
      if (!map.walkable(c) || map.target_at(c) || taken.contains(c)) continue;
      if (layout.robot_cells.contains(c) || map.searched_by_robot.contains(c)) continue;
      (map.searched_by_human.contains(c) ? revisited : fresh).push_back(c);
    }
  }
  const auto wanted = static_cast<std::size_t>(config.human_gold + config.human_red);
  std::vector<Cell> human_cells =
      pick_cells(fresh, std::min(wanted, fresh.size()), rng, round_number, "human");
  if (human_cells.size() < wanted) {
    auto extra = pick_cells(revisited, std::min(wanted - human_cells.size(), revisited.size()),
                            rng, round_number, "human");
    human_cells.insert(human_cells.end(), extra.begin(), extra.end());
  }
  layout.human_targets = label(human_cells, config.human_gold);
  return layout;
}

AppliedRound apply_layout(GameMap& map, const RoundLayout& layout) {
  int gold = 0;
  int red = 0;
  std::vector<TargetId> robot_ids;
  for (const PlacedTarget& p : layout.robot_targets) {
    TargetId id = map.add_target(p.position, p.kind);
    map.targets[id].discovered_by = Role::Robot;
    map.targets[id].selected = true;
    robot_ids.push_back(id);
    (p.kind == TargetKind::GoldStar ? gold : red) += 1;
  }
  for (const PlacedTarget& p : layout.human_targets) map.add_target(p.position, p.kind);
  return {RobotReport(layout.round_number, gold, red, layout.robot_cells), std::move(robot_ids)};
}

}  // namespace trustcal::game

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trustcal/common.hpp"

namespace trustcal::game {

inline constexpr int kRoundsPerGame = 10;

struct ScheduleRow {
  int round = 0;
  int gold = 0;
  int red = 0;
  Points score = 0;
  bool operator==(const ScheduleRow&) const = default;
};

// Per-round robot findings for one condition.
struct Schedule {
  std::string name;
  std::vector<ScheduleRow> rows;

  const ScheduleRow& row(int round) const;
  // Rows must number exactly ten, run 1..10, and satisfy score = 100*(gold-red).
  void validate() const;
  bool operator==(const Schedule&) const = default;
};

// Robot outcomes for the negative-performance conditions.
const Schedule& all_negative_schedule();
// Robot outcomes for the positive-performance conditions.
const Schedule& all_positive_schedule();

Schedule parse_schedule(std::string_view json_text);
Schedule load_schedule(const std::filesystem::path& path);
std::string to_json(const Schedule& schedule);

}  // namespace trustcal::game

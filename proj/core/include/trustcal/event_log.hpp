#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trustcal/session.hpp"

namespace trustcal::service {

inline constexpr std::string_view kLogFormat = "trustcal-session-log";
inline constexpr int kLogVersion = 1;

std::string serialize_event(const Event& event);
Event parse_event(std::string_view line);

// Header record followed by one event per line.
std::string write_log(std::string_view session_id, std::span<const Event> events);
std::vector<Event> read_log(std::istream& in);
std::vector<Event> parse_log(std::string_view text);
std::vector<Event> load_log_file(const std::filesystem::path& path);

// Append-only storage of per-session event logs.
class EventStore {
 public:
  virtual ~EventStore() = default;
  virtual void append(const std::string& session_id, std::span<const Event> events) = 0;
  virtual std::vector<Event> load(const std::string& session_id) const = 0;
  virtual bool exists(const std::string& session_id) const = 0;
  virtual std::vector<std::string> list() const = 0;
};

class MemoryEventStore final : public EventStore {
 public:
  void append(const std::string& session_id, std::span<const Event> events) override;
  std::vector<Event> load(const std::string& session_id) const override;
  bool exists(const std::string& session_id) const override;
  std::vector<std::string> list() const override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<Event>> logs_;
};

// One `<session_id>.jsonl` file per session under `dir`.
class FileEventStore final : public EventStore {
 public:
  explicit FileEventStore(std::filesystem::path dir);

  void append(const std::string& session_id, std::span<const Event> events) override;
  std::vector<Event> load(const std::string& session_id) const override;
  bool exists(const std::string& session_id) const override;
  std::vector<std::string> list() const override;

  std::filesystem::path path_for(const std::string& session_id) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

std::string to_json(const SessionView& view);
std::string to_json(const SessionSummary& summary);
std::string to_json(const RevealRecord& reveal);

}  // namespace trustcal::service

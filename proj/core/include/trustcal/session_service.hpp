#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>

#include "trustcal/event_log.hpp"
#include "trustcal/session.hpp"

namespace trustcal::service {

using Clock = std::function<std::int64_t()>;

// Milliseconds since the Unix epoch from the system clock.
std::int64_t system_now_ms();

struct ServiceConfig {
  ProtocolConfig protocol;
  std::chrono::milliseconds session_timeout = std::chrono::minutes(30);
};

struct TrustActionResponse {
  std::uint64_t acknowledged_sequence = 0;
  RevealRecord reveal;
  SessionView view;
};

std::string to_json(const TrustActionResponse& response);

// Live session manager. The event store is the source of truth; each
// session keeps an in-memory engine as a cache that can always be rebuilt
// from its log. Writes to one session are serialized.
class SessionService {
 public:
  SessionService(std::shared_ptr<EventStore> store, ServiceConfig config,
                 Clock clock = system_now_ms);

  std::string create_session(ConditionId condition, const std::string& participant_id,
                             std::optional<std::uint64_t> seed = std::nullopt);
  // Same as above but validates a free-form condition name first (422).
  std::string create_session(std::string_view condition_name, const std::string& participant_id,
                             std::optional<std::uint64_t> seed = std::nullopt);

  SessionView get_view(const std::string& session_id);
  SessionSummary get_summary(const std::string& session_id);

  SessionView move(const std::string& session_id, game::Direction direction);
  std::pair<Points, SessionView> select_target(const std::string& session_id, game::TargetId id);
  SessionView answer_manipulation(const std::string& session_id, int question_id, int answer);
  TrustActionResponse submit_trust_action(const std::string& session_id, int round,
                                          TrustAction action);

  // Fresh fold of the stored log, bypassing the cache.
  SessionState rebuild_from_log(const std::string& session_id) const;
  // Copy of the cached live state.
  SessionState live_state(const std::string& session_id);

  // Drops the in-memory cache; state is reloaded from the store on demand.
  void evict_cache();

  static std::string session_id_for(ConditionId condition, const std::string& participant_id);

  EventStore& store() { return *store_; }
  const ServiceConfig& config() const { return config_; }

 private:
  struct Slot {
    std::mutex mutex;
    std::optional<SessionEngine> engine;
  };

  std::shared_ptr<Slot> slot_for(const std::string& session_id, bool create = false);
  SessionEngine& engine_for(Slot& slot, const std::string& session_id);
  bool expired(const SessionState& state) const;
  void check_writable(const SessionState& state) const;

  template <typename Command>
  std::vector<Event> mutate(const std::string& session_id, Slot& slot, Command&& command);

  std::shared_ptr<EventStore> store_;
  ServiceConfig config_;
  Clock clock_;
  mutable std::shared_mutex slots_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
};

}  // namespace trustcal::service

#include "trustcal/session_service.hpp"

#include <chrono>
#include <cstdio>

#include <json.hpp>

#include "trustcal/errors.hpp"

namespace trustcal::service {

using nlohmann::json;

std::int64_t system_now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string to_json(const TrustActionResponse& response) {
  json doc{{"acknowledged_sequence", response.acknowledged_sequence},
           {"reveal", json::parse(to_json(response.reveal))},
           {"view", json::parse(to_json(response.view))}};
  return doc.dump();
}

SessionService::SessionService(std::shared_ptr<EventStore> store, ServiceConfig config, Clock clock)
    : store_(std::move(store)), config_(std::move(config)), clock_(std::move(clock)) {
  config_.protocol.validate();
}

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::string SessionService::session_id_for(ConditionId condition, const std::string& participant_id) {
  const std::uint64_t h = derive_seed(fnv1a(participant_id), static_cast<std::uint64_t>(condition));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(to_string(condition)) + "-" + buf;
}

std::shared_ptr<SessionService::Slot> SessionService::slot_for(const std::string& session_id,
                                                               bool create) {
  {
    std::shared_lock lock(slots_mutex_);
    auto it = slots_.find(session_id);
    if (it != slots_.end()) return it->second;
  }
  // Unknown ids never get a slot, so probing cannot grow the cache.
  if (!create && !store_->exists(session_id)) throw NotFound("unknown session " + session_id);
  std::unique_lock lock(slots_mutex_);
  auto& slot = slots_[session_id];
  if (!slot) slot = std::make_shared<Slot>();
  return slot;
}

SessionEngine& SessionService::engine_for(Slot& slot, const std::string& session_id) {
  if (!slot.engine) {
    if (!store_->exists(session_id)) throw NotFound("unknown session " + session_id);
    slot.engine = SessionEngine::replay(store_->load(session_id));
  }
  return *slot.engine;
}

bool SessionService::expired(const SessionState& state) const {
  return !state.completed && clock_() - state.last_timestamp_ms > config_.session_timeout.count();
}

void SessionService::check_writable(const SessionState& state) const {
  if (expired(state)) throw Conflict("session " + state.session_id + " expired after inactivity");
}

template <typename Command>
std::vector<Event> SessionService::mutate(const std::string& session_id, Slot& slot,
                                          Command&& command) {
  SessionEngine& engine = engine_for(slot, session_id);
  check_writable(engine.state());
  std::vector<Event> fresh;
  try {
    fresh = command(engine, clock_());
  } catch (const DomainError& e) {
    // A rejected fold leaves the cached engine unusable; reload from the log.
    slot.engine.reset();
    throw ValidationError(e.what());
  }
  try {
    store_->append(session_id, fresh);
  } catch (...) {
    slot.engine.reset();
    throw;
  }
  return fresh;
}

std::string SessionService::create_session(ConditionId condition, const std::string& participant_id,
                                           std::optional<std::uint64_t> seed) {
  if (participant_id.empty()) throw ValidationError("participant_id must not be empty");
  const std::string id = session_id_for(condition, participant_id);
  auto slot = slot_for(id, true);
  std::lock_guard lock(slot->mutex);
  if (slot->engine || store_->exists(id)) {
    throw Conflict("participant " + participant_id + " already has a " +
                   std::string(to_string(condition)) + " session");
  }
  const std::uint64_t session_seed = seed.value_or(derive_seed(fnv1a(id), 0));
  SessionEngine engine =
      SessionEngine::create(id, participant_id, condition, session_seed, config_.protocol, clock_());
  store_->append(id, engine.events());
  slot->engine = std::move(engine);
  return id;
}

std::string SessionService::create_session(std::string_view condition_name,
                                           const std::string& participant_id,
                                           std::optional<std::uint64_t> seed) {
  ConditionId condition;
  try {
    condition = parse_condition(condition_name);
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  return create_session(condition, participant_id, seed);
}

SessionView SessionService::get_view(const std::string& session_id) {
  auto slot = slot_for(session_id);
  std::lock_guard lock(slot->mutex);
  const SessionState& state = engine_for(*slot, session_id).state();
  SessionView view = make_view(state);
  view.expired = expired(state);
  return view;
}

SessionSummary SessionService::get_summary(const std::string& session_id) {
  auto slot = slot_for(session_id);
  std::lock_guard lock(slot->mutex);
  const SessionState& state = engine_for(*slot, session_id).state();
  SessionSummary summary = make_summary(state);
  summary.expired = expired(state);
  return summary;
}

SessionView SessionService::move(const std::string& session_id, game::Direction direction) {
  auto slot = slot_for(session_id);
  std::lock_guard lock(slot->mutex);
  mutate(session_id, *slot, [&](SessionEngine& e, std::int64_t now) { return e.move(direction, now); });
  return make_view(slot->engine->state());
}

std::pair<Points, SessionView> SessionService::select_target(const std::string& session_id,
                                                             game::TargetId id) {
  auto slot = slot_for(session_id);
  std::lock_guard lock(slot->mutex);
  auto events = mutate(session_id, *slot,
                       [&](SessionEngine& e, std::int64_t now) { return e.select_target(id, now); });
  const Points delta = std::get<TargetSelected>(events.front().payload).delta;
  return {delta, make_view(slot->engine->state())};
}

SessionView SessionService::answer_manipulation(const std::string& session_id, int question_id,
                                                int answer) {
  auto slot = slot_for(session_id);
  std::lock_guard lock(slot->mutex);
  mutate(session_id, *slot, [&](SessionEngine& e, std::int64_t now) {
    return e.answer_manipulation(question_id, answer, now);
  });
  return make_view(slot->engine->state());
}

TrustActionResponse SessionService::submit_trust_action(const std::string& session_id, int round,
                                                        TrustAction action) {
  auto slot = slot_for(session_id);
  std::lock_guard lock(slot->mutex);
  auto events = mutate(session_id, *slot, [&](SessionEngine& e, std::int64_t now) {
    return e.submit_trust_action(round, action, now);
  });
  const SessionState& state = slot->engine->state();
  TrustActionResponse response;
  response.acknowledged_sequence = events.front().sequence;
  for (const RevealRecord& r : state.reveals) {
    if (r.round == round) response.reveal = r;
  }
  response.view = make_view(state);
  return response;
}

SessionState SessionService::rebuild_from_log(const std::string& session_id) const {
  if (!store_->exists(session_id)) throw NotFound("unknown session " + session_id);
  const std::vector<Event> events = store_->load(session_id);
  return rebuild(events);
}

SessionState SessionService::live_state(const std::string& session_id) {
  auto slot = slot_for(session_id);
  std::lock_guard lock(slot->mutex);
  return engine_for(*slot, session_id).state();
}

void SessionService::evict_cache() {
  std::unique_lock lock(slots_mutex_);
  slots_.clear();
}

}  // namespace trustcal::service

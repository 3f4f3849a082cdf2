#include "trustcal/event_log.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "trustcal/errors.hpp"

namespace trustcal::service {

using nlohmann::json;

namespace {

json cell_json(game::Cell c) { return json::array({c.x, c.y}); }

game::Cell cell_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

template <typename Range>
json cells_json(const Range& cells) {
  json out = json::array();
  for (game::Cell c : cells) out.push_back(cell_json(c));
  return out;
}

game::CellSet cell_set_from(const json& j) {
  game::CellSet out;
  for (const json& c : j) out.insert(cell_from(c));
  return out;
}

json placed_json(const std::vector<game::PlacedTarget>& targets) {
  json out = json::array();
  for (const auto& t : targets) {
    out.push_back({{"cell", cell_json(t.position)}, {"kind", game::to_string(t.kind)}});
  }
  return out;
}

std::vector<game::PlacedTarget> placed_from(const json& j) {
  std::vector<game::PlacedTarget> out;
  for (const json& t : j) {
    out.push_back({cell_from(t.at("cell")), game::parse_target_kind(t.at("kind").get<std::string>())});
  }
  return out;
}

json tcc_json(const policy::Tcc& cue) {
  return {{"kind", to_string(cue.kind)}, {"text", cue.text}, {"round", cue.round_number}};
}

policy::Tcc tcc_from(const json& j) {
  return {parse_cue_kind(j.at("kind").get<std::string>()), j.at("text").get<std::string>(),
          j.at("round").get<int>()};
}

json protocol_json(const ProtocolConfig& p) {
  const game::LayoutConfig& l = p.layout;
  return {{"layout",
           {{"width", l.width},
            {"height", l.height},
            {"obstacles", cells_json(l.obstacles)},
            {"human_gold", l.human_gold},
            {"human_red", l.human_red},
            {"robot_radius", l.robot_radius},
            {"human_start", cell_json(l.human_start)}}},
          {"step_budget", p.step_budget},
          {"human_radius", p.human_radius},
          {"manipulation_after_rounds", p.manipulation_after_rounds},
          {"catalog",
           {{"start_round", p.catalog.start_round},
            {"repair", p.catalog.repair},
            {"dampen", p.catalog.dampen}}}};
}

ProtocolConfig protocol_from(const json& j) {
  ProtocolConfig p;
  const json& l = j.at("layout");
  p.layout.width = l.at("width").get<int>();
  p.layout.height = l.at("height").get<int>();
  p.layout.obstacles = cell_set_from(l.at("obstacles"));
  p.layout.human_gold = l.at("human_gold").get<int>();
  p.layout.human_red = l.at("human_red").get<int>();
  p.layout.robot_radius = l.at("robot_radius").get<int>();
  p.layout.human_start = cell_from(l.at("human_start"));
  p.step_budget = j.at("step_budget").get<int>();
  p.human_radius = j.at("human_radius").get<int>();
  p.manipulation_after_rounds = j.at("manipulation_after_rounds").get<std::vector<int>>();
  const json& c = j.at("catalog");
  p.catalog.start_round = c.at("start_round").get<int>();
  p.catalog.repair = c.at("repair").get<std::vector<std::string>>();
  p.catalog.dampen = c.at("dampen").get<std::vector<std::string>>();
  return p;
}

json payload_json(const EventPayload& payload) {
  return std::visit(
      [](const auto& e) -> json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, SessionCreated>) {
          return {{"participant_id", e.participant_id},
                  {"condition", to_string(e.condition)},
                  {"seed", e.seed},
                  {"protocol", protocol_json(e.protocol)}};
        } else if constexpr (std::is_same_v<T, RoundStarted>) {
          return {{"round", e.layout.round_number},
                  {"robot_cells", cells_json(e.layout.robot_cells)},
                  {"robot_targets", placed_json(e.layout.robot_targets)},
                  {"human_targets", placed_json(e.layout.human_targets)}};
        } else if constexpr (std::is_same_v<T, HumanMoved>) {
          return {{"round", e.round}, {"direction", game::to_string(e.direction)}, {"to", cell_json(e.to)}};
        } else if constexpr (std::is_same_v<T, TargetSelected>) {
          return {{"round", e.round}, {"target_id", e.target_id}, {"delta", e.delta}};
        } else if constexpr (std::is_same_v<T, TccDelivered>) {
          return tcc_json(e.cue);
        } else if constexpr (std::is_same_v<T, TrustActionSubmitted>) {
          return {{"round", e.round}, {"action", to_string(e.action)}};
        } else if constexpr (std::is_same_v<T, RoundRevealed>) {
          return {{"round", e.round},
                  {"gold", e.gold},
                  {"red", e.red},
                  {"robot_score", e.robot_score},
                  {"robot_targets", placed_json(e.robot_targets)},
                  {"team_score_after", e.team_score_after}};
        } else if constexpr (std::is_same_v<T, ManipulationAnswered>) {
          return {{"question_id", e.question_id}, {"answer", e.answer}, {"correct", e.correct}};
        } else {
          return {{"team_score", e.team_score}};
        }
      },
      payload);
}

EventPayload payload_from(std::string_view type, const json& d) {
  if (type == "SessionCreated") {
    return SessionCreated{d.at("participant_id").get<std::string>(),
                          parse_condition(d.at("condition").get<std::string>()),
                          d.at("seed").get<std::uint64_t>(), protocol_from(d.at("protocol"))};
  }
  if (type == "RoundStarted") {
    game::RoundLayout layout;
    layout.round_number = d.at("round").get<int>();
    layout.robot_cells = cell_set_from(d.at("robot_cells"));
    layout.robot_targets = placed_from(d.at("robot_targets"));
    layout.human_targets = placed_from(d.at("human_targets"));
    return RoundStarted{std::move(layout)};
  }
  if (type == "HumanMoved") {
    return HumanMoved{d.at("round").get<int>(),
                      game::parse_direction(d.at("direction").get<std::string>()),
                      cell_from(d.at("to"))};
  }
  if (type == "TargetSelected") {
    return TargetSelected{d.at("round").get<int>(), d.at("target_id").get<game::TargetId>(),
                          d.at("delta").get<Points>()};
  }
  if (type == "TccDelivered") return TccDelivered{tcc_from(d)};
  if (type == "TrustActionSubmitted") {
    return TrustActionSubmitted{d.at("round").get<int>(),
                                parse_trust_action(d.at("action").get<std::string>())};
  }
  if (type == "RoundRevealed") {
    return RoundRevealed{d.at("round").get<int>(),          d.at("gold").get<int>(),
                         d.at("red").get<int>(),            d.at("robot_score").get<Points>(),
                         placed_from(d.at("robot_targets")), d.at("team_score_after").get<Points>()};
  }
  if (type == "ManipulationAnswered") {
    return ManipulationAnswered{d.at("question_id").get<int>(), d.at("answer").get<int>(),
                                d.at("correct").get<bool>()};
  }
  if (type == "SessionCompleted") return SessionCompleted{d.at("team_score").get<Points>()};
  throw ConfigError("unknown event type: " + std::string(type));
}

json reveal_json(const RevealRecord& r) {
  return {{"round", r.round},
          {"action", to_string(r.action)},
          {"gold", r.gold},
          {"red", r.red},
          {"robot_score", r.robot_score},
          {"robot_targets", placed_json(r.robot_targets)},
          {"team_score_after", r.team_score_after},
          {"tcc", r.tcc ? tcc_json(*r.tcc) : json(nullptr)}};
}

json header_json(std::string_view session_id) {
  return {{"format", kLogFormat}, {"version", kLogVersion}, {"session_id", session_id}};
}

}  // namespace

std::string serialize_event(const Event& event) {
  return json{{"seq", event.sequence},
              {"ts", event.timestamp_ms},
              {"session_id", event.session_id},
              {"type", event_type(event.payload)},
              {"data", payload_json(event.payload)}}
      .dump();
}

Event parse_event(std::string_view line) {
  try {
    json j = json::parse(line);
    Event e;
    e.sequence = j.at("seq").get<std::uint64_t>();
    e.timestamp_ms = j.at("ts").get<std::int64_t>();
    e.session_id = j.at("session_id").get<std::string>();
    e.payload = payload_from(j.at("type").get<std::string>(), j.at("data"));
    return e;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("malformed event: ") + ex.what());
  } catch (const DomainError& ex) {
    throw ConfigError(std::string("malformed event: ") + ex.what());
  }
}

std::string write_log(std::string_view session_id, std::span<const Event> events) {
  std::string out = header_json(session_id).dump();
  out += '\n';
  for (const Event& e : events) {
    out += serialize_event(e);
    out += '\n';
  }
  return out;
}

std::vector<Event> read_log(std::istream& in) {
  std::string line;
  bool header_seen = false;
  std::vector<Event> events;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!header_seen) {
      json h;
      try {
        h = json::parse(line);
      } catch (const json::exception& ex) {
        throw ConfigError(std::string("malformed log header: ") + ex.what());
      }
      if (h.value("format", "") != kLogFormat) throw ConfigError("not a trustcal session log");
      if (h.value("version", 0) != kLogVersion) {
        throw ConfigError("unsupported session log version " + std::to_string(h.value("version", 0)));
      }
      header_seen = true;
      continue;
    }
    events.push_back(parse_event(line));
  }
  if (!header_seen) throw ConfigError("session log is missing its header record");
  return events;
}

std::vector<Event> parse_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_log(in);
}

std::vector<Event> load_log_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open session log " + path.string());
  return read_log(in);
}

void MemoryEventStore::append(const std::string& session_id, std::span<const Event> events) {
  std::lock_guard lock(mutex_);
  auto& log = logs_[session_id];
  log.insert(log.end(), events.begin(), events.end());
}

std::vector<Event> MemoryEventStore::load(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = logs_.find(session_id);
  if (it == logs_.end()) throw NotFound("unknown session " + session_id);
  return it->second;
}

bool MemoryEventStore::exists(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  return logs_.contains(session_id);
}

std::vector<std::string> MemoryEventStore::list() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : logs_) ids.push_back(id);
  return ids;
}

FileEventStore::FileEventStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path FileEventStore::path_for(const std::string& session_id) const {
  return dir_ / (session_id + ".jsonl");
}

void FileEventStore::append(const std::string& session_id, std::span<const Event> events) {
  std::lock_guard lock(mutex_);
  const auto path = path_for(session_id);
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for append");
  if (fresh) out << header_json(session_id).dump() << '\n';
  for (const Event& e : events) out << serialize_event(e) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<Event> FileEventStore::load(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  const auto path = path_for(session_id);
  if (!std::filesystem::exists(path)) throw NotFound("unknown session " + session_id);
  return load_log_file(path);
}

bool FileEventStore::exists(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  return std::filesystem::exists(path_for(session_id));
}

std::vector<std::string> FileEventStore::list() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string to_json(const RevealRecord& reveal) { return reveal_json(reveal).dump(); }

std::string to_json(const SessionView& v) {
  json targets = json::array();
  for (const VisibleTarget& t : v.own_targets) {
    targets.push_back({{"id", t.id},
                       {"cell", cell_json(t.position)},
                       {"kind", game::to_string(t.kind)},
                       {"selected", t.selected}});
  }
  json reveals = json::array();
  for (const RevealRecord& r : v.reveals) reveals.push_back(reveal_json(r));
  json question = nullptr;
  if (v.pending_question) {
    question = {{"id", v.pending_question->id},
                {"text", v.pending_question->text},
                {"choices", v.pending_question->choices}};
  }
  return json{{"session_id", v.session_id},
              {"participant_id", v.participant_id},
              {"condition", to_string(v.condition)},
              {"round", v.round},
              {"total_rounds", v.total_rounds},
              {"awaiting", to_string(v.awaiting)},
              {"team_score", v.team_score},
              {"steps_left", v.steps_left},
              {"width", v.width},
              {"height", v.height},
              {"human_position", cell_json(v.human_position)},
              {"obstacles", cells_json(v.obstacles)},
              {"searched_by_human", cells_json(v.searched_by_human)},
              {"searched_by_robot", cells_json(v.searched_by_robot)},
              {"own_targets", targets},
              {"pending_cue", v.pending_cue ? tcc_json(*v.pending_cue) : json(nullptr)},
              {"pending_question", question},
              {"reveals", reveals},
              {"expired", v.expired}}
      .dump();
}

std::string to_json(const SessionSummary& m) {
  json rounds = json::array();
  for (const RevealRecord& r : m.rounds) rounds.push_back(reveal_json(r));
  return json{{"session_id", m.session_id},
              {"participant_id", m.participant_id},
              {"condition", to_string(m.condition)},
              {"completed", m.completed},
              {"expired", m.expired},
              {"team_score", m.team_score},
              {"rounds", rounds},
              {"manipulation_results", m.manipulation_results},
              {"excluded", m.excluded}}
      .dump();
}

}  // namespace trustcal::service

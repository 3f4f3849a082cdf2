#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "trustcal/curves.hpp"
#include "trustcal/errors.hpp"
#include "trustcal/event_log.hpp"
#include "trustcal/experiment.hpp"
#include "trustcal/fit.hpp"
#include "trustcal/http_api.hpp"
#include "trustcal/policy.hpp"
#include "trustcal/session_service.hpp"
#include "trustcal/trajectory_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trustcal;

namespace {

// Settings resolved from the config file, then overridden by flags.
struct Settings {
  sim::PopulationSpec population;
  ProtocolConfig protocol;
  trust::FitConfig fit;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

Settings load_settings(const std::string& config_path) {
  Settings s;
  if (config_path.empty()) return s;
  const fs::path base = fs::path(config_path).parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  json j;
  try {
    j = json::parse(read_file(config_path));
    if (j.contains("population")) {
      const json& p = j.at("population");
      s.population.count = p.value("count", s.population.count);
      s.population.master_seed = p.value("seed", s.population.master_seed);
      s.population.jitter = p.value("jitter", s.population.jitter);
      if (p.contains("preset_file")) {
        s.population.preset = sim::load_preset(resolve(p.at("preset_file").get<std::string>()));
      }
    }
    if (j.contains("protocol")) {
      const json& p = j.at("protocol");
      s.protocol.step_budget = p.value("step_budget", s.protocol.step_budget);
      s.protocol.human_radius = p.value("human_radius", s.protocol.human_radius);
      s.protocol.layout.robot_radius = p.value("robot_radius", s.protocol.layout.robot_radius);
      s.protocol.layout.human_gold = p.value("human_gold", s.protocol.layout.human_gold);
      s.protocol.layout.human_red = p.value("human_red", s.protocol.layout.human_red);
      if (p.contains("manipulation_after_rounds")) {
        s.protocol.manipulation_after_rounds = p.at("manipulation_after_rounds").get<std::vector<int>>();
      }
      if (p.contains("cue_catalog_file")) {
        s.protocol.catalog = policy::load_cue_catalog(resolve(p.at("cue_catalog_file").get<std::string>()));
      }
    }
    if (j.contains("policy_file")) {
      // Parsed for validation; the simulated protocol's cue plan is fixed per condition.
      policy::load_policy_config(resolve(j.at("policy_file").get<std::string>()));
    }
    if (j.contains("fit")) {
      const json& f = j.at("fit");
      s.fit.grid_points = f.value("grid_points", s.fit.grid_points);
      s.fit.max_iterations = f.value("max_iterations", s.fit.max_iterations);
      s.fit.tolerance = f.value("tolerance", s.fit.tolerance);
      if (f.contains("objective")) s.fit.objective = trust::parse_fit_objective(f.at("objective").get<std::string>());
      s.fit.fit_tcc_weights = f.value("fit_tcc_weights", s.fit.fit_tcc_weights);
    }
    if (j.contains("trust_params")) {
      s.fit.tcc_decay = j.at("trust_params").value("tcc_decay", s.fit.tcc_decay);
    }
  } catch (const json::exception& e) {
    throw ConfigError("config " + config_path + ": " + e.what());
  }
  s.protocol.validate();
  return s;
}

// Every *.jsonl log under `path`, or `path` itself when it is a file.
std::vector<fs::path> log_files(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("no such file or directory: " + path);
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no session logs in " + path);
  return files;
}

std::vector<ConditionId> conditions_from(const std::string& name) {
  if (name == "all") return {std::begin(kAllConditions), std::end(kAllConditions)};
  try {
    return {parse_condition(name)};
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string condition = "all";
  std::optional<std::size_t> population;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string preset;
  unsigned threads = 0;
};

int run_simulate(const Settings& base, const SimulateArgs& args) {
  sim::PopulationSpec spec = base.population;
  if (args.population) spec.count = *args.population;
  if (args.seed) spec.master_seed = *args.seed;
  if (!args.preset.empty()) spec.preset = sim::load_preset(args.preset);

  fs::create_directories(args.out_dir);
  for (ConditionId id : conditions_from(args.condition)) {
    const auto result = experiment::run_condition(Condition::standard(id), spec, base.protocol, args.threads);
    for (std::size_t i = 0; i < result.sessions.size(); ++i) {
      const std::string& sid = result.sessions[i].session_id;
      write_output((fs::path(args.out_dir) / (sid + ".jsonl")).string(),
                   service::write_log(sid, result.logs[i]));
    }
    const auto kept = experiment::apply_exclusions(result.sessions);
    const auto retained = std::count_if(kept.begin(), kept.end(), experiment::counts_toward_curves);
    std::printf("%s: %zu sessions, %ld retained\n", std::string(to_string(id)).c_str(),
                result.sessions.size(), static_cast<long>(retained));
  }
  return 0;
}

// ---------------------------------------------------------------------------

std::vector<experiment::Session> sessions_in(const std::string& path) {
  std::vector<experiment::Session> out;
  for (const fs::path& file : log_files(path)) {
    out.push_back(experiment::session_from_log(service::load_log_file(file)));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.session_id < b.session_id; });
  return out;
}

int run_aggregate(const std::string& log_dir, const std::string& format_name, const std::string& out) {
  const experiment::CurveFormat format = experiment::parse_curve_format(format_name);
  std::map<ConditionId, std::vector<experiment::Session>> by_condition;
  for (auto& s : sessions_in(log_dir)) by_condition[s.condition].push_back(std::move(s));

  std::vector<experiment::TrustCurve> curves;
  for (auto& [id, sessions] : by_condition) {
    auto curve = experiment::trust_curve(std::string(to_string(id)), experiment::apply_exclusions(sessions));
    if (!curve.points.empty()) curves.push_back(std::move(curve));
  }
  if (curves.empty()) throw DomainError("no retained, completed sessions in " + log_dir);
  write_output(out, experiment::export_curves(curves, format));
  return 0;
}

// ---------------------------------------------------------------------------

int run_fit(trust::FitConfig config, const std::string& log, bool online, const std::string& out) {
  json results = json::array();
  for (const auto& session : sessions_in(log)) {
    const auto trajectory = experiment::trajectory_of(session);
    json entry{{"session_id", session.session_id},
               {"participant_id", session.participant_id},
               {"condition", to_string(session.condition)},
               {"rounds", trajectory.size()}};
    if (trajectory.empty()) {
      entry["error"] = "no completed rounds";
      results.push_back(entry);
      continue;
    }
    const auto result = trust::fit(trajectory, config);
    entry["fit"] = json::parse(trust::fit_report_json(result, config));
    if (online) {
      json steps = json::array();
      for (const auto& r : trust::fit_online(trajectory, config)) {
        steps.push_back(json::parse(trust::params_to_json(r.params)));
        steps.back()["rmse"] = r.rmse;
      }
      entry["online"] = steps;
    }
    results.push_back(entry);
  }
  write_output(out, results.dump(2));
  return 0;
}

// ---------------------------------------------------------------------------

int run_replay(const std::string& log, const std::string& out) {
  experiment::ReplayReport report;
  for (const fs::path& file : log_files(log)) {
    std::vector<service::Event> events;
    try {
      events = service::load_log_file(file);
    } catch (const ConfigError& e) {
      report.issues.push_back({file.stem().string(), 0, e.what()});
      continue;
    }
    experiment::validate_log(events, report);
    // The engine's own fold must accept the log as well.
    try {
      service::rebuild(events);
    } catch (const std::exception& e) {
      report.issues.push_back({file.stem().string(), 0, std::string("fold rejected: ") + e.what()});
    }
  }
  write_output(out, experiment::to_json(report));
  if (!report.ok()) {
    std::fprintf(stderr, "replay: %zu issue(s) found\n", report.issues.size());
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------

std::atomic<service::HttpServer*> g_server{nullptr};

extern "C" void on_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

int run_serve(const Settings& base, const std::string& log_dir, const std::string& host, int port) {
  service::ServiceConfig config;
  config.protocol = base.protocol;
  service::SessionService svc(std::make_shared<service::FileEventStore>(log_dir), config);
  service::HttpApi api(svc);
  service::HttpServer server(api);
  const int bound = server.bind(host, port);
  if (bound < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  std::printf("listening on %s:%d, logs in %s\n", host.c_str(), bound, log_dir.c_str());
  std::fflush(stdout);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust calibration experiment tools"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Run simulated participants and write session logs");
  simulate->add_option("--condition", sim_args.condition, "Condition name or 'all'");
  simulate->add_option("--population", sim_args.population, "Participants per condition");
  simulate->add_option("--seed", sim_args.seed, "Master seed");
  simulate->add_option("--out-dir", sim_args.out_dir, "Directory for session logs")->required();
  simulate->add_option("--preset", sim_args.preset, "Simulated participant preset file")->check(CLI::ExistingFile);
  simulate->add_option("--threads", sim_args.threads, "Worker threads (0 = all cores)");

  std::string agg_dir;
  std::string agg_format = "csv";
  std::string agg_out;
  auto* aggregate = app.add_subcommand("aggregate", "Compute per-round trust curves from session logs");
  aggregate->add_option("--log-dir", agg_dir, "Directory of session logs")->required();
  aggregate->add_option("--format", agg_format, "csv or json");
  aggregate->add_option("--out", agg_out, "Output file (default stdout)");

  std::string fit_log;
  std::string fit_out;
  bool fit_online_flag = false;
  std::optional<std::string> fit_objective;
  std::optional<int> fit_grid;
  std::optional<unsigned> fit_threads;
  bool fit_tcc = false;
  auto* fit = app.add_subcommand("fit", "Fit trust parameters per participant");
  fit->add_option("--log", fit_log, "Session log file or directory")->required();
  fit->add_option("--out", fit_out, "Output file (default stdout)");
  fit->add_flag("--online", fit_online_flag, "Also refit after every round");
  fit->add_option("--objective", fit_objective, "rmse or loglik");
  fit->add_option("--grid-points", fit_grid, "Grid points per axis");
  fit->add_option("--threads", fit_threads, "Worker threads (0 = all cores)");
  fit->add_flag("--fit-tcc-weights", fit_tcc, "Fit cue weights in the refinement stage");

  std::string replay_log;
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "Validate session logs by independent replay");
  replay->add_option("--log", replay_log, "Session log file or directory")->required();
  replay->add_option("--out", replay_out, "Report file (default stdout)");

  std::string serve_dir = "sessions";
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the session HTTP service");
  serve->add_option("--log-dir", serve_dir, "Directory for session logs");
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--port", serve_port, "Port (0 picks a free one)");

  CLI11_PARSE(app, argc, argv);

  try {
    const Settings settings = load_settings(config_path);
    if (*simulate) return run_simulate(settings, sim_args);
    if (*aggregate) return run_aggregate(agg_dir, agg_format, agg_out);
    if (*fit) {
      trust::FitConfig config = settings.fit;
      if (fit_objective) config.objective = trust::parse_fit_objective(*fit_objective);
      if (fit_grid) config.grid_points = *fit_grid;
      if (fit_threads) config.threads = *fit_threads;
      if (fit_tcc) config.fit_tcc_weights = true;
      return run_fit(config, fit_log, fit_online_flag, fit_out);
    }
    if (*replay) return run_replay(replay_log, replay_out);
    if (*serve) return run_serve(settings, serve_dir, serve_host, serve_port);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

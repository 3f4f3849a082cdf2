#include "trustcal/http_api.hpp"

#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "trustcal/errors.hpp"

namespace trustcal::service {

using nlohmann::json;

namespace {

HttpResponse error(int status, const std::string& message) {
  return {status, json{{"error", message}, {"status", status}}.dump()};
}

json parse_body(const std::string& body) {
  try {
    json j = body.empty() ? json::object() : json::parse(body);
    if (!j.is_object()) throw ValidationError("request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

template <typename T>
T field(const json& body, const char* name) {
  if (!body.contains(name)) throw ValidationError(std::string("missing field: ") + name);
  try {
    return body.at(name).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("wrong type for field: ") + name);
  }
}

}  // namespace

HttpResponse HttpApi::handle(const HttpRequest& request) {
  static const std::regex session_route(R"(^/sessions/([A-Za-z0-9_\-]+)(/[a-z\-]+)?$)");
  try {
    if (request.path == "/conditions") {
      if (request.method != "GET") return error(405, "method not allowed");
      json list = json::array();
      for (ConditionId id : kAllConditions) list.push_back(to_string(id));
      return {200, json{{"conditions", list}}.dump()};
    }
    if (request.path == "/sessions") {
      if (request.method != "POST") return error(405, "method not allowed");
      json body = parse_body(request.body);
      std::optional<std::uint64_t> seed;
      if (body.contains("seed")) seed = field<std::uint64_t>(body, "seed");
      const std::string id = service_.create_session(field<std::string>(body, "condition"),
                                                     field<std::string>(body, "participant_id"), seed);
      return {201, json{{"session_id", id}}.dump()};
    }

    std::smatch m;
    if (!std::regex_match(request.path, m, session_route)) return error(404, "no such route");
    const std::string id = m[1].str();
    const std::string action = m[2].matched ? m[2].str() : "";

    if (action.empty() && request.method == "GET") return {200, to_json(service_.get_view(id))};
    if (action == "/summary" && request.method == "GET") {
      return {200, to_json(service_.get_summary(id))};
    }
    if (request.method != "POST") return error(405, "method not allowed");

    json body = parse_body(request.body);
    if (action == "/move") {
      game::Direction d;
      try {
        d = game::parse_direction(field<std::string>(body, "direction"));
      } catch (const DomainError& e) {
        throw ValidationError(e.what());
      }
      return {200, to_json(service_.move(id, d))};
    }
    if (action == "/select") {
      auto [delta, view] = service_.select_target(id, field<game::TargetId>(body, "target_id"));
      json out = json::parse(to_json(view));
      out["delta"] = delta;
      return {200, out.dump()};
    }
    if (action == "/manipulation") {
      return {200, to_json(service_.answer_manipulation(id, field<int>(body, "question_id"),
                                                        field<int>(body, "answer")))};
    }
    if (action == "/trust-action") {
      TrustAction a;
      try {
        a = parse_trust_action(field<std::string>(body, "action"));
      } catch (const DomainError& e) {
        throw ValidationError(e.what());
      }
      return {200, to_json(service_.submit_trust_action(id, field<int>(body, "round"), a))};
    }
    return error(404, "no such route");
  } catch (const ServiceError& e) {
    return error(e.status(), e.what());
  } catch (const ConfigError& e) {
    return error(422, e.what());
  } catch (const DomainError& e) {
    return error(422, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

struct HttpServer::Impl {
  explicit Impl(HttpApi& api) : api(api) {}
  HttpApi& api;
  httplib::Server server;
};

HttpServer::HttpServer(HttpApi& api) : impl_(std::make_unique<Impl>(api)) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    HttpResponse out = impl_->api.handle({req.method, req.path, req.body});
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  impl_->server.Get(R"(/.*)", forward);
  impl_->server.Post(R"(/.*)", forward);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace trustcal::service

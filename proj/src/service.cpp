#include "scengen/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "detail/json_read.hpp"

namespace scengen {

namespace {

using detail::ojson;
using BodyReader = detail::Reader<SchemaError>;

HttpReply reply(int status, const ojson& body) { return {status, body.dump(2) + "\n"}; }

HttpReply error_reply(int status, std::string_view message) {
  return reply(status, ojson{{"error", std::string(message)}});
}

ojson target_json(const std::optional<std::string>& t) { return t ? ojson(*t) : ojson(nullptr); }

ojson menu_json(const std::vector<MenuItem>& menu) {
  ojson out = ojson::array();
  for (std::size_t i = 0; i < menu.size(); ++i) {
    out.push_back({{"index", i + 1},
                   {"action", menu[i].action},
                   {"target", target_json(menu[i].target)},
                   {"label", menu[i].label}});
  }
  return out;
}

// Pure function of the session (plus the id the client already holds).
ojson session_view(const std::string& id, const std::string& definition_id, const GameSession& s) {
  const GameDefinition& def = s.def();
  const CompiledState& st = def.states[s.current_state];
  ojson roles = ojson::array();
  for (const auto& r : def.roles) {
    ojson pos = nullptr;
    if (s.positions[r.index]) pos = {{"x", s.positions[r.index]->x}, {"y", s.positions[r.index]->y}};
    roles.push_back({{"name", r.name},
                     {"controller", std::string(to_string(r.controller))},
                     {"health", s.health[r.index]},
                     {"position", pos}});
  }
  ojson feedback = ojson::array();
  for (auto it = s.feedback_log.rbegin(); it != s.feedback_log.rend(); ++it) feedback.push_back(*it);
  return {{"session_id", id},
          {"definition_id", definition_id},
          {"scenario", def.scenario_name},
          {"status", std::string(to_string(s.status))},
          {"state",
           {{"name", st.name}, {"kind", std::string(to_string(st.kind))}, {"description", st.description}}},
          {"score", s.score},
          {"turn", s.turn},
          {"health", s.player_health()},
          {"roles", roles},
          {"menu", s.terminal() ? ojson::array() : menu_json(available_actions(s))},
          {"feedback", feedback},
          {"ui",
           {{"show_score", def.ui.show_score},
            {"show_health", def.ui.show_health},
            {"feedback_log_depth", def.ui.feedback_log_depth}}}};
}

std::optional<ojson> parse_body(std::string_view body) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return ojson::object();
  bool ok = false;
  ojson j = detail::parse_json_text(body, ok);
  if (!ok || !j.is_object()) return std::nullopt;
  return j;
}

}  // namespace

GameService::GameService(DefinitionMap definitions, ServiceOptions options)
    : definitions_(std::move(definitions)), options_(std::move(options)) {
  if (!options_.clock) options_.clock = [] { return std::chrono::steady_clock::now(); };
  std::random_device rd;
  id_salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::chrono::steady_clock::time_point GameService::now() const { return options_.clock(); }

std::string GameService::new_id() {
  std::lock_guard lock(id_mutex_);
  // splitmix64 over salt+counter: unique per process, not guessable in sequence.
  std::uint64_t z = id_salt_ + 0x9E3779B97F4A7C15ULL * ++id_counter_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << z << '-' << id_counter_;
  return os.str();
}

std::shared_ptr<GameService::Record> GameService::find(const std::string& id) {
  std::shared_ptr<Record> rec;
  {
    std::shared_lock lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return nullptr;
    rec = it->second;
  }
  std::lock_guard lock(rec->mutex);
  if (now() - rec->last_touched > options_.ttl) {
    std::unique_lock wlock(registry_mutex_);
    sessions_.erase(id);
    return nullptr;
  }
  rec->last_touched = now();
  return rec;
}

HttpReply GameService::list_definitions() const {
  ojson out = ojson::array();
  for (const auto& [id, def] : definitions_) {
    out.push_back({{"id", id},
                   {"scenario", def->scenario_name},
                   {"version", def->version},
                   {"states", def->states.size()},
                   {"transitions", def->transitions.size()}});
  }
  return reply(200, ojson{{"definitions", out}});
}

HttpReply GameService::get_definition(const std::string& id) const {
  auto it = definitions_.find(id);
  if (it == definitions_.end()) return error_reply(404, "unknown definition");
  return {200, emit_bundle(*it->second)};
}

HttpReply GameService::create_session(std::string_view body) {
  auto j = parse_body(body);
  if (!j) return error_reply(400, "body must be a JSON object");
  std::string def_id;
  std::uint64_t seed = 0;
  try {
    def_id = BodyReader::str(BodyReader::field(*j, "definition_id", ""), "/definition_id");
    if (j->contains("seed")) {
      const ojson& s = (*j)["seed"];
      if (s.is_number_unsigned()) seed = s.get<std::uint64_t>();
      else seed = static_cast<std::uint64_t>(BodyReader::integer(s, "/seed"));
    }
  } catch (const SchemaError& e) {
    return error_reply(400, std::string(e.what()) + " at " + e.path());
  }
  auto def = definitions_.find(def_id);
  if (def == definitions_.end()) return error_reply(404, "unknown definition");

  evict_expired();
  auto rec = std::make_shared<Record>();
  rec->definition_id = def_id;
  rec->session = start_session(def->second, seed);
  rec->created_at = rec->last_touched = now();
  const std::string id = new_id();
  ojson view = session_view(id, def_id, rec->session);
  {
    std::unique_lock lock(registry_mutex_);
    sessions_.emplace(id, std::move(rec));
  }
  return reply(201, view);
}

HttpReply GameService::get_session(const std::string& id) {
  auto rec = find(id);
  if (!rec) return error_reply(404, "unknown session");
  std::lock_guard lock(rec->mutex);
  return reply(200, session_view(id, rec->definition_id, rec->session));
}

HttpReply GameService::get_actions(const std::string& id) {
  auto rec = find(id);
  if (!rec) return error_reply(404, "unknown session");
  std::lock_guard lock(rec->mutex);
  if (rec->session.terminal()) return error_reply(409, "session is finished");
  return reply(200, ojson{{"menu", menu_json(available_actions(rec->session))}});
}

HttpReply GameService::apply_action(const std::string& id, std::string_view body) {
  auto j = parse_body(body);
  if (!j) return error_reply(400, "body must be a JSON object");
  std::string action;
  std::optional<std::string> target;
  try {
    action = BodyReader::str(BodyReader::field(*j, "action", ""), "/action");
    if (j->contains("target") && !(*j)["target"].is_null()) {
      target = BodyReader::str((*j)["target"], "/target");
    }
  } catch (const SchemaError& e) {
    return error_reply(400, std::string(e.what()) + " at " + e.path());
  }

  auto rec = find(id);
  if (!rec) return error_reply(404, "unknown session");
  std::lock_guard lock(rec->mutex);
  if (rec->session.terminal()) return error_reply(409, "session is finished");
  const StepResult step = advance(rec->session, action, target);
  ojson view = session_view(id, rec->definition_id, rec->session);
  view["step"] = {{"accepted", step.accepted},
                  {"score_delta", step.score_delta},
                  {"feedback", step.feedback}};
  return reply(200, view);
}

HttpReply GameService::delete_session(const std::string& id) {
  std::unique_lock lock(registry_mutex_);
  if (sessions_.erase(id) == 0) return error_reply(404, "unknown session");
  return {204, ""};
}

std::size_t GameService::evict_expired() {
  const auto t = now();
  std::unique_lock lock(registry_mutex_);
  std::size_t n = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock rlock(it->second->mutex, std::try_to_lock);
    // A locked record is in use, so it is not idle.
    if (rlock.owns_lock() && t - it->second->last_touched > options_.ttl) {
      rlock.unlock();
      it = sessions_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  return n;
}

std::size_t GameService::session_count() const {
  std::shared_lock lock(registry_mutex_);
  return sessions_.size();
}

std::optional<GameSession> GameService::snapshot(const std::string& id) const {
  std::shared_ptr<Record> rec;
  {
    std::shared_lock lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return std::nullopt;
    rec = it->second;
  }
  std::lock_guard lock(rec->mutex);
  return rec->session;
}

void mount_routes(httplib::Server& server, GameService& service) {
  // Keep-alive connections pin a worker each; the library default scales with
  // core count and starves parallel clients on small machines.
  const std::size_t workers = std::max<std::size_t>(kServiceWorkers, std::thread::hardware_concurrency());
  server.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
  server.set_default_headers({{"Access-Control-Allow-Origin", service.options().cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    if (!r.body.empty()) res.set_content(r.body, "application/json");
  };
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Get("/api/definitions", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.list_definitions());
  });
  server.Get(R"(/api/definitions/([^/]+))", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_definition(req.matches[1]));
  });
  server.Post("/api/sessions", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.create_session(req.body));
  });
  server.Get(R"(/api/sessions/([^/]+))", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_session(req.matches[1]));
  });
  server.Delete(R"(/api/sessions/([^/]+))", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.delete_session(req.matches[1]));
  });
  server.Get(R"(/api/sessions/([^/]+)/actions)",
             [&service, send](const httplib::Request& req, httplib::Response& res) {
               send(res, service.get_actions(req.matches[1]));
             });
  server.Post(R"(/api/sessions/([^/]+)/actions)",
              [&service, send](const httplib::Request& req, httplib::Response& res) {
                send(res, service.apply_action(req.matches[1], req.body));
              });
}

int service_port_from_env() {
  if (const char* p = std::getenv("SCENGEN_PORT")) {
    char* end = nullptr;
    const long v = std::strtol(p, &end, 10);
    if (end && *end == '\0' && v > 0 && v < 65536) return static_cast<int>(v);
  }
  return 8080;
}

bool serve_forever(GameService& service, const std::string& host, int port) {
  httplib::Server server;
  mount_routes(server, service);
  return server.listen(host, port);
}

}  // namespace scengen

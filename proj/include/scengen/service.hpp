#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "scengen/compiler.hpp"
#include "scengen/runtime.hpp"

namespace httplib {
class Server;
}

namespace scengen {

struct HttpReply {
  int status = 200;
  std::string body;  // JSON text
};

using ServiceClock = std::function<std::chrono::steady_clock::time_point()>;

struct ServiceOptions {
  std::chrono::seconds ttl{3600};
  ServiceClock clock;                 // defaults to steady_clock::now
  std::string cors_origin = "*";
};

/// In-memory session registry over an immutable set of definitions.
/// Handlers are thread-safe; requests on one session are serialized.
class GameService {
public:
  using DefinitionMap = std::map<std::string, std::shared_ptr<const GameDefinition>>;

  explicit GameService(DefinitionMap definitions, ServiceOptions options = {});

  HttpReply list_definitions() const;
  HttpReply get_definition(const std::string& id) const;
  HttpReply create_session(std::string_view body);
  HttpReply get_session(const std::string& id);
  HttpReply get_actions(const std::string& id);
  HttpReply apply_action(const std::string& id, std::string_view body);
  HttpReply delete_session(const std::string& id);

  /// Drops sessions idle for longer than the TTL; returns how many.
  std::size_t evict_expired();
  std::size_t session_count() const;

  /// Copy of a live session, for tests and tooling.
  std::optional<GameSession> snapshot(const std::string& id) const;

  const ServiceOptions& options() const { return options_; }

private:
  struct Record {
    std::mutex mutex;
    std::string definition_id;
    GameSession session;
    std::chrono::steady_clock::time_point created_at;
    std::chrono::steady_clock::time_point last_touched;
  };

  std::shared_ptr<Record> find(const std::string& id);
  std::string new_id();
  std::chrono::steady_clock::time_point now() const;

  DefinitionMap definitions_;
  ServiceOptions options_;
  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Record>> sessions_;
  std::mutex id_mutex_;
  std::uint64_t id_counter_ = 0;
  std::uint64_t id_salt_ = 0;
};

/// Minimum HTTP worker threads.
inline constexpr std::size_t kServiceWorkers = 32;

/// Registers the /api routes (and CORS preflight) on `server`.
void mount_routes(httplib::Server& server, GameService& service);

/// SCENGEN_PORT or 8080.
int service_port_from_env();

/// Blocks serving on host:port. Returns false if the socket could not be bound.
bool serve_forever(GameService& service, const std::string& host, int port);

}  // namespace scengen

#pragma once

#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "scengen/service.hpp"

namespace testsupport {

/// GameService routes on an ephemeral loopback port for the lifetime of the object.
class LiveServer {
public:
  explicit LiveServer(scengen::GameService& service) {
    scengen::mount_routes(server_, service);
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("cannot bind a loopback port");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  LiveServer(const LiveServer&) = delete;
  LiveServer& operator=(const LiveServer&) = delete;

  int port() const { return port_; }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_connection_timeout(5);
    c.set_read_timeout(10);
    return c;
  }

private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace testsupport

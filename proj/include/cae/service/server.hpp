#pragma once

#include <memory>
#include <string>

#include "cae/service/session.hpp"

namespace cae::service {

/// HTTP transport over dispatch(); one thread per connection from the pool.
class Server {
 public:
  explicit Server(std::shared_ptr<SessionHolder> holder);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and returns the port (an ephemeral one when port is 0). Throws std::runtime_error.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cae::service

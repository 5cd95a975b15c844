#include "cae/service/server.hpp"

#include <httplib.h>

#include "cae/service/handlers.hpp"

namespace cae::service {

struct Server::Impl {
  std::shared_ptr<SessionHolder> holder;
  httplib::Server http;
};

Server::Server(std::shared_ptr<SessionHolder> holder) : impl_(std::make_unique<Impl>()) {
  impl_->holder = std::move(holder);
  auto handle = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const Response r = dispatch(*impl_->holder, req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  impl_->http.Get(R"(/api/.*)", handle);
  impl_->http.Post(R"(/api/.*)", handle);
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_) impl_->http.stop();
}

}  // namespace cae::service

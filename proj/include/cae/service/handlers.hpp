#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cae/service/session.hpp"

namespace cae::service {

/// Error with an HTTP status and a machine-readable code.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int status_;
  std::string code_;
};

struct ManifoldQuery {
  std::optional<std::string> split;
  std::optional<std::string> class_name;
};

nlohmann::json handle_manifold(const Session* session, const ManifoldQuery& query);
nlohmann::json handle_sample(const Session* session, const std::string& id);
// Body: {"from_id", "target": <class name> | {"class"} | {"sample_id"} | {"point": [x, y]}, "steps", "stop_early"}
nlohmann::json handle_path(const Session* session, const nlohmann::json& body);
// Body: as for a path plus "mode" (weighted | endpoint).
nlohmann::json handle_saliency(const Session* session, const nlohmann::json& body);
nlohmann::json handle_meta(const Session* session);

struct Response {
  int status = 200;
  nlohmann::json body;
};

// Routes one request; every failure becomes {"code", "message"} with its status.
Response dispatch(const SessionHolder& holder, const std::string& method, const std::string& path,
                  const std::map<std::string, std::string>& query, const std::string& body);

}  // namespace cae::service

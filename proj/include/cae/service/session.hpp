#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cae/data/dataset.hpp"
#include "cae/manifold/export.hpp"
#include "cae/manifold/index.hpp"
#include "cae/nets/blackbox.hpp"
#include "cae/nets/codes.hpp"

namespace cae::service {

/// Everything one request can read. Built once, never mutated afterwards.
struct Session {
  data::Dataset dataset;
  std::shared_ptr<const nets::CodeModel> model;
  std::shared_ptr<const nets::BlackBoxClassifier> classifier;
  manifold::ManifoldIndex index;
  std::vector<manifold::ManifoldRecord> records;
  std::string projection_method = "pca";
  std::string checkpoint_digest;
  std::string classifier_digest;

  const data::ImageSample* sample(std::string_view id) const;
  const data::ClassLabel* class_by_name(std::string_view name) const;
};

/// Holds the current session; readers keep the snapshot they started with
/// while a reload installs a new one.
class SessionHolder {
 public:
  SessionHolder() = default;
  explicit SessionHolder(std::shared_ptr<const Session> session) : session_(std::move(session)) {}

  std::shared_ptr<const Session> get() const {
    std::lock_guard lock(mutex_);
    return session_;
  }
  void reset(std::shared_ptr<const Session> session) {
    std::lock_guard lock(mutex_);
    session_.swap(session);
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const Session> session_;
};

}  // namespace cae::service

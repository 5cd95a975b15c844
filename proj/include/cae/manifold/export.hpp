#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cae/manifold/index.hpp"
#include "cae/manifold/projection.hpp"

namespace cae::manifold {

/// One line per entry:
/// {"id", "class_index", "class_name", "code": [d_c], "proj_x", "proj_y", "split"}
struct ManifoldRecord {
  std::string id;
  int class_index = 0;
  std::string class_name;
  std::vector<float> code;
  double proj_x = 0.0;
  double proj_y = 0.0;
  std::string split;
};

std::vector<ManifoldRecord> make_records(const ManifoldIndex& index, const Projection2D& projection);
std::string to_jsonl(const std::vector<ManifoldRecord>& records);
void write_records(const std::filesystem::path& path, const std::vector<ManifoldRecord>& records);
std::vector<ManifoldRecord> read_records(const std::filesystem::path& path);

}  // namespace cae::manifold

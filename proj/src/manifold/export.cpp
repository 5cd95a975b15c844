#include "cae/manifold/export.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cae::manifold {

std::vector<ManifoldRecord> make_records(const ManifoldIndex& index, const Projection2D& projection) {
  if (projection.coords.size() != index.size()) throw ContractError("make_records: projection does not match index");
  std::vector<ManifoldRecord> out;
  out.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& e = index.entries()[i];
    out.push_back({e.sample_id, e.label.index, e.label.name, e.code.values, projection.coords[i][0],
                   projection.coords[i][1], std::string(data::to_string(e.split))});
  }
  return out;
}

std::string to_jsonl(const std::vector<ManifoldRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["class_index"] = r.class_index;
    j["class_name"] = r.class_name;
    j["code"] = r.code;
    j["proj_x"] = r.proj_x;
    j["proj_y"] = r.proj_y;
    j["split"] = r.split;
    out << j.dump() << "\n";
  }
  return out.str();
}

void write_records(const std::filesystem::path& path, const std::vector<ManifoldRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream(path) << to_jsonl(records);
}

std::vector<ManifoldRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifold export '" + path.string() + "'");
  std::vector<ManifoldRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    out.push_back({j.at("id").get<std::string>(), j.at("class_index").get<int>(), j.at("class_name").get<std::string>(),
                   j.at("code").get<std::vector<float>>(), j.at("proj_x").get<double>(), j.at("proj_y").get<double>(),
                   j.at("split").get<std::string>()});
  }
  return out;
}

}  // namespace cae::manifold

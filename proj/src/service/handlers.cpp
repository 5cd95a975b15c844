#include "cae/service/handlers.hpp"

#include <cmath>
#include <limits>

#include "cae/common/errors.hpp"
#include "cae/explain/explainer.hpp"
#include "cae/service/codec.hpp"

namespace cae::service {

namespace {

constexpr int kMaxSteps = 1000;

const Session& require_session(const Session* session) {
  if (!session || session->index.empty() || !session->model || !session->classifier) {
    throw ApiError(503, "not_loaded", "no checkpoint and manifold index are loaded");
  }
  return *session;
}

const data::ImageSample& require_sample(const Session& s, const std::string& id) {
  const data::ImageSample* sample = s.sample(id);
  if (!sample) throw ApiError(404, "unknown_sample", "no sample with id '" + id + "'");
  return *sample;
}

ApiError invalid(const std::string& message) { return ApiError(422, "invalid_request", message); }

int class_index_by_name(const Session& s, const std::string& name) {
  const data::ClassLabel* label = s.class_by_name(name);
  if (!label) throw ApiError(404, "unknown_class", "no class named '" + name + "'");
  return label->index;
}

manifold::PathTarget parse_target(const Session& s, const nlohmann::json& body) {
  if (!body.contains("target")) throw invalid("missing 'target'");
  const nlohmann::json& t = body["target"];
  if (t.is_string()) return manifold::ClassTarget{class_index_by_name(s, t.get<std::string>())};
  if (!t.is_object()) throw invalid("'target' must be a class name or an object");
  if (t.contains("class")) return manifold::ClassTarget{class_index_by_name(s, t["class"].get<std::string>())};
  if (t.contains("class_index")) {
    const int k = t["class_index"].get<int>();
    for (const auto& c : s.dataset.manifest.classes)
      if (c.index == k) return manifold::ClassTarget{k};
    throw ApiError(404, "unknown_class", "no class with index " + std::to_string(k));
  }
  if (t.contains("sample_id")) {
    const std::string id = t["sample_id"].get<std::string>();
    if (!s.index.find(id)) throw ApiError(404, "unknown_sample", "'" + id + "' is not in the manifold index");
    return manifold::SampleTarget{id};
  }
  if (t.contains("point")) {
    const auto& p = t["point"];
    if (!p.is_array() || p.size() != 2) throw invalid("'point' must be [x, y]");
    const double x = p[0].get<double>(), y = p[1].get<double>();
    // A click on the projection resolves to the nearest plotted entry's full code.
    const manifold::ManifoldRecord* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& r : s.records) {
      const double d = (r.proj_x - x) * (r.proj_x - x) + (r.proj_y - y) * (r.proj_y - y);
      if (d < best_d) best_d = d, best = &r;
    }
    if (!best) throw ApiError(503, "not_loaded", "no projection is loaded");
    return manifold::PointTarget{nets::ClassCode{best->code}};
  }
  throw invalid("'target' needs one of class, class_index, sample_id, point");
}

explain::ExplainConfig parse_config(const nlohmann::json& body, bool stop_early_default) {
  explain::ExplainConfig c;
  c.stop_early = stop_early_default;
  if (body.contains("steps")) {
    if (!body["steps"].is_number_integer()) throw invalid("'steps' must be an integer");
    c.steps = body["steps"].get<int>();
  }
  if (c.steps < 1 || c.steps > kMaxSteps) throw invalid("'steps' must be in [1, " + std::to_string(kMaxSteps) + "]");
  if (body.contains("stop_early")) c.stop_early = body["stop_early"].get<bool>();
  if (body.contains("recompute_individual")) c.recompute_individual = body["recompute_individual"].get<bool>();
  if (body.contains("mode")) {
    try {
      c.mode = explain::parse_mode(body["mode"].get<std::string>());
    } catch (const ContractError& e) {
      throw ApiError(422, "invalid_mode", e.what());
    }
  }
  return c;
}

struct Prepared {
  const data::ImageSample* exemplar;
  manifold::PathTarget target;
  explain::ExplainConfig config;
};

Prepared prepare(const Session& s, const nlohmann::json& body, bool stop_early_default) {
  if (!body.is_object()) throw invalid("request body must be an object");
  if (!body.contains("from_id") || !body["from_id"].is_string()) throw invalid("missing 'from_id'");
  const data::ImageSample& exemplar = require_sample(s, body["from_id"].get<std::string>());
  return {&exemplar, parse_target(s, body), parse_config(body, stop_early_default)};
}

std::string class_name(const Session& s, int index) {
  for (const auto& c : s.dataset.manifest.classes)
    if (c.index == index) return c.name;
  return std::to_string(index);
}

}  // namespace

const data::ImageSample* Session::sample(std::string_view id) const {
  for (const auto& s : dataset.samples)
    if (s.id == id) return &s;
  return nullptr;
}

const data::ClassLabel* Session::class_by_name(std::string_view name) const {
  for (const auto& c : dataset.manifest.classes)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json handle_manifold(const Session* session, const ManifoldQuery& query) {
  const Session& s = require_session(session);
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : s.records) {
    if (query.split && r.split != *query.split) continue;
    if (query.class_name && r.class_name != *query.class_name) continue;
    records.push_back({{"id", r.id},
                       {"class", r.class_name},
                       {"class_index", r.class_index},
                       {"proj_x", r.proj_x},
                       {"proj_y", r.proj_y},
                       {"split", r.split}});
  }
  return {{"projection", s.projection_method}, {"count", records.size()}, {"records", std::move(records)}};
}

nlohmann::json handle_sample(const Session* session, const std::string& id) {
  const Session& s = require_session(session);
  const data::ImageSample& sample = require_sample(s, id);
  nlohmann::json out{{"id", sample.id},
                     {"class", sample.label.name},
                     {"class_index", sample.label.index},
                     {"split", data::to_string(sample.split)},
                     {"height", sample.pixels.height},
                     {"width", sample.pixels.width},
                     {"channels", sample.pixels.channels},
                     {"image", encode_image(sample.pixels)}};
  if (const auto* entry = s.index.find(id)) out["code"] = entry->code.values;
  return out;
}

nlohmann::json handle_path(const Session* session, const nlohmann::json& body) {
  const Session& s = require_session(session);
  const Prepared p = prepare(s, body, true);
  const explain::Explainer explainer(s.model.get(), s.classifier.get(), &s.index);
  const explain::Explanation e = explainer.explain(p.exemplar->pixels, p.target, p.config);
  nlohmann::json frames = nlohmann::json::array(), codes = nlohmann::json::array();
  for (const auto& f : e.series.frames) frames.push_back(encode_image(f));
  for (std::size_t i = 0; i < e.series.frames.size(); ++i) codes.push_back(e.path.codes[i].values);
  return {{"from_id", p.exemplar->id},
          {"target_class", e.series.target_class},
          {"target_class_name", class_name(s, e.series.target_class)},
          {"end_mode", manifold::to_string(e.path.end_mode)},
          {"steps", e.path.steps},
          {"frames", std::move(frames)},
          {"codes", std::move(codes)},
          {"probs", e.series.probs},
          {"stop_index", e.series.stop_index ? nlohmann::json(*e.series.stop_index) : nlohmann::json(nullptr)}};
}

nlohmann::json handle_saliency(const Session* session, const nlohmann::json& body) {
  const Session& s = require_session(session);
  const Prepared p = prepare(s, body, false);
  const explain::Explainer explainer(s.model.get(), s.classifier.get(), &s.index);
  const explain::Explanation e = explainer.explain(p.exemplar->pixels, p.target, p.config);
  float peak = 0.0f;
  for (float v : e.saliency.values) peak = std::max(peak, v);
  return {{"from_id", p.exemplar->id},
          {"target_class", e.series.target_class},
          {"target_class_name", class_name(s, e.series.target_class)},
          {"mode", explain::to_string(e.saliency.mode)},
          {"normalization", explain::to_string(e.saliency.normalization)},
          {"steps", e.path.steps},
          {"height", e.saliency.height},
          {"width", e.saliency.width},
          {"max", peak},
          {"total", e.saliency.total()},
          {"values", e.saliency.values},
          {"heatmap", encode_heatmap(e.saliency)}};
}

nlohmann::json handle_meta(const Session* session) {
  const Session& s = require_session(session);
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : s.dataset.manifest.classes) classes.push_back({{"index", c.index}, {"name", c.name}});
  return {{"classes", std::move(classes)},
          {"class_code_dim", s.model->class_code_dim()},
          {"image_size", s.dataset.manifest.image_size},
          {"channels", s.dataset.manifest.channels},
          {"entries", s.index.size()},
          {"projection", s.projection_method},
          {"checkpoint_digest", s.checkpoint_digest},
          {"classifier_digest", s.classifier_digest}};
}

Response dispatch(const SessionHolder& holder, const std::string& method, const std::string& path,
                  const std::map<std::string, std::string>& query, const std::string& body) {
  // Pin one snapshot for the whole request.
  const std::shared_ptr<const Session> session = holder.get();
  auto parse_body = [&] {
    try {
      return nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
      throw ApiError(422, "invalid_body", "request body is not valid JSON");
    }
  };
  try {
    if (method == "GET" && path == "/api/manifold") {
      ManifoldQuery q;
      if (auto it = query.find("split"); it != query.end()) q.split = it->second;
      if (auto it = query.find("class"); it != query.end()) q.class_name = it->second;
      return {200, handle_manifold(session.get(), q)};
    }
    if (method == "GET" && path.rfind("/api/sample/", 0) == 0) {
      return {200, handle_sample(session.get(), path.substr(std::string("/api/sample/").size()))};
    }
    if (method == "POST" && path == "/api/path") return {200, handle_path(session.get(), parse_body())};
    if (method == "POST" && path == "/api/saliency") return {200, handle_saliency(session.get(), parse_body())};
    if (method == "GET" && path == "/api/meta") return {200, handle_meta(session.get())};
    throw ApiError(404, "not_found", "no route for " + method + " " + path);
  } catch (const ApiError& e) {
    return {e.status(), {{"code", e.code()}, {"message", e.what()}}};
  } catch (const nlohmann::json::exception& e) {
    return {422, {{"code", "invalid_request"}, {"message", e.what()}}};
  } catch (const ContractError& e) {
    return {422, {{"code", "invalid_request"}, {"message", e.what()}}};
  } catch (const StateError& e) {
    return {503, {{"code", "not_loaded"}, {"message", e.what()}}};
  } catch (const std::exception& e) {
    return {500, {{"code", "internal"}, {"message", e.what()}}};
  }
}

}  // namespace cae::service

#include "cae/cli/run_config.hpp"

#include <fstream>
#include <set>

#include "cae/common/errors.hpp"

namespace cae::manifold {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TsneParams, perplexity, iterations, learning_rate, early_exaggeration,
                                                exaggeration_iterations, seed)
}  // namespace cae::manifold

namespace cae::nets {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ClassifierTrainConfig, epochs, batch_size, learning_rate,
                                                flip_probability, seed)
}  // namespace cae::nets

namespace cae::cli {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ManifoldOptions, split, projection, tsne, probe_folds, probe_trees,
                                                smote_count, smote_neighbors, smoothness_carriers,
                                                swap_pairs_per_sample)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ExplainOptions, steps, mode, stop_early, recompute_individual)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EvaluateOptions, limit, patch_size, metric_steps, methods)

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  synthetic.seed = s;
  classifier_train.seed = s;
  train.seed = s;
  manifold.tsne.seed = s;
}

void RunConfig::validate() const {
  synthetic.validate();
  classifier.validate();
  model.validate();
  train.validate();
  weights.validate();
  if (classifier_train.epochs < 0 || classifier_train.batch_size < 1) throw ConfigError("classifier_train: bad epochs or batch size");
  if (manifold.split != "train" && manifold.split != "test") throw ConfigError("manifold.split must be train or test");
  manifold::parse_projection(manifold.projection);
  if (manifold.probe_folds < 2) throw ConfigError("manifold.probe_folds must be >= 2");
  if (manifold.smoothness_carriers < 1) throw ConfigError("manifold.smoothness_carriers must be >= 1");
  if (explain.steps < 1) throw ConfigError("explain.steps must be >= 1");
  if (explain.mode != "weighted" && explain.mode != "endpoint") throw ConfigError("explain.mode must be weighted or endpoint");
  if (evaluate.metric_steps < 1 || evaluate.patch_size < 1) throw ConfigError("evaluate: metric_steps and patch_size must be >= 1");
  for (const auto& m : evaluate.methods)
    if (m != "cae" && m != "random" && m != "input_gradient") throw ConfigError("evaluate: unknown method '" + m + "'");
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"seed", c.seed},
                     {"synthetic", c.synthetic},
                     {"classifier", c.classifier},
                     {"classifier_train", c.classifier_train},
                     {"model", c.model},
                     {"train", c.train},
                     {"weights", c.weights},
                     {"manifold", c.manifold},
                     {"explain", c.explain},
                     {"evaluate", c.evaluate}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  static const std::set<std::string> known{"seed",  "synthetic", "classifier", "classifier_train", "model",
                                           "train", "weights",   "manifold",   "explain",          "evaluate"};
  if (!j.is_object()) throw ConfigError("run config must be an object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("run config: unknown key '" + k + "'");
  c = RunConfig{};
  try {
    if (j.contains("synthetic")) c.synthetic = j["synthetic"].get<data::SyntheticSpec>();
    if (j.contains("classifier")) c.classifier = j["classifier"].get<nets::ClassifierConfig>();
    if (j.contains("classifier_train")) c.classifier_train = j["classifier_train"].get<nets::ClassifierTrainConfig>();
    if (j.contains("model")) c.model = j["model"].get<nets::ModelConfig>();
    if (j.contains("train")) c.train = j["train"].get<training::TrainConfig>();
    if (j.contains("weights")) c.weights = j["weights"].get<training::LossWeights>();
    if (j.contains("manifold")) c.manifold = j["manifold"].get<ManifoldOptions>();
    if (j.contains("explain")) c.explain = j["explain"].get<ExplainOptions>();
    if (j.contains("evaluate")) c.evaluate = j["evaluate"].get<EvaluateOptions>();
    if (j.contains("seed")) c.apply_seed(j["seed"].get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return j.get<RunConfig>();
}

}  // namespace cae::cli

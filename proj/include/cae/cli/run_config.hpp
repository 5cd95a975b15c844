#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cae/data/synthetic.hpp"
#include "cae/eval/perturbation.hpp"
#include "cae/manifold/projection.hpp"
#include "cae/nets/config.hpp"
#include "cae/nets/torch_adapters.hpp"
#include "cae/training/losses.hpp"
#include "cae/training/trainer.hpp"

namespace cae::cli {

struct ManifoldOptions {
  std::string split = "test";
  std::string projection = "tsne";
  manifold::TsneParams tsne;
  int probe_folds = 10;
  int probe_trees = 100;
  std::size_t smote_count = 200;  // per class
  std::size_t smote_neighbors = 5;
  int smoothness_carriers = 10;  // individual codes each resampled code is decoded with
  int swap_pairs_per_sample = 1;
};

struct ExplainOptions {
  int steps = 10;
  std::string mode = "weighted";
  bool stop_early = false;
  bool recompute_individual = false;
};

struct EvaluateOptions {
  std::size_t limit = 100;  // exemplars, balanced over classes
  int patch_size = 7;
  int metric_steps = 30;
  std::vector<std::string> methods{"cae", "random", "input_gradient"};
};

/// Every option block a command can use; unspecified blocks keep their defaults.
struct RunConfig {
  std::uint64_t seed = 0;
  data::SyntheticSpec synthetic;
  nets::ClassifierConfig classifier;
  nets::ClassifierTrainConfig classifier_train;
  nets::ModelConfig model;
  training::TrainConfig train;
  training::LossWeights weights;
  ManifoldOptions manifold;
  ExplainOptions explain;
  EvaluateOptions evaluate;

  // Pushes the master seed into every block that draws random numbers.
  void apply_seed(std::uint64_t s);
  // Throws ConfigError.
  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
// Unknown top-level keys are a ConfigError.
void from_json(const nlohmann::json& j, RunConfig& c);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace cae::cli

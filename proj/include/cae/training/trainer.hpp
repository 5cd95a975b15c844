#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "cae/data/dataset.hpp"
#include "cae/nets/blackbox.hpp"
#include "cae/nets/networks.hpp"
#include "cae/training/bbcfe.hpp"
#include "cae/training/losses.hpp"
#include "cae/training/pairs.hpp"

namespace cae::training {

enum class DcMode { joint, external };

struct TrainConfig {
  double learning_rate = 1e-4;
  double weight_decay = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  int epochs = 100;
  int batch_size = 8;  // pairs per step
  std::uint64_t seed = 0;
  double flip_probability = 0.5;
  std::uint64_t pair_subsample_limit = 100000;
  std::size_t pairs_per_epoch = 0;  // 0: half the training-sample count
  double validation_fraction = 0.1;
  std::size_t validation_limit = 400;
  int checkpoint_every = 1;  // epochs between written checkpoints; 0 writes only initial and final
  DcMode dc_mode = DcMode::joint;

  // Throws ConfigError.
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

/// Losses recorded by one optimisation step, keyed by term name plus "g_total" and "d_total".
using LossRecord = std::map<std::string, double>;

struct TrainState {
  TrainState(std::shared_ptr<nets::CaeNetworks> networks, const TrainConfig& config);

  std::shared_ptr<nets::CaeNetworks> networks;
  std::unique_ptr<torch::optim::Adam> generator_optimizer;
  std::unique_ptr<torch::optim::Adam> discriminator_optimizer;
  // External mode: the class head is fitted to this classifier's probabilities.
  const nets::BlackBoxClassifier* external_classifier = nullptr;
  DcMode dc_mode = DcMode::joint;
  std::int64_t steps = 0;
  std::string last_good_checkpoint;
};

// Update encoder + decoder on the generator objective, then the discriminator
// on its objective with detached syntheses, both on the same batch. Throws
// DivergenceError before applying an update whose loss is non-finite.
LossRecord train_step(TrainState& state, const torch::Tensor& x_A, const torch::Tensor& x_B, const torch::Tensor& y_A,
                      const torch::Tensor& y_B, const LossWeights& weights);

// Both objectives evaluated without updating anything.
LossRecord evaluate_losses(TrainState& state, const torch::Tensor& x_A, const torch::Tensor& x_B,
                           const torch::Tensor& y_A, const torch::Tensor& y_B, const LossWeights& weights);

struct EpochRecord {
  int epoch = 0;
  LossRecord mean_losses;
  double validation_swap_success = 0.0;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_validation_swap_success = 0.0;
  std::vector<std::filesystem::path> checkpoints;
  std::filesystem::path final_checkpoint;
  double wall_seconds = 0.0;

  // Wall-clock fields are omitted so that identical runs produce identical text.
  std::string metrics_jsonl() const;
  std::string timing_jsonl() const;
};

struct TrainInputs {
  std::vector<data::ImageSample> train;
  std::vector<data::ImageSample> validation;
};

// Stratified, seeded hold-out of `fraction` of each class (capped at `limit` in total).
TrainInputs split_validation(const std::vector<data::ImageSample>& train, double fraction, std::size_t limit,
                             std::uint64_t seed);

struct TrainLoopOptions {
  std::filesystem::path checkpoint_dir;  // empty: keep checkpoints in memory only
  const nets::BlackBoxClassifier* swap_judge = nullptr;  // null: the discriminator's class head judges swaps
  const nets::BlackBoxClassifier* external_classifier = nullptr;  // required in external mode
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  std::shared_ptr<nets::CaeNetworks> networks;  // best validation epoch
  TrainReport report;
};

// Throws ConfigError on an invalid dataset or configuration and DivergenceError on a non-finite loss.
TrainResult train_loop(const std::vector<data::ImageSample>& train, const nets::ModelConfig& model_config,
                       const TrainConfig& config, const LossWeights& weights, TrainLoopOptions options = {});

/// The discriminator's class head seen as a classifier over images.
class DiscriminatorClassifier final : public nets::BlackBoxClassifier {
 public:
  explicit DiscriminatorClassifier(std::shared_ptr<nets::CaeNetworks> networks) : networks_(std::move(networks)) {}
  int num_classes() const override { return networks_->config.num_classes; }
  std::vector<nets::Probabilities> classify(std::span<const Image> batch) const override;
  using nets::BlackBoxClassifier::classify;

 private:
  std::shared_ptr<nets::CaeNetworks> networks_;
};

torch::Tensor labels_tensor(const std::vector<data::ImageSample>& samples, const std::vector<std::size_t>& indices);
// Stacks samples[indices] after independent random horizontal flips.
torch::Tensor batch_tensor(const std::vector<data::ImageSample>& samples, const std::vector<std::size_t>& indices,
                           double flip_probability, Rng& rng);

}  // namespace cae::training

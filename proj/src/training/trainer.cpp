#include "cae/training/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "cae/common/errors.hpp"
#include "cae/manifold/analytics.hpp"
#include "cae/nets/checkpoint.hpp"
#include "cae/nets/torch_adapters.hpp"

namespace cae::training {

namespace {

std::string_view to_string(DcMode m) { return m == DcMode::external ? "external" : "joint"; }

DcMode parse_dc_mode(const std::string& s) {
  if (s == "joint") return DcMode::joint;
  if (s == "external") return DcMode::external;
  throw ConfigError("dc_mode must be 'joint' or 'external', got '" + s + "'");
}

void require_finite(const torch::Tensor& loss, const char* what, const TrainState& state) {
  const double v = loss.item<double>();
  if (!std::isfinite(v)) {
    throw DivergenceError(std::string(what) + " loss became non-finite at step " + std::to_string(state.steps),
                          state.last_good_checkpoint);
  }
}

void record_terms(LossRecord& out, const GeneratorLossTerms& g, const torch::Tensor& g_total,
                  const DiscriminatorLossTerms& d, const torch::Tensor& d_total) {
  const auto gt = g.all();
  for (std::size_t i = 0; i < gt.size(); ++i) out[std::string(GeneratorLossTerms::kNames[i])] = gt[i]->item<double>();
  const auto dt = d.all();
  for (std::size_t i = 0; i < dt.size(); ++i) out[std::string(DiscriminatorLossTerms::kNames[i])] = dt[i]->item<double>();
  out["g_total"] = g_total.item<double>();
  out["d_total"] = d_total.item<double>();
}

struct Objectives {
  GeneratorLossTerms g;
  torch::Tensor g_total;
  ForwardBundle bundle;
};

Objectives generator_objective(TrainState& state, const torch::Tensor& x_A, const torch::Tensor& x_B,
                               const torch::Tensor& y_A, const torch::Tensor& y_B, const LossWeights& weights) {
  NetworksAutoencoder ae(state.networks);
  Objectives o;
  o.bundle = bbcfe_forward(x_A, x_B, ae);
  const std::int64_t n = x_A.size(0);
  const auto d = state.networks->discriminator->forward(torch::cat({o.bundle.swap_A, o.bundle.swap_B}));
  o.g = generator_terms(o.bundle, d.realness_logits.narrow(0, 0, n), d.class_logits.narrow(0, 0, n),
                        d.realness_logits.narrow(0, n, n), d.class_logits.narrow(0, n, n), y_A, y_B);
  o.g_total = total_generator_loss(o.g, weights);
  return o;
}

torch::Tensor blackbox_targets(const nets::BlackBoxClassifier& classifier, const torch::Tensor& x) {
  const auto probs = classifier.classify(nets::tensor_to_images(x.detach()));
  std::vector<float> flat;
  for (const auto& row : probs) flat.insert(flat.end(), row.begin(), row.end());
  return torch::tensor(flat).reshape({static_cast<std::int64_t>(probs.size()), -1});
}

torch::Tensor soft_cross_entropy(const torch::Tensor& logits, const torch::Tensor& target) {
  if (logits.sizes() != target.sizes()) throw ContractError("external classifier class count differs from the model's");
  return -(target * torch::log_softmax(logits, 1)).sum(1).mean();
}

DiscriminatorLossTerms discriminator_objective(TrainState& state, const ForwardBundle& f, const torch::Tensor& y_A,
                                               const torch::Tensor& y_B) {
  const std::int64_t n = f.x_A.size(0);
  const auto d = state.networks->discriminator->forward(
      torch::cat({f.x_A, f.x_B, f.swap_A.detach(), f.swap_B.detach()}));
  auto part = [&](const torch::Tensor& t, int k) { return t.narrow(0, k * n, n); };
  DiscriminatorLossTerms terms =
      discriminator_terms(part(d.realness_logits, 0), part(d.class_logits, 0), part(d.realness_logits, 1),
                          part(d.class_logits, 1), part(d.realness_logits, 2), part(d.realness_logits, 3), y_A, y_B);
  if (state.dc_mode == DcMode::external) {
    // The class head imitates the black box's probabilities on the real images.
    if (!state.external_classifier) throw StateError("external class mode needs a classifier");
    terms.cla_A = soft_cross_entropy(part(d.class_logits, 0), blackbox_targets(*state.external_classifier, f.x_A));
    terms.cla_B = soft_cross_entropy(part(d.class_logits, 1), blackbox_targets(*state.external_classifier, f.x_B));
  }
  return terms;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !(weight_decay >= 0.0)) throw ConfigError("learning_rate and weight_decay must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must be in [0, 1)");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) throw ConfigError("flip_probability must be in [0, 1]");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) throw ConfigError("validation_fraction must be in [0, 1)");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"learning_rate", c.learning_rate},
                     {"weight_decay", c.weight_decay},
                     {"beta1", c.beta1},
                     {"beta2", c.beta2},
                     {"epochs", c.epochs},
                     {"batch_size", c.batch_size},
                     {"seed", c.seed},
                     {"flip_probability", c.flip_probability},
                     {"pair_subsample_limit", c.pair_subsample_limit},
                     {"pairs_per_epoch", c.pairs_per_epoch},
                     {"validation_fraction", c.validation_fraction},
                     {"validation_limit", c.validation_limit},
                     {"checkpoint_every", c.checkpoint_every},
                     {"dc_mode", to_string(c.dc_mode)}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c = TrainConfig{};
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.flip_probability = j.value("flip_probability", c.flip_probability);
  c.pair_subsample_limit = j.value("pair_subsample_limit", c.pair_subsample_limit);
  c.pairs_per_epoch = j.value("pairs_per_epoch", c.pairs_per_epoch);
  c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
  c.validation_limit = j.value("validation_limit", c.validation_limit);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  c.dc_mode = parse_dc_mode(j.value("dc_mode", std::string(to_string(c.dc_mode))));
  c.validate();
}

TrainState::TrainState(std::shared_ptr<nets::CaeNetworks> nets_, const TrainConfig& config)
    : networks(std::move(nets_)), dc_mode(config.dc_mode) {
  if (!networks) throw StateError("TrainState: no networks");
  config.validate();
  const auto options = torch::optim::AdamOptions(config.learning_rate)
                           .betas({config.beta1, config.beta2})
                           .weight_decay(config.weight_decay);
  generator_optimizer = std::make_unique<torch::optim::Adam>(networks->generator_parameters(), options);
  discriminator_optimizer = std::make_unique<torch::optim::Adam>(networks->discriminator->parameters(), options);
}

LossRecord train_step(TrainState& state, const torch::Tensor& x_A, const torch::Tensor& x_B, const torch::Tensor& y_A,
                      const torch::Tensor& y_B, const LossWeights& weights) {
  Objectives o = generator_objective(state, x_A, x_B, y_A, y_B, weights);
  require_finite(o.g_total, "generator", state);
  state.generator_optimizer->zero_grad();
  state.discriminator_optimizer->zero_grad();
  o.g_total.backward();
  state.generator_optimizer->step();

  state.discriminator_optimizer->zero_grad();
  const DiscriminatorLossTerms d = discriminator_objective(state, o.bundle, y_A, y_B);
  const torch::Tensor d_total = discriminator_loss(d, weights);
  require_finite(d_total, "discriminator", state);
  d_total.backward();
  state.discriminator_optimizer->step();
  ++state.steps;

  LossRecord record;
  torch::NoGradGuard no_grad;
  record_terms(record, o.g, o.g_total, d, d_total);
  return record;
}

LossRecord evaluate_losses(TrainState& state, const torch::Tensor& x_A, const torch::Tensor& x_B,
                           const torch::Tensor& y_A, const torch::Tensor& y_B, const LossWeights& weights) {
  torch::NoGradGuard no_grad;
  Objectives o = generator_objective(state, x_A, x_B, y_A, y_B, weights);
  const DiscriminatorLossTerms d = discriminator_objective(state, o.bundle, y_A, y_B);
  LossRecord record;
  record_terms(record, o.g, o.g_total, d, discriminator_loss(d, weights));
  return record;
}

std::string TrainReport::metrics_jsonl() const {
  std::ostringstream out;
  for (const auto& e : epochs) {
    nlohmann::ordered_json row;
    row["epoch"] = e.epoch;
    row["steps"] = e.steps;
    for (const auto& [k, v] : e.mean_losses) row[k] = v;
    row["validation_swap_success"] = e.validation_swap_success;
    out << row.dump() << '\n';
  }
  return out.str();
}

std::string TrainReport::timing_jsonl() const {
  std::ostringstream out;
  for (const auto& e : epochs) out << nlohmann::json{{"epoch", e.epoch}, {"wall_seconds", e.wall_seconds}}.dump() << '\n';
  return out.str();
}

TrainInputs split_validation(const std::vector<data::ImageSample>& train, double fraction, std::size_t limit,
                             std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < train.size(); ++i) by_class[train[i].label.index].push_back(i);
  std::vector<bool> held(train.size(), false);
  Rng rng(derive_seed(seed, "validation-split"));
  std::size_t per_class_cap = by_class.empty() ? 0 : limit / by_class.size();
  for (auto& [label, members] : by_class) {
    shuffle(members.begin(), members.end(), rng);
    std::size_t take = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(members.size())));
    take = std::min({take, per_class_cap, members.size() > 0 ? members.size() - 1 : 0});
    for (std::size_t k = 0; k < take; ++k) held[members[k]] = true;
  }
  TrainInputs out;
  for (std::size_t i = 0; i < train.size(); ++i) (held[i] ? out.validation : out.train).push_back(train[i]);
  return out;
}

torch::Tensor labels_tensor(const std::vector<data::ImageSample>& samples, const std::vector<std::size_t>& indices) {
  std::vector<std::int64_t> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) labels.push_back(samples[i].label.index);
  return torch::tensor(labels, torch::kLong);
}

torch::Tensor batch_tensor(const std::vector<data::ImageSample>& samples, const std::vector<std::size_t>& indices,
                           double flip_probability, Rng& rng) {
  std::vector<Image> images;
  images.reserve(indices.size());
  for (std::size_t i : indices) images.push_back(data::augment(samples[i], flip_probability, rng).pixels);
  return nets::images_to_tensor(images);
}

std::vector<nets::Probabilities> DiscriminatorClassifier::classify(std::span<const Image> batch) const {
  torch::NoGradGuard no_grad;
  std::vector<nets::Probabilities> out;
  for (std::size_t start = 0; start < batch.size(); start += 128) {
    const std::size_t len = std::min<std::size_t>(128, batch.size() - start);
    const auto d = networks_->discriminator->forward(nets::images_to_tensor(batch.subspan(start, len)));
    const torch::Tensor p = torch::softmax(d.class_logits.to(torch::kFloat64), 1).contiguous();
    for (std::int64_t i = 0; i < p.size(0); ++i) {
      const double* row = p.data_ptr<double>() + i * p.size(1);
      out.emplace_back(row, row + p.size(1));
    }
  }
  return out;
}

TrainResult train_loop(const std::vector<data::ImageSample>& all_train, const nets::ModelConfig& model_config,
                       const TrainConfig& config, const LossWeights& weights, TrainLoopOptions options) {
  config.validate();
  weights.validate();
  model_config.validate();
  const auto started = std::chrono::steady_clock::now();

  TrainInputs inputs = split_validation(all_train, config.validation_fraction, config.validation_limit, config.seed);
  const PairSampler sampler(inputs.train, config.pair_subsample_limit, config.pairs_per_epoch);

  auto networks = std::make_shared<nets::CaeNetworks>(model_config, derive_seed(config.seed, "cae-init"));
  TrainState state(networks, config);
  if (config.dc_mode == DcMode::external) {
    if (!options.external_classifier) throw ConfigError("external class mode needs a classifier");
    state.external_classifier = options.external_classifier;
  }

  nets::TorchCodeModel code_model(networks);
  DiscriminatorClassifier head_judge(networks);
  const nets::BlackBoxClassifier& judge = options.swap_judge ? *options.swap_judge : head_judge;
  const std::uint64_t swap_seed = derive_seed(config.seed, "validation-swaps");
  auto validation_success = [&]() {
    if (inputs.validation.empty()) return 0.0;
    return manifold::class_swap_success_rate(inputs.validation, code_model, judge, swap_seed).rate;
  };

  TrainReport report;
  nets::NetworkParams best = networks->export_params();
  report.best_validation_swap_success = -1.0;

  auto write_checkpoint = [&](const std::string& name, const nets::NetworkParams& params) {
    if (options.checkpoint_dir.empty()) return std::filesystem::path{};
    std::filesystem::create_directories(options.checkpoint_dir);
    const auto path = options.checkpoint_dir / name;
    nets::save_checkpoint(path, params);
    return path;
  };
  auto snapshot = [&](int epoch, double success) {
    nets::NetworkParams p = networks->export_params();
    p.extra = {{"epoch", epoch}, {"validation_swap_success", success}, {"train_config", config}, {"weights", weights}};
    return p;
  };
  auto epoch_name = [](int epoch) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "epoch_%04d.ckpt", epoch);
    return std::string(buf);
  };

  {
    const double initial = config.epochs == 0 ? validation_success() : 0.0;
    best = snapshot(0, initial);
    report.best_validation_swap_success = initial;
    const auto path = write_checkpoint(epoch_name(0), best);
    if (!path.empty()) {
      report.checkpoints.push_back(path);
      state.last_good_checkpoint = path.string();
    }
  }

  Rng pair_rng(derive_seed(config.seed, "pairs"));
  Rng flip_rng(derive_seed(config.seed, "augment"));
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    for (const auto& batch : make_batches(sampler.epoch(pair_rng), static_cast<std::size_t>(config.batch_size))) {
      const torch::Tensor x_A = batch_tensor(inputs.train, batch.a, config.flip_probability, flip_rng);
      const torch::Tensor x_B = batch_tensor(inputs.train, batch.b, config.flip_probability, flip_rng);
      const LossRecord step = train_step(state, x_A, x_B, labels_tensor(inputs.train, batch.a),
                                         labels_tensor(inputs.train, batch.b), weights);
      for (const auto& [k, v] : step) rec.mean_losses[k] += v;
      ++rec.steps;
    }
    for (auto& [k, v] : rec.mean_losses) v /= static_cast<double>(std::max<std::size_t>(1, rec.steps));
    rec.validation_swap_success = validation_success();

    nets::NetworkParams params = snapshot(epoch, rec.validation_swap_success);
    if (config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0) {
      const auto path = write_checkpoint(epoch_name(epoch), params);
      if (!path.empty()) {
        report.checkpoints.push_back(path);
        state.last_good_checkpoint = path.string();
      }
    }
    // Ties go to the later epoch.
    if (rec.validation_swap_success >= report.best_validation_swap_success) {
      report.best_validation_swap_success = rec.validation_swap_success;
      report.best_epoch = epoch;
      best = std::move(params);
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
    report.epochs.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
  }

  if (config.epochs > 0) {
    report.final_checkpoint = write_checkpoint("final.ckpt", best);
    networks->import_params(best);
  } else if (!report.checkpoints.empty()) {
    report.final_checkpoint = report.checkpoints.front();
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return TrainResult{networks, std::move(report)};
}

}  // namespace cae::training

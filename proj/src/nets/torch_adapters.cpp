#include "cae/nets/torch_adapters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cae/common/random.hpp"

namespace cae::nets {

torch::Tensor images_to_tensor(std::span<const Image> images) {
  if (images.empty()) throw ContractError("images_to_tensor: empty batch");
  const Image& first = images.front();
  const int c = first.channels, h = first.height, w = first.width;
  torch::Tensor out = torch::empty({static_cast<long>(images.size()), c, h, w}, torch::kFloat32);
  float* dst = out.data_ptr<float>();
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (std::size_t n = 0; n < images.size(); ++n) {
    const Image& img = images[n];
    if (!img.same_shape(first) || img.pixels.size() != first.pixels.size()) {
      throw ContractError("images_to_tensor: images in a batch must share one shape");
    }
    float* base = dst + n * plane * c;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int k = 0; k < c; ++k) base[k * plane + static_cast<std::size_t>(y) * w + x] = img.at(y, x, k);
  }
  return out;
}

std::vector<Image> tensor_to_images(const torch::Tensor& batch) {
  if (batch.dim() != 4) throw ContractError("tensor_to_images: expected [N, C, H, W]");
  const torch::Tensor t = batch.detach().to(torch::kFloat32).contiguous();
  const int n = static_cast<int>(t.size(0)), c = static_cast<int>(t.size(1));
  const int h = static_cast<int>(t.size(2)), w = static_cast<int>(t.size(3));
  const float* src = t.data_ptr<float>();
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::vector<Image> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Image img(h, w, c);
    const float* base = src + static_cast<std::size_t>(i) * plane * c;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int k = 0; k < c; ++k) img.at(y, x, k) = base[k * plane + static_cast<std::size_t>(y) * w + x];
    out.push_back(std::move(img));
  }
  return out;
}

torch::Tensor class_codes_to_tensor(std::span<const ClassCode> codes, int dim) {
  torch::Tensor out = torch::empty({static_cast<long>(codes.size()), dim}, torch::kFloat32);
  float* dst = out.data_ptr<float>();
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (static_cast<int>(codes[i].size()) != dim) {
      throw ContractError("class code has dimension " + std::to_string(codes[i].size()) + ", expected " +
                          std::to_string(dim));
    }
    std::copy(codes[i].values.begin(), codes[i].values.end(), dst + i * dim);
  }
  return out;
}

torch::Tensor individuals_to_tensor(std::span<const IndividualCode> codes) {
  if (codes.empty()) throw ContractError("individuals_to_tensor: empty batch");
  const IndividualCode& f = codes.front();
  torch::Tensor out = torch::empty({static_cast<long>(codes.size()), f.channels, f.height, f.width}, torch::kFloat32);
  float* dst = out.data_ptr<float>();
  const std::size_t n = static_cast<std::size_t>(f.channels) * f.height * f.width;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const IndividualCode& s = codes[i];
    if (s.channels != f.channels || s.height != f.height || s.width != f.width || s.values.size() != n) {
      throw ContractError("individual codes in a batch must share one shape");
    }
    std::copy(s.values.begin(), s.values.end(), dst + i * n);
  }
  return out;
}

TorchCodeModel::TorchCodeModel(std::shared_ptr<CaeNetworks> networks, int batch_size)
    : networks_(std::move(networks)), batch_size_(batch_size) {
  if (!networks_) throw StateError("TorchCodeModel: no networks loaded");
  if (batch_size_ < 1) throw ContractError("TorchCodeModel: batch size must be >= 1");
}

int TorchCodeModel::class_code_dim() const { return networks_->config.class_code_dim; }

std::vector<EncodedImage> TorchCodeModel::encode(std::span<const Image> batch) const {
  torch::NoGradGuard no_grad;
  networks_->encoder->eval();
  std::vector<EncodedImage> out;
  out.reserve(batch.size());
  for (std::size_t start = 0; start < batch.size(); start += batch_size_) {
    const std::size_t len = std::min<std::size_t>(batch_size_, batch.size() - start);
    auto [c, s] = networks_->encoder->forward(images_to_tensor(batch.subspan(start, len)));
    c = c.contiguous();
    s = s.contiguous();
    const int dim = static_cast<int>(c.size(1));
    const int sc = static_cast<int>(s.size(1)), sh = static_cast<int>(s.size(2)), sw = static_cast<int>(s.size(3));
    const std::size_t sn = static_cast<std::size_t>(sc) * sh * sw;
    for (std::size_t i = 0; i < len; ++i) {
      EncodedImage e;
      const float* cp = c.data_ptr<float>() + i * dim;
      e.class_code.values.assign(cp, cp + dim);
      const float* sp = s.data_ptr<float>() + i * sn;
      e.individual = IndividualCode{sc, sh, sw, std::vector<float>(sp, sp + sn)};
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<Image> TorchCodeModel::decode(std::span<const ClassCode> class_codes,
                                          std::span<const IndividualCode> individuals) const {
  if (class_codes.size() != individuals.size()) throw ContractError("decode: class and individual code counts differ");
  torch::NoGradGuard no_grad;
  networks_->decoder->eval();
  std::vector<Image> out;
  out.reserve(class_codes.size());
  for (std::size_t start = 0; start < class_codes.size(); start += batch_size_) {
    const std::size_t len = std::min<std::size_t>(batch_size_, class_codes.size() - start);
    const torch::Tensor x = networks_->decoder->forward(class_codes_to_tensor(class_codes.subspan(start, len), class_code_dim()),
                                                        individuals_to_tensor(individuals.subspan(start, len)));
    for (auto& img : tensor_to_images(x)) out.push_back(std::move(img));
  }
  return out;
}

TorchClassifier::TorchClassifier(ClassifierNet net) : net_(std::move(net)) {}

TorchClassifier TorchClassifier::from_params(const NetworkParams& params) {
  if (params.component != "classifier") {
    throw ConfigError("checkpoint: expected a 'classifier' checkpoint, got '" + params.component + "'");
  }
  ClassifierNet net(params.config.get<ClassifierConfig>());
  load_module_arrays(*net, "classifier", params);
  return TorchClassifier(net);
}

NetworkParams TorchClassifier::export_params() const {
  require_loaded();
  NetworkParams params;
  params.component = "classifier";
  params.config = net_->config;
  append_module_arrays(*net_, "classifier", params.arrays);
  return params;
}

void TorchClassifier::require_loaded() const {
  if (net_.is_empty()) throw StateError("classifier is not loaded");
}

int TorchClassifier::num_classes() const {
  require_loaded();
  return net_->config.num_classes;
}

std::vector<Probabilities> TorchClassifier::classify(std::span<const Image> batch) const {
  require_loaded();
  torch::NoGradGuard no_grad;
  net_->eval();
  std::vector<Probabilities> out;
  out.reserve(batch.size());
  constexpr std::size_t chunk = 128;
  for (std::size_t start = 0; start < batch.size(); start += chunk) {
    const std::size_t len = std::min(chunk, batch.size() - start);
    const torch::Tensor p = torch::softmax(net_->forward(images_to_tensor(batch.subspan(start, len))).to(torch::kFloat64), 1)
                                .contiguous();
    const int k = static_cast<int>(p.size(1));
    for (std::size_t i = 0; i < len; ++i) {
      const double* row = p.data_ptr<double>() + i * k;
      out.emplace_back(row, row + k);
    }
  }
  return out;
}

Image TorchClassifier::logit_gradient(const Image& x, int class_index) const {
  require_loaded();
  if (class_index < 0 || class_index >= num_classes()) throw ContractError("logit_gradient: class index out of range");
  net_->eval();
  torch::Tensor input = images_to_tensor(std::span<const Image>(&x, 1)).requires_grad_(true);
  const torch::Tensor logits = net_->forward(input);
  logits.select(1, class_index).sum().backward();
  return tensor_to_images(input.grad()).front();
}

double accuracy(const BlackBoxClassifier& classifier, const std::vector<data::ImageSample>& samples, int batch_size) {
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  std::vector<Image> batch;
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    const std::size_t len = std::min<std::size_t>(batch_size, samples.size() - start);
    batch.clear();
    for (std::size_t i = 0; i < len; ++i) batch.push_back(samples[start + i].pixels);
    const auto probs = classifier.classify(batch);
    for (std::size_t i = 0; i < len; ++i) {
      if (static_cast<int>(argmax(probs[i])) == samples[start + i].label.index) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

TorchClassifier train_classifier(const std::vector<data::ImageSample>& train, const std::vector<data::ImageSample>& test,
                                 const ClassifierConfig& config, const ClassifierTrainConfig& tc,
                                 ClassifierTrainReport* report) {
  if (train.empty()) throw ContractError("train_classifier: empty training set");
  if (tc.batch_size < 1 || tc.epochs < 0) throw ConfigError("train_classifier: invalid batch size or epoch count");
  torch::manual_seed(derive_seed(tc.seed, "classifier-init"));
  ClassifierNet net(config);
  torch::optim::Adam optimizer(net->parameters(), torch::optim::AdamOptions(tc.learning_rate));
  Rng rng(derive_seed(tc.seed, "classifier-batches"));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  ClassifierTrainReport local;
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    net->train();
    shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t len = std::min<std::size_t>(tc.batch_size, order.size() - start);
      std::vector<Image> images;
      std::vector<std::int64_t> labels;
      for (std::size_t i = 0; i < len; ++i) {
        const auto s = data::augment(train[order[start + i]], tc.flip_probability, rng);
        images.push_back(s.pixels);
        labels.push_back(s.label.index);
      }
      const torch::Tensor loss =
          torch::nn::functional::cross_entropy(net->forward(images_to_tensor(images)), torch::tensor(labels));
      const double value = loss.item<double>();
      if (!std::isfinite(value)) throw DivergenceError("classifier training produced a non-finite loss", "");
      optimizer.zero_grad();
      loss.backward();
      optimizer.step();
      total += value;
      ++batches;
    }
    local.epoch_loss.push_back(total / static_cast<double>(batches));
  }
  TorchClassifier classifier(net);
  local.train_accuracy = accuracy(classifier, train);
  local.test_accuracy = accuracy(classifier, test);
  if (report) *report = std::move(local);
  return classifier;
}

}  // namespace cae::nets

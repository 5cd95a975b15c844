#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "cae/data/synthetic.hpp"
#include "cae/nets/checkpoint.hpp"
#include "cae/nets/networks.hpp"
#include "cae/nets/torch_adapters.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace cae;
using namespace cae::nets;

namespace {

ModelConfig small_model(int size = 32) {
  ModelConfig c;
  c.image_size = size;
  c.base_channels = 8;
  c.individual_channels = 16;
  c.discriminator_channels = 8;
  return c;
}

std::vector<Image> random_images(int n, int size, int channels, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Image> out;
  for (int i = 0; i < n; ++i) out.push_back(test::random_image(size, size, channels, rng));
  return out;
}

bool same_params(const NetworkParams& a, const NetworkParams& b) {
  if (a.arrays.size() != b.arrays.size()) return false;
  for (std::size_t i = 0; i < a.arrays.size(); ++i)
    if (a.arrays[i].name != b.arrays[i].name || a.arrays[i].data != b.arrays[i].data) return false;
  return true;
}

}  // namespace

TEST(TensorConversion, RoundTripAndLayout) {
  const auto images = random_images(3, 5, 3, 1);
  const torch::Tensor t = images_to_tensor(images);
  EXPECT_EQ(t.sizes(), (std::vector<std::int64_t>{3, 3, 5, 5}));
  EXPECT_FLOAT_EQ(t[1][2][3][4].item<float>(), images[1].at(3, 4, 2));
  EXPECT_EQ(tensor_to_images(t), images);
  std::vector<Image> mixed{Image(2, 2, 1), Image(3, 3, 1)};
  EXPECT_THROW(images_to_tensor(mixed), ContractError);
  EXPECT_THROW(images_to_tensor(std::vector<Image>{}), ContractError);
}

TEST(Encoder, DeskShapes) {
  CaeNetworks nets(ModelConfig{}, 0);
  const TorchCodeModel model(std::make_shared<CaeNetworks>(nets));
  const auto enc = model.encode(random_images(1, 64, 1, 2).front());
  EXPECT_EQ(enc.class_code.size(), 8u);
  EXPECT_EQ(enc.individual.channels, 64);
  EXPECT_EQ(enc.individual.height, 16);
  EXPECT_EQ(enc.individual.width, 16);
}

TEST(Encoder, FullScaleShapes) {
  ModelConfig c;
  c.image_size = 256;
  c.channels = 3;
  c.individual_channels = 256;
  c.base_channels = 8;
  c.discriminator_channels = 4;
  auto nets = std::make_shared<CaeNetworks>(c, 0);
  torch::NoGradGuard no_grad;
  auto [code, individual] = nets->encoder->forward(torch::rand({1, 3, 256, 256}));
  EXPECT_EQ(code.sizes(), (std::vector<std::int64_t>{1, 8}));
  EXPECT_EQ(individual.sizes(), (std::vector<std::int64_t>{1, 256, 64, 64}));
}

TEST(Encoder, InferenceIsDeterministic) {
  const TorchCodeModel model(std::make_shared<CaeNetworks>(small_model(), 3));
  const auto x = random_images(4, 32, 1, 5);
  const auto a = model.encode(x);
  const auto b = model.encode(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(a[i].class_code, b[i].class_code);
    EXPECT_EQ(a[i].individual, b[i].individual);
  }
}

TEST(Encoder, ShapeMismatchIsContractError) {
  auto nets = std::make_shared<CaeNetworks>(small_model(), 0);
  EXPECT_THROW(nets->encoder->forward(torch::rand({1, 1, 28, 28})), ContractError);
  EXPECT_THROW(nets->encoder->forward(torch::rand({1, 3, 32, 32})), ContractError);
  const TorchCodeModel model(nets);
  EXPECT_THROW(model.encode(random_images(1, 16, 1, 0).front()), ContractError);
}

TEST(Decoder, OutputShapeRangeAndDeterminism) {
  for (int size : {32, 36, 48, 64}) {
    auto nets = std::make_shared<CaeNetworks>(small_model(size), 1);
    const TorchCodeModel model(nets);
    const auto x = random_images(2, size, 1, 7);
    const auto enc = model.encode(x);
    const Image y = model.decode(enc[0].class_code, enc[1].individual);
    EXPECT_TRUE(y.same_shape(x[0])) << size;
    torch::NoGradGuard no_grad;
    const torch::Tensor out = nets->decoder->forward(torch::randn({3, 8}) * 50, torch::randn({3, 16, size / 4, size / 4}) * 50);
    EXPECT_GE(out.min().item<float>(), 0.0f);
    EXPECT_LE(out.max().item<float>(), 1.0f);
    EXPECT_EQ(model.decode(enc[0].class_code, enc[1].individual), y);
  }
}

TEST(Decoder, ShapeMismatchIsContractError) {
  auto nets = std::make_shared<CaeNetworks>(small_model(), 0);
  EXPECT_THROW(nets->decoder->forward(torch::rand({1, 7}), torch::rand({1, 16, 8, 8})), ContractError);
  EXPECT_THROW(nets->decoder->forward(torch::rand({1, 8}), torch::rand({1, 16, 7, 8})), ContractError);
  EXPECT_THROW(nets->decoder->forward(torch::rand({2, 8}), torch::rand({1, 16, 8, 8})), ContractError);
  const TorchCodeModel model(nets);
  EXPECT_THROW(model.decode(ClassCode{{1, 2}}, IndividualCode{16, 8, 8, std::vector<float>(1024)}), ContractError);
}

TEST(Discriminator, LogitShapesAndSoftmax) {
  ModelConfig c = small_model();
  c.num_classes = 3;
  auto nets = std::make_shared<CaeNetworks>(c, 0);
  torch::NoGradGuard no_grad;
  const auto out = nets->discriminator->forward(torch::rand({5, 1, 32, 32}));
  EXPECT_EQ(out.realness_logits.sizes(), (std::vector<std::int64_t>{5, 2}));
  EXPECT_EQ(out.class_logits.sizes(), (std::vector<std::int64_t>{5, 3}));
  EXPECT_TRUE(torch::isfinite(out.realness_logits).all().item<bool>());
  const torch::Tensor sums = torch::softmax(out.realness_logits.to(torch::kFloat64), 1).sum(1);
  EXPECT_NEAR((sums - 1).abs().max().item<double>(), 0.0, 1e-12);
  EXPECT_THROW(nets->discriminator->forward(torch::rand({1, 1, 16, 16})), ContractError);
}

TEST(Classifier, ProbabilitiesAndDeterminism) {
  ClassifierConfig cfg;
  cfg.image_size = 32;
  cfg.num_classes = 3;
  const TorchClassifier clf(ClassifierNet{cfg});
  const auto x = random_images(6, 32, 1, 9);
  const auto p = clf.classify(x);
  ASSERT_EQ(p.size(), 6u);
  for (const auto& row : p) {
    ASSERT_EQ(row.size(), 3u);
    double sum = 0.0;
    for (double v : row) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-6);
  }
  EXPECT_EQ(clf.classify(x), p);
}

TEST(Classifier, UnloadedIsStateError) {
  const TorchClassifier clf;
  EXPECT_FALSE(clf.loaded());
  EXPECT_THROW(clf.classify(Image(32, 32, 1)), StateError);
  EXPECT_THROW(clf.num_classes(), StateError);
}

TEST(Classifier, LogitGradientMatchesFiniteDifference) {
  ClassifierConfig cfg;
  cfg.image_size = 16;
  torch::manual_seed(3);
  ClassifierNet net(cfg);
  const TorchClassifier clf(net);
  Rng rng(2);
  const Image x = test::random_image(16, 16, 1, rng);
  const Image g = clf.logit_gradient(x, 1);
  ASSERT_TRUE(g.same_shape(x));
  // Central differences on a float64 copy of the same weights.
  net->to(torch::kFloat64);
  torch::NoGradGuard no_grad;
  const torch::Tensor input = images_to_tensor(std::span<const Image>(&x, 1)).to(torch::kFloat64);
  for (int probe : {0, 37, 130, 255}) {
    const double h = 1e-6;
    torch::Tensor plus = input.clone(), minus = input.clone();
    plus.view(-1)[probe] += h;
    minus.view(-1)[probe] -= h;
    const double fd = (net->forward(plus)[0][1].item<double>() - net->forward(minus)[0][1].item<double>()) / (2 * h);
    EXPECT_NEAR(g.pixels[probe], fd, 1e-5 + 1e-3 * std::abs(fd)) << probe;
  }
}

TEST(TrainClassifier, ZeroLearningRateKeepsParameters) {
  data::SyntheticSpec spec;
  spec.image_size = 32;
  spec.placement_margin = 8;
  spec.train_per_class = 16;
  spec.test_per_class = 4;
  const auto ds = data::generate_synthetic(spec);
  ClassifierConfig cfg;
  cfg.image_size = 32;
  ClassifierTrainConfig tc;
  tc.epochs = 1;
  tc.learning_rate = 0.0;
  tc.seed = 5;
  const auto trained = train_classifier(ds.split(data::Split::train), ds.split(data::Split::test), cfg, tc);
  torch::manual_seed(derive_seed(5, "classifier-init"));
  const TorchClassifier fresh{ClassifierNet(cfg)};
  EXPECT_TRUE(same_params(trained.export_params(), fresh.export_params()));
}

TEST(TrainClassifier, FixedSeedGivesIdenticalParameters) {
  data::SyntheticSpec spec;
  spec.image_size = 32;
  spec.placement_margin = 8;
  spec.train_per_class = 32;
  spec.test_per_class = 4;
  const auto ds = data::generate_synthetic(spec);
  ClassifierConfig cfg;
  cfg.image_size = 32;
  ClassifierTrainConfig tc;
  tc.epochs = 2;
  tc.seed = 11;
  const auto a = train_classifier(ds.split(data::Split::train), ds.split(data::Split::test), cfg, tc);
  const auto b = train_classifier(ds.split(data::Split::train), ds.split(data::Split::test), cfg, tc);
  EXPECT_TRUE(same_params(a.export_params(), b.export_params()));
}

TEST(TrainClassifier, SyntheticTaskIsLearned) {
  data::SyntheticSpec spec;
  spec.train_per_class = 300;
  spec.test_per_class = 100;
  spec.seed = 3;
  const auto ds = data::generate_synthetic(spec);
  ClassifierTrainReport report;
  ClassifierTrainConfig tc;
  tc.epochs = 3;
  train_classifier(ds.split(data::Split::train), ds.split(data::Split::test), ClassifierConfig{}, tc, &report);
  EXPECT_GE(report.test_accuracy, 0.95);
  EXPECT_EQ(report.epoch_loss.size(), 3u);
}

TEST(TrainClassifier, BackgroundOnlyAblationIsNearChance) {
  data::SyntheticSpec spec;
  spec.train_per_class = 300;
  spec.test_per_class = 500;
  spec.motifs_enabled = false;
  spec.seed = 4;
  const auto ds = data::generate_synthetic(spec);
  ClassifierTrainReport report;
  ClassifierTrainConfig tc;
  tc.epochs = 3;
  train_classifier(ds.split(data::Split::train), ds.split(data::Split::test), ClassifierConfig{}, tc, &report);
  EXPECT_NEAR(report.test_accuracy, 0.5, 0.05);
}

TEST(Checkpoint, RoundTripPreservesEverything) {
  auto nets = std::make_shared<CaeNetworks>(small_model(), 4);
  NetworkParams params = nets->export_params();
  params.extra = {{"epoch", 3}};
  const fs::path path = fs::temp_directory_path() / "cae_test_ckpt" / "a.ckpt";
  save_checkpoint(path, params);
  const NetworkParams back = load_checkpoint(path);
  EXPECT_EQ(back.component, "cae");
  EXPECT_EQ(back.extra["epoch"], 3);
  EXPECT_EQ(back.config, params.config);
  EXPECT_TRUE(same_params(back, params));
  const CaeNetworks restored = CaeNetworks::from_params(back);
  const TorchCodeModel a(nets), b(std::make_shared<CaeNetworks>(restored));
  const auto x = random_images(2, 32, 1, 8);
  EXPECT_EQ(a.encode(x)[1].class_code, b.encode(x)[1].class_code);
  // Saving the loaded parameters reproduces the file byte for byte.
  const fs::path again = path.parent_path() / "b.ckpt";
  save_checkpoint(again, back);
  std::ifstream f1(path, std::ios::binary), f2(again, std::ios::binary);
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(f1), {}), std::string(std::istreambuf_iterator<char>(f2), {}));
}

TEST(Checkpoint, ClassifierRoundTrip) {
  ClassifierConfig cfg;
  cfg.image_size = 32;
  const TorchClassifier clf{ClassifierNet(cfg)};
  const fs::path path = fs::temp_directory_path() / "cae_test_ckpt" / "clf.ckpt";
  save_checkpoint(path, clf.export_params());
  const TorchClassifier back = TorchClassifier::from_params(load_checkpoint(path));
  const auto x = random_images(3, 32, 1, 1);
  EXPECT_EQ(back.classify(x), clf.classify(x));
  EXPECT_THROW(CaeNetworks::from_params(load_checkpoint(path)), ConfigError);
}

TEST(Checkpoint, RejectsCorruptInputs) {
  const fs::path dir = fs::temp_directory_path() / "cae_test_ckpt";
  fs::create_directories(dir);
  std::ofstream(dir / "junk.ckpt", std::ios::binary) << "definitely not a checkpoint";
  EXPECT_THROW(load_checkpoint(dir / "junk.ckpt"), ConfigError);
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), std::runtime_error);

  auto nets = std::make_shared<CaeNetworks>(small_model(), 0);
  save_checkpoint(dir / "ok.ckpt", nets->export_params());
  std::string bytes;
  {
    std::ifstream in(dir / "ok.ckpt", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  std::string future = bytes;
  future[8] = static_cast<char>(kCheckpointMajor + 1);  // major version field
  std::ofstream(dir / "future.ckpt", std::ios::binary) << future;
  EXPECT_THROW(load_checkpoint(dir / "future.ckpt"), ConfigError);
  std::ofstream(dir / "short.ckpt", std::ios::binary) << bytes.substr(0, bytes.size() - 10);
  EXPECT_THROW(load_checkpoint(dir / "short.ckpt"), ConfigError);

  NetworkParams bad = nets->export_params();
  bad.arrays[0].data[0] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(save_checkpoint(dir / "nan.ckpt", bad), ContractError);
  NetworkParams wrong = nets->export_params();
  wrong.arrays[0].shape[0] += 1;
  EXPECT_THROW(wrong.validate(), ContractError);
}

TEST(Checkpoint, ShapeMismatchOnImportIsConfigError) {
  auto nets = std::make_shared<CaeNetworks>(small_model(), 0);
  ModelConfig other = small_model();
  other.base_channels = 4;
  CaeNetworks different(other, 0);
  EXPECT_THROW(different.import_params(nets->export_params()), ConfigError);
}

TEST(ModelConfig, ValidationAndJson) {
  ModelConfig c;
  c.image_size = 30;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ModelConfig{};
  c.activation = Activation::silu;
  c.class_code_dim = 5;
  const nlohmann::json j = c;
  const ModelConfig back = j.get<ModelConfig>();
  EXPECT_EQ(back.activation, Activation::silu);
  EXPECT_EQ(back.class_code_dim, 5);
}

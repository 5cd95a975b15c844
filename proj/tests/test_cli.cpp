#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cae/cli/app.hpp"
#include "cae/cli/pipeline.hpp"
#include "cae/cli/run_config.hpp"
#include "cae/service/handlers.hpp"

namespace cae {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const char* kTinyConfig = R"({
  "seed": 3,
  "synthetic": {"image_size": 32, "train_per_class": 12, "test_per_class": 6},
  "classifier_train": {"epochs": 2},
  "model": {"base_channels": 4, "individual_channels": 4, "discriminator_channels": 4, "residual_blocks": 1},
  "train": {"epochs": 1, "pairs_per_epoch": 4, "batch_size": 4},
  "manifold": {"projection": "pca", "probe_folds": 2, "probe_trees": 5, "smote_count": 4, "smoothness_carriers": 2},
  "explain": {"steps": 3},
  "evaluate": {"limit": 4, "metric_steps": 3}
})";

TEST(Cli, HelpExitsZero) {
  const CliResult r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("train-cae"), std::string::npos);
  EXPECT_EQ(cli({"explain", "--help"}).code, 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  const CliResult r = cli({"transmogrify"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(cli({"train-cae"}).code, 2);  // --dataset is required
  EXPECT_EQ(cli({"train-cae", "--dataset", "/no/such/dir"}).code, 2);
  EXPECT_EQ(cli({"explain", "--dataset", "/tmp", "--checkpoint", "/no/file", "--classifier", "/no/file",
                 "--sample-id", "x"})
                .code,
            2);
}

TEST(Cli, BadConfigIsRuntimeError) {
  const fs::path dir = fs::temp_directory_path() / "cae_cli_badcfg";
  fs::create_directories(dir);
  std::ofstream(dir / "cfg.json") << R"({"sede": 1})";
  const CliResult r = cli({"synth-data", "--config", (dir / "cfg.json").string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
  fs::remove_all(dir);
}

TEST(Cli, DefaultOutputRootFollowsEnvironment) {
  ::setenv("CAE_EXPLAIN_HOME", "/tmp/cae_home", 1);
  EXPECT_EQ(cli::default_output_dir("evaluate"), "/tmp/cae_home/evaluate");
  ::unsetenv("CAE_EXPLAIN_HOME");
  EXPECT_EQ(cli::default_output_dir("evaluate"), "cae_runs/evaluate");
}

TEST(Cli, FlagsOverrideConfig) {
  cli::RunConfig c = json::parse(kTinyConfig).get<cli::RunConfig>();
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.explain.steps, 3);
  c.apply_seed(9);
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.synthetic.seed, 9u);
  EXPECT_EQ(c.classifier_train.seed, 9u);
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root = fs::temp_directory_path() / "cae_cli_pipeline";
    fs::remove_all(root);
    fs::create_directories(root);
    std::ofstream(root / "config.json") << kTinyConfig;
    ASSERT_EQ(step({"synth-data", "--out", s(root / "data")}).code, 0);
    ASSERT_EQ(step({"train-classifier", "--dataset", s(root / "data"), "--out", s(root / "clf")}).code, 0);
    ASSERT_EQ(step({"train-cae", "--dataset", s(root / "data"), "--classifier", s(root / "clf/classifier.ckpt"),
                    "--out", s(root / "cae")})
                  .code,
              0);
    ASSERT_EQ(step({"export-manifold", "--dataset", s(root / "data"), "--checkpoint", s(root / "cae/cae.ckpt"),
                    "--classifier", s(root / "clf/classifier.ckpt"), "--out", s(root / "manifold")})
                  .code,
              0);
  }
  static void TearDownTestSuite() { fs::remove_all(root); }

  static std::string s(const fs::path& p) { return p.string(); }
  static CliResult step(std::vector<std::string> args) {
    args.push_back("--config");
    args.push_back(s(root / "config.json"));
    CliResult r = cli(args);
    EXPECT_EQ(r.code, 0) << args[0] << ": " << r.err;
    return r;
  }
  std::vector<std::string> model_args() const {
    return {"--dataset", s(root / "data"), "--checkpoint", s(root / "cae/cae.ckpt"), "--classifier",
            s(root / "clf/classifier.ckpt")};
  }

  static fs::path root;
};
fs::path CliPipeline::root;

TEST_F(CliPipeline, CommandsWriteArtifactsAndManifests) {
  for (const char* f : {"data/manifest.json", "clf/classifier.ckpt", "clf/classifier_report.json", "cae/cae.ckpt",
                        "cae/metrics.jsonl", "cae/timing.jsonl", "cae/train_report.json", "manifold/manifold.jsonl",
                        "manifold/analytics.json"}) {
    EXPECT_TRUE(fs::exists(root / f)) << f;
  }
  for (const char* d : {"data", "clf", "cae", "manifold"}) {
    const json m = read_json(root / d / "run_manifest.json");
    EXPECT_EQ(m["seed"], 3);
    EXPECT_FALSE(m["version"].get<std::string>().empty());
    EXPECT_TRUE(m["config"].is_object());
    for (const auto& [file, digest] : m["outputs"].items()) EXPECT_TRUE(fs::exists(root / d / file)) << file;
  }
  const json m = read_json(root / "manifold/run_manifest.json");
  EXPECT_EQ(m["command"], "export-manifold");
  EXPECT_TRUE(m["inputs"].contains("checkpoint"));
  EXPECT_EQ(read_json(root / "cae/run_manifest.json")["config"]["train"]["epochs"], 1);
  // Manifold export covers the test split.
  EXPECT_EQ(manifold::read_records(root / "manifold/manifold.jsonl").size(), 12u);
}

TEST_F(CliPipeline, ExplainMatchesServiceSaliency) {
  const std::string id = "test_bright_00002";
  std::vector<std::string> args{"explain", "--sample-id", id, "--manifold", s(root / "manifold/manifold.jsonl"),
                                "--out", s(root / "explain")};
  for (const auto& a : model_args()) args.push_back(a);
  ASSERT_EQ(step(args).code, 0);
  for (const char* f : {"explanation.json", "saliency.png", "frames.png", "run_manifest.json"})
    EXPECT_TRUE(fs::exists(root / "explain" / f)) << f;
  const json e = read_json(root / "explain/explanation.json");

  // The same request through the service layer.
  const data::Dataset ds = cli::resolve_dataset(root / "data");
  cli::ManifoldExport m;
  m.records = manifold::read_records(root / "manifold/manifold.jsonl");
  m.index = cli::index_from_records(m.records);
  m.projection = "pca";
  auto session = cli::make_session(
      ds, std::make_shared<nets::TorchCodeModel>(cli::load_cae(root / "cae/cae.ckpt")),
      cli::load_classifier(root / "clf/classifier.ckpt"), std::move(m));
  const json served = service::handle_saliency(
      session.get(),
      {{"from_id", id}, {"target", {{"class_index", e["target_class"]}}}, {"steps", 3}, {"mode", "weighted"}});
  EXPECT_EQ(served["values"].get<std::vector<float>>(), e["values"].get<std::vector<float>>());
  EXPECT_EQ(served["total"].get<double>(), e["saliency_total"].get<double>());
}

TEST_F(CliPipeline, RecomputeFlagReachesConfig) {
  std::vector<std::string> args{"explain", "--sample-id", "test_dark_00001", "--recompute-individual", "--out",
                                s(root / "explain_rc")};
  for (const auto& a : model_args()) args.push_back(a);
  ASSERT_EQ(step(args).code, 0);
  EXPECT_EQ(read_json(root / "explain_rc/run_manifest.json")["config"]["explain"]["recompute_individual"], true);
  EXPECT_EQ(read_json(root / "cae/run_manifest.json")["config"]["explain"]["recompute_individual"], false);
}

TEST_F(CliPipeline, EvaluateWritesComparisonAndIsRepeatable) {
  auto run_eval = [&](const std::string& out) {
    auto args = model_args();
    args.insert(args.begin(), "evaluate");
    for (const std::string& a : std::vector<std::string>{"--metric-N", "3", "--limit", "4", "--out", s(root / out)}) args.push_back(a);
    return step(args);
  };
  ASSERT_EQ(run_eval("eval1").code, 0);
  ASSERT_EQ(run_eval("eval2").code, 0);
  for (const char* f : {"comparison.json", "curves.jsonl", "saliency_accuracy.json"}) {
    ASSERT_TRUE(fs::exists(root / "eval1" / f)) << f;
    EXPECT_EQ(slurp(root / "eval1" / f), slurp(root / "eval2" / f)) << f;
  }
  const json c = read_json(root / "eval1/comparison.json");
  EXPECT_EQ(c["rows"].size(), 3u);
}

}  // namespace
}  // namespace cae

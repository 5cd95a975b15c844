#include "cae/cli/app.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cae/cli/pipeline.hpp"
#include "cae/cli/run_config.hpp"
#include "cae/common/digest.hpp"
#include "cae/common/errors.hpp"
#include "cae/data/image_io.hpp"
#include "cae/explain/explainer.hpp"
#include "cae/explain/saliency_map.hpp"
#include "cae/manifold/export.hpp"
#include "cae/nets/checkpoint.hpp"
#include "cae/service/handlers.hpp"
#include "cae/service/server.hpp"
#include "cae/training/trainer.hpp"

#ifndef CAE_VERSION
#define CAE_VERSION "0.0.0"
#endif

namespace cae::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string dataset;
  std::string checkpoint;
  std::string classifier;
  std::string manifold;
  std::string target_class;
  std::string sample_id;
  std::optional<int> steps;
  std::optional<std::string> mode;
  bool recompute_individual = false;
  std::optional<int> metric_n;
  std::optional<std::size_t> limit;
  std::vector<std::string> methods;
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// Collects inputs and outputs while a command runs, then writes run_manifest.json.
class Manifest {
 public:
  Manifest(std::string command, const fs::path& out_dir, const RunConfig& config)
      : command_(std::move(command)), out_dir_(out_dir), config_(config) {}

  void input(const std::string& name, const std::string& path) {
    if (path.empty()) return;
    inputs_[name] = {{"path", path}, {"digest", digest_path(path)}};
  }
  void output(const fs::path& file) { outputs_.push_back(fs::relative(file, out_dir_).generic_string()); }
  void set(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

  void write() const {
    nlohmann::ordered_json j;
    j["command"] = command_;
    j["version"] = CAE_VERSION;
    j["seed"] = config_.seed;
    j["config"] = nlohmann::ordered_json::parse(nlohmann::json(config_).dump());
    j["inputs"] = inputs_;
    nlohmann::ordered_json outs = nlohmann::ordered_json::object();
    for (const auto& f : outputs_) outs[f] = digest_path(out_dir_ / f);
    j["outputs"] = outs;
    for (const auto& [k, v] : extra_.items()) j[k] = v;
    std::ofstream(out_dir_ / "run_manifest.json") << j.dump(2) << '\n';
  }

 private:
  std::string command_;
  fs::path out_dir_;
  RunConfig config_;
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::object();
  std::vector<std::string> outputs_;
  nlohmann::ordered_json extra_ = nlohmann::ordered_json::object();
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

RunConfig effective_config(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.seed) c.apply_seed(*o.seed);
  if (o.steps) c.explain.steps = *o.steps;
  if (o.mode) c.explain.mode = *o.mode;
  if (o.recompute_individual) c.explain.recompute_individual = true;
  if (o.metric_n) c.evaluate.metric_steps = *o.metric_n;
  if (o.limit) c.evaluate.limit = *o.limit;
  if (!o.methods.empty()) c.evaluate.methods = o.methods;
  c.validate();
  return c;
}

fs::path output_dir(const Options& o, const std::string& command) {
  fs::path dir = o.out.empty() ? fs::path(default_output_dir(command)) : fs::path(o.out);
  fs::create_directories(dir);
  return dir;
}

int cmd_synth_data(const Options& o, std::ostream& out) {
  const RunConfig config = effective_config(o);
  const fs::path dir = output_dir(o, "synth-data");
  Manifest manifest("synth-data", dir, config);
  const data::Dataset ds = data::generate_synthetic(config.synthetic);
  data::save_dataset(ds, dir, {{"synthetic", config.synthetic}});
  manifest.output(dir / "manifest.json");
  manifest.set("samples", ds.samples.size());
  manifest.write();
  out << "wrote " << ds.samples.size() << " samples to " << dir.string() << "\n";
  return 0;
}

int cmd_train_classifier(const Options& o, std::ostream& out) {
  RunConfig config = effective_config(o);
  const data::Dataset ds = resolve_dataset(o.dataset);
  fit_to_dataset(config, ds.manifest);
  const fs::path dir = output_dir(o, "train-classifier");
  Manifest manifest("train-classifier", dir, config);
  manifest.input("dataset", o.dataset);
  nets::set_deterministic(1);
  nets::ClassifierTrainReport report;
  const auto clf = nets::train_classifier(ds.split(data::Split::train), ds.split(data::Split::test), config.classifier,
                                          config.classifier_train, &report);
  nets::save_checkpoint(dir / "classifier.ckpt", clf.export_params());
  write_json(dir / "classifier_report.json", {{"epoch_loss", report.epoch_loss},
                                             {"train_accuracy", report.train_accuracy},
                                             {"test_accuracy", report.test_accuracy}});
  manifest.output(dir / "classifier.ckpt");
  manifest.output(dir / "classifier_report.json");
  manifest.write();
  out << "test accuracy " << report.test_accuracy << "\n";
  return 0;
}

int cmd_train_cae(const Options& o, std::ostream& out) {
  RunConfig config = effective_config(o);
  const data::Dataset ds = resolve_dataset(o.dataset);
  fit_to_dataset(config, ds.manifest);
  const fs::path dir = output_dir(o, "train-cae");
  Manifest manifest("train-cae", dir, config);
  manifest.input("dataset", o.dataset);
  manifest.input("classifier", o.classifier);
  nets::set_deterministic(1);

  std::shared_ptr<nets::TorchClassifier> clf;
  if (!o.classifier.empty()) clf = load_classifier(o.classifier);
  if (config.train.dc_mode == training::DcMode::external && !clf) throw ConfigError("external dc_mode needs --classifier");
  training::TrainLoopOptions options;
  options.checkpoint_dir = dir / "checkpoints";
  options.swap_judge = clf.get();
  if (config.train.dc_mode == training::DcMode::external) options.external_classifier = clf.get();
  options.on_epoch = [&](const training::EpochRecord& e) {
    out << "epoch " << e.epoch << " g_total " << e.mean_losses.at("g_total") << " d_total "
        << e.mean_losses.at("d_total") << " validation_swap_success " << e.validation_swap_success << std::endl;
  };
  const training::TrainResult result =
      training::train_loop(ds.split(data::Split::train), config.model, config.train, config.weights, options);

  fs::copy_file(result.report.final_checkpoint, dir / "cae.ckpt", fs::copy_options::overwrite_existing);
  write_text(dir / "metrics.jsonl", result.report.metrics_jsonl());
  write_text(dir / "timing.jsonl", result.report.timing_jsonl());
  write_json(dir / "train_report.json", {{"epochs", result.report.epochs.size()},
                                        {"best_epoch", result.report.best_epoch},
                                        {"best_validation_swap_success", result.report.best_validation_swap_success}});
  for (const auto& p : result.report.checkpoints) manifest.output(p);
  manifest.output(dir / "cae.ckpt");
  manifest.output(dir / "metrics.jsonl");
  manifest.output(dir / "train_report.json");
  manifest.write();
  out << "best epoch " << result.report.best_epoch << " validation swap success "
      << result.report.best_validation_swap_success << "\n";
  return 0;
}

int cmd_export_manifold(const Options& o, std::ostream& out) {
  RunConfig config = effective_config(o);
  const data::Dataset ds = resolve_dataset(o.dataset);
  const fs::path dir = output_dir(o, "export-manifold");
  Manifest manifest("export-manifold", dir, config);
  manifest.input("dataset", o.dataset);
  manifest.input("checkpoint", o.checkpoint);
  manifest.input("classifier", o.classifier);
  nets::set_deterministic(1);
  const nets::TorchCodeModel model(load_cae(o.checkpoint));
  const ManifoldExport exported = export_manifold(ds, model, config.manifold);
  manifold::write_records(dir / "manifold.jsonl", exported.records);
  manifest.output(dir / "manifold.jsonl");
  if (!o.classifier.empty()) {
    const auto clf = load_classifier(o.classifier);
    const ManifoldAnalytics a = analyze_manifold(ds, exported.index, model, *clf, config.manifold, config.seed);
    write_json(dir / "analytics.json", a.to_json());
    manifest.output(dir / "analytics.json");
    out << "probe " << a.probe_mean << " swap success " << a.swap_success << " smoothness " << a.smoothness << "\n";
  }
  manifest.write();
  out << "wrote " << exported.records.size() << " records (" << exported.projection << ")\n";
  return 0;
}

manifold::ManifoldIndex index_for(const Options& o, const data::Dataset& ds, const nets::CodeModel& model,
                                  const RunConfig& config) {
  if (!o.manifold.empty()) return index_from_records(manifold::read_records(o.manifold));
  return index_for_split(ds, data::parse_split(config.manifold.split), model);
}

int cmd_explain(const Options& o, std::ostream& out) {
  RunConfig config = effective_config(o);
  const data::Dataset ds = resolve_dataset(o.dataset);
  const fs::path dir = output_dir(o, "explain");
  Manifest manifest("explain", dir, config);
  manifest.input("dataset", o.dataset);
  manifest.input("checkpoint", o.checkpoint);
  manifest.input("classifier", o.classifier);
  manifest.input("manifold", o.manifold);
  nets::set_deterministic(1);
  const nets::TorchCodeModel model(load_cae(o.checkpoint));
  const auto clf = load_classifier(o.classifier);
  const manifold::ManifoldIndex index = index_for(o, ds, model, config);
  const data::ImageSample& exemplar = ds.by_id(o.sample_id);
  const int target = o.target_class.empty() ? counter_class(exemplar, *clf) : ds.manifest.class_by_name(o.target_class).index;

  explain::ExplainConfig ec;
  ec.steps = config.explain.steps;
  ec.mode = explain::parse_mode(config.explain.mode);
  ec.stop_early = config.explain.stop_early;
  ec.recompute_individual = config.explain.recompute_individual;
  const explain::Explainer explainer(&model, clf.get(), &index);
  const explain::Explanation e = explainer.explain(exemplar.pixels, manifold::ClassTarget{target}, ec);

  nlohmann::ordered_json j;
  j["sample_id"] = exemplar.id;
  j["label"] = exemplar.label.name;
  j["target_class"] = target;
  j["steps"] = e.path.steps;
  j["mode"] = explain::to_string(e.saliency.mode);
  j["probs"] = e.series.probs;
  j["stop_index"] = e.series.stop_index ? nlohmann::json(*e.series.stop_index) : nlohmann::json(nullptr);
  j["saliency_total"] = e.saliency.total();
  if (const Image* mask = ds.mask_for(exemplar.id)) j["mass_inside_mask"] = e.saliency.mass_fraction_inside(*mask);
  j["height"] = e.saliency.height;
  j["width"] = e.saliency.width;
  j["values"] = e.saliency.values;
  write_json(dir / "explanation.json", j);
  data::write_png(dir / "saliency.png", explain::normalized_max1(e.saliency).to_image(), 16);
  data::write_png(dir / "frames.png", data::hstack(e.series.frames), 16);
  for (const char* f : {"explanation.json", "saliency.png", "frames.png"}) manifest.output(dir / f);
  manifest.write();
  out << "explained " << exemplar.id << " towards class " << target << "\n";
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  RunConfig config = effective_config(o);
  const data::Dataset ds = resolve_dataset(o.dataset);
  const fs::path dir = output_dir(o, "evaluate");
  Manifest manifest("evaluate", dir, config);
  manifest.input("dataset", o.dataset);
  manifest.input("checkpoint", o.checkpoint);
  manifest.input("classifier", o.classifier);
  manifest.input("manifold", o.manifold);
  nets::set_deterministic(1);
  const nets::TorchCodeModel model(load_cae(o.checkpoint));
  const auto clf = load_classifier(o.classifier);
  const manifold::ManifoldIndex index = index_for(o, ds, model, config);
  const auto exemplars = select_exemplars(ds.split(data::Split::test), config.evaluate.limit, config.seed);
  const Evaluation ev = evaluate_methods(ds, exemplars, model, *clf, index, config);
  write_json(dir / "comparison.json", ev.comparison.to_json());
  write_text(dir / "curves.jsonl", ev.comparison.curves_jsonl());
  write_json(dir / "saliency_accuracy.json", ev.saliency_accuracy_json());
  for (const char* f : {"comparison.json", "curves.jsonl", "saliency_accuracy.json"}) manifest.output(dir / f);
  manifest.write();
  for (const auto& r : ev.comparison.rows) out << r.method << " aopc " << r.aopc << " pd " << r.pd << "\n";
  return 0;
}

int cmd_serve(const Options& o, std::ostream& out) {
  RunConfig config = effective_config(o);
  data::Dataset ds = resolve_dataset(o.dataset);
  nets::set_deterministic(1);
  auto model = std::make_shared<nets::TorchCodeModel>(load_cae(o.checkpoint));
  auto clf = load_classifier(o.classifier);
  ManifoldExport exported;
  if (!o.manifold.empty()) {
    exported.records = manifold::read_records(o.manifold);
    exported.index = index_from_records(exported.records);
    exported.projection = "file";
  } else {
    exported = export_manifold(ds, *model, config.manifold);
  }
  auto session = make_session(std::move(ds), model, clf, std::move(exported));
  session->checkpoint_digest = digest_path(o.checkpoint);
  session->classifier_digest = digest_path(o.classifier);
  auto holder = std::make_shared<service::SessionHolder>(session);
  service::Server server(holder);
  const int port = server.bind(o.host, o.port);
  out << "listening on http://" << o.host << ":" << port << std::endl;
  server.listen();
  return 0;
}

}  // namespace

std::string default_output_dir(const std::string& command) {
  const char* home = std::getenv("CAE_EXPLAIN_HOME");
  return (fs::path(home && *home ? home : "cae_runs") / command).string();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Class association embedding explainer", "cae_explain");
  app.set_version_flag("--version", CAE_VERSION);
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Master seed; overrides every seed in the config");
  };
  auto with_out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Output directory"); };
  auto with_dataset = [&](CLI::App* sub) {
    sub->add_option("--dataset", o.dataset, "Dataset directory or synthetic spec (.json)")
        ->required()
        ->check(CLI::ExistingPath);
  };
  auto with_models = [&](CLI::App* sub, bool classifier_required) {
    sub->add_option("--checkpoint", o.checkpoint, "CAE checkpoint")->required()->check(CLI::ExistingFile);
    auto* c = sub->add_option("--classifier", o.classifier, "Black-box classifier checkpoint")->check(CLI::ExistingFile);
    if (classifier_required) c->required();
  };
  auto with_explain = [&](CLI::App* sub) {
    sub->add_option("--steps", o.steps, "Path steps")->check(CLI::PositiveNumber);
    sub->add_option("--mode", o.mode, "Saliency mode")->check(CLI::IsMember({"weighted", "endpoint"}));
    sub->add_flag("--recompute-individual", o.recompute_individual, "Re-encode s from each frame instead of holding it fixed");
    sub->add_option("--manifold", o.manifold, "Exported manifold records to use as the index")->check(CLI::ExistingFile);
  };

  auto* synth = app.add_subcommand("synth-data", "Render the synthetic ground-truth dataset");
  common(synth);
  with_out(synth);

  auto* tclf = app.add_subcommand("train-classifier", "Train the black-box classifier");
  common(tclf);
  with_out(tclf);
  with_dataset(tclf);

  auto* tcae = app.add_subcommand("train-cae", "Train the encoder, decoder and discriminator");
  common(tcae);
  with_out(tcae);
  with_dataset(tcae);
  tcae->add_option("--classifier", o.classifier, "Classifier judging validation swaps (required in external mode)")
      ->check(CLI::ExistingFile);

  auto* exp = app.add_subcommand("export-manifold", "Encode a split, project it and write manifold records");
  common(exp);
  with_out(exp);
  with_dataset(exp);
  with_models(exp, false);

  auto* expl = app.add_subcommand("explain", "Counterfactual series and saliency for one sample");
  common(expl);
  with_out(expl);
  with_dataset(expl);
  with_models(expl, true);
  with_explain(expl);
  expl->add_option("--sample-id", o.sample_id, "Exemplar id")->required();
  expl->add_option("--target-class", o.target_class, "Target class name (default: most probable counter class)");

  auto* evl = app.add_subcommand("evaluate", "AOPC / PD comparison against baselines");
  common(evl);
  with_out(evl);
  with_dataset(evl);
  with_models(evl, true);
  with_explain(evl);
  evl->add_option("--metric-N", o.metric_n, "Number of perturbation steps")->check(CLI::PositiveNumber);
  evl->add_option("--limit", o.limit, "Number of test exemplars");
  evl->add_option("--methods", o.methods, "Methods to compare (cae, random, input_gradient)")->delimiter(',');

  auto* srv = app.add_subcommand("serve", "HTTP service for the explorer");
  common(srv);
  with_dataset(srv);
  with_models(srv, true);
  srv->add_option("--manifold", o.manifold, "Exported manifold records")->check(CLI::ExistingFile);
  srv->add_option("--host", o.host, "Bind address");
  srv->add_option("--port", o.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << "\n" << app.help();
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth_data(o, out);
    if (tclf->parsed()) return cmd_train_classifier(o, out);
    if (tcae->parsed()) return cmd_train_cae(o, out);
    if (exp->parsed()) return cmd_export_manifold(o, out);
    if (expl->parsed()) return cmd_explain(o, out);
    if (evl->parsed()) return cmd_evaluate(o, out);
    if (srv->parsed()) return cmd_serve(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace cae::cli

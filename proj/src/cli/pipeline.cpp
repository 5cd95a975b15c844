#include "cae/cli/pipeline.hpp"

#include <algorithm>
#include <map>

#include "cae/common/errors.hpp"
#include "cae/eval/baselines.hpp"
#include "cae/explain/explainer.hpp"
#include "cae/manifold/analytics.hpp"
#include "cae/manifold/projection.hpp"
#include "cae/manifold/smote.hpp"
#include "cae/nets/checkpoint.hpp"

namespace cae::cli {

namespace fs = std::filesystem;

data::Dataset resolve_dataset(const fs::path& arg) {
  if (fs::is_directory(arg)) return data::load_dataset(arg);
  if (fs::is_regular_file(arg) && arg.extension() == ".json") return data::generate_synthetic(data::load_synthetic_spec(arg));
  throw ConfigError("dataset '" + arg.string() + "' is neither a dataset directory nor a synthetic spec file");
}

std::shared_ptr<nets::CaeNetworks> load_cae(const fs::path& checkpoint) {
  return std::make_shared<nets::CaeNetworks>(nets::CaeNetworks::from_params(nets::load_checkpoint(checkpoint)));
}

std::shared_ptr<nets::TorchClassifier> load_classifier(const fs::path& checkpoint) {
  return std::make_shared<nets::TorchClassifier>(nets::TorchClassifier::from_params(nets::load_checkpoint(checkpoint)));
}

void fit_to_dataset(RunConfig& config, const data::DatasetManifest& manifest) {
  config.model.image_size = config.classifier.image_size = manifest.image_size;
  config.model.channels = config.classifier.channels = manifest.channels;
  config.model.num_classes = config.classifier.num_classes = manifest.num_classes();
}

manifold::ManifoldIndex index_for_split(const data::Dataset& dataset, data::Split split, const nets::CodeModel& model) {
  const auto samples = dataset.split(split);
  if (samples.empty()) throw ConfigError("dataset has no " + std::string(data::to_string(split)) + " samples");
  return manifold::build_index(samples, model);
}

manifold::ManifoldIndex index_from_records(const std::vector<manifold::ManifoldRecord>& records) {
  std::vector<manifold::ManifoldEntry> entries;
  entries.reserve(records.size());
  for (const auto& r : records)
    entries.push_back({r.id, {r.class_index, r.class_name}, nets::ClassCode{r.code}, data::parse_split(r.split)});
  return manifold::ManifoldIndex(std::move(entries));
}

ManifoldExport export_manifold(const data::Dataset& dataset, const nets::CodeModel& model, const ManifoldOptions& options) {
  ManifoldExport out;
  out.index = index_for_split(dataset, data::parse_split(options.split), model);
  const auto method = manifold::parse_projection(options.projection);
  out.records = manifold::make_records(out.index, manifold::project(out.index, method, options.tsne));
  out.projection = std::string(manifold::to_string(method));
  return out;
}

nlohmann::json ManifoldAnalytics::to_json() const {
  nlohmann::ordered_json smooth = nlohmann::ordered_json::object();
  for (const auto& [name, v] : smoothness_per_class) smooth[name] = v;
  nlohmann::ordered_json j;
  j["probe"] = {{"mean", probe_mean}, {"std", probe_std}, {"folds", probe_folds}};
  j["swap_success"] = {{"rate", swap_success}, {"trials", swap_trials}};
  j["smoothness"] = {{"overall", smoothness}, {"per_class", smooth}};
  return j;
}

ManifoldAnalytics analyze_manifold(const data::Dataset& dataset, const manifold::ManifoldIndex& index,
                                   const nets::CodeModel& model, const nets::BlackBoxClassifier& classifier,
                                   const ManifoldOptions& options, std::uint64_t seed) {
  ManifoldAnalytics a;
  manifold::ForestParams forest;
  forest.trees = options.probe_trees;
  forest.seed = derive_seed(seed, "probe-forest");
  const auto probe = manifold::probe_separability(index, options.probe_folds, derive_seed(seed, "probe-folds"), forest);
  a.probe_mean = probe.mean;
  a.probe_std = probe.stddev;
  a.probe_folds = probe.fold_accuracies;

  const auto samples = dataset.split(data::parse_split(options.split));
  const auto pairs = manifold::sample_swap_pairs(samples, derive_seed(seed, "swap"), options.swap_pairs_per_sample);
  const auto swap = manifold::class_swap_success_rate(samples, pairs, model, classifier);
  a.swap_success = swap.rate;
  a.swap_trials = swap.trials;

  // Carriers are individual codes of seeded draws from the split, shared by every class.
  Rng carrier_rng(derive_seed(seed, "smoothness-carriers"));
  std::vector<Image> carrier_images;
  for (int k = 0; k < options.smoothness_carriers; ++k)
    carrier_images.push_back(samples[uniform_index(carrier_rng, samples.size())].pixels);
  std::vector<nets::IndividualCode> carriers;
  for (auto& e : model.encode(carrier_images)) carriers.push_back(std::move(e.individual));

  Rng smote_rng(derive_seed(seed, "smote"));
  double total_hits = 0.0, total = 0.0;
  for (int k : index.class_indices()) {
    const auto codes = manifold::smote_resample(index, k, options.smote_count, options.smote_neighbors, smote_rng);
    double hits = 0.0;
    for (const auto& carrier : carriers) hits += manifold::smoothness_check(codes, carrier, model, classifier, k) * codes.size();
    const double n = static_cast<double>(codes.size() * carriers.size());
    a.smoothness_per_class.emplace_back(index.entries()[index.members(k).front()].label.name, hits / n);
    total_hits += hits;
    total += n;
  }
  a.smoothness = total > 0 ? total_hits / total : 0.0;
  return a;
}

int counter_class(const data::ImageSample& sample, const nets::BlackBoxClassifier& classifier) {
  const auto p = classifier.classify(sample.pixels);
  int best = -1;
  for (int k = 0; k < static_cast<int>(p.size()); ++k) {
    if (k == sample.label.index) continue;
    if (best < 0 || p[k] > p[best]) best = k;
  }
  if (best < 0) throw ContractError("counter_class: classifier has a single class");
  return best;
}

std::vector<data::ImageSample> select_exemplars(const std::vector<data::ImageSample>& samples, std::size_t limit,
                                                std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < samples.size(); ++i) by_class[samples[i].label.index].push_back(i);
  if (by_class.empty()) return {};
  const std::size_t per_class = std::max<std::size_t>(1, limit / by_class.size());
  Rng rng(derive_seed(seed, "exemplars"));
  std::vector<data::ImageSample> out;
  for (auto& [label, members] : by_class) {
    shuffle(members.begin(), members.end(), rng);
    for (std::size_t k = 0; k < std::min(per_class, members.size()); ++k) out.push_back(samples[members[k]]);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

nlohmann::json Evaluation::saliency_accuracy_json() const {
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [m, v] : mass_inside) per[m] = v;
  nlohmann::ordered_json j;
  j["masked_samples"] = masked_samples;
  j["mean_mass_inside_mask"] = per;
  return j;
}

Evaluation evaluate_methods(const data::Dataset& dataset, const std::vector<data::ImageSample>& exemplars,
                            const nets::CodeModel& model, const nets::BlackBoxClassifier& classifier,
                            const manifold::ManifoldIndex& index, const RunConfig& config) {
  const explain::Explainer explainer(&model, &classifier, &index);
  explain::ExplainConfig ec;
  ec.steps = config.explain.steps;
  ec.mode = explain::parse_mode(config.explain.mode);
  ec.stop_early = config.explain.stop_early;
  ec.recompute_individual = config.explain.recompute_individual;

  // Maps are computed once per (method, sample) and reused by the mask check.
  std::map<std::string, std::map<std::string, explain::SaliencyMap>> maps;
  std::vector<eval::MethodSpec> methods;
  for (const auto& name : config.evaluate.methods) {
    auto& cache = maps[name];
    for (const auto& s : exemplars) {
      if (name == "cae") {
        cache[s.id] = explainer.explain(s.pixels, manifold::ClassTarget{counter_class(s, classifier)}, ec).saliency;
      } else {
        cache[s.id] = eval::baseline_saliency(eval::parse_baseline(name), s, classifier, derive_seed(config.seed, name));
      }
    }
    methods.push_back({name, [&cache](const data::ImageSample& s) { return cache.at(s.id); }});
  }

  eval::PerturbationConfig pc;
  pc.patch_size = config.evaluate.patch_size;
  pc.steps = config.evaluate.metric_steps;
  pc.seed = derive_seed(config.seed, "perturbation");
  Evaluation out;
  out.comparison = eval::compare_methods(exemplars, methods, classifier, pc);
  for (const auto& s : exemplars) out.masked_samples += dataset.mask_for(s.id) != nullptr;
  for (const auto& name : config.evaluate.methods) {
    double acc = 0.0;
    for (const auto& s : exemplars)
      if (const Image* mask = dataset.mask_for(s.id)) acc += maps[name].at(s.id).mass_fraction_inside(*mask);
    out.mass_inside.emplace_back(name, out.masked_samples ? acc / static_cast<double>(out.masked_samples) : 0.0);
  }
  return out;
}

std::shared_ptr<service::Session> make_session(data::Dataset dataset, std::shared_ptr<const nets::CodeModel> model,
                                               std::shared_ptr<const nets::BlackBoxClassifier> classifier,
                                               ManifoldExport manifold) {
  auto s = std::make_shared<service::Session>();
  s->dataset = std::move(dataset);
  s->model = std::move(model);
  s->classifier = std::move(classifier);
  s->index = std::move(manifold.index);
  s->records = std::move(manifold.records);
  s->projection_method = manifold.projection;
  return s;
}

}  // namespace cae::cli

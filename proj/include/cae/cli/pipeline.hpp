#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "cae/cli/run_config.hpp"
#include "cae/data/dataset.hpp"
#include "cae/eval/compare.hpp"
#include "cae/manifold/export.hpp"
#include "cae/manifold/index.hpp"
#include "cae/nets/torch_adapters.hpp"
#include "cae/service/session.hpp"

namespace cae::cli {

// A dataset directory (with manifest.json) or a synthetic spec file (.json),
// rendered in memory.
data::Dataset resolve_dataset(const std::filesystem::path& arg);

std::shared_ptr<nets::CaeNetworks> load_cae(const std::filesystem::path& checkpoint);
std::shared_ptr<nets::TorchClassifier> load_classifier(const std::filesystem::path& checkpoint);

// Copies the dataset's size / channel / class count into the network configs.
void fit_to_dataset(RunConfig& config, const data::DatasetManifest& manifest);

// Index over the samples of one split, or rebuilt from exported records.
manifold::ManifoldIndex index_for_split(const data::Dataset& dataset, data::Split split, const nets::CodeModel& model);
manifold::ManifoldIndex index_from_records(const std::vector<manifold::ManifoldRecord>& records);

struct ManifoldExport {
  manifold::ManifoldIndex index;
  std::vector<manifold::ManifoldRecord> records;
  std::string projection;
};
ManifoldExport export_manifold(const data::Dataset& dataset, const nets::CodeModel& model, const ManifoldOptions& options);

/// The quantitative manifold checks: probe separability, swap success and SMOTE smoothness.
struct ManifoldAnalytics {
  double probe_mean = 0.0;
  double probe_std = 0.0;
  std::vector<double> probe_folds;
  double swap_success = 0.0;
  std::size_t swap_trials = 0;
  std::vector<std::pair<std::string, double>> smoothness_per_class;
  double smoothness = 0.0;  // over all resampled codes and carriers

  nlohmann::json to_json() const;
};
ManifoldAnalytics analyze_manifold(const data::Dataset& dataset, const manifold::ManifoldIndex& index,
                                   const nets::CodeModel& model, const nets::BlackBoxClassifier& classifier,
                                   const ManifoldOptions& options, std::uint64_t seed);

// Class an explanation of `sample` moves towards: the most probable class other
// than its own label.
int counter_class(const data::ImageSample& sample, const nets::BlackBoxClassifier& classifier);

// Up to `limit` samples, the same number per class, chosen by a seeded shuffle and
// returned in id order.
std::vector<data::ImageSample> select_exemplars(const std::vector<data::ImageSample>& samples, std::size_t limit,
                                                std::uint64_t seed);

struct Evaluation {
  eval::ComparisonReport comparison;
  // Mean fraction of saliency mass inside the ground-truth mask, per method,
  // over exemplars that have a mask.
  std::vector<std::pair<std::string, double>> mass_inside;
  std::size_t masked_samples = 0;

  nlohmann::json saliency_accuracy_json() const;
};
Evaluation evaluate_methods(const data::Dataset& dataset, const std::vector<data::ImageSample>& exemplars,
                            const nets::CodeModel& model, const nets::BlackBoxClassifier& classifier,
                            const manifold::ManifoldIndex& index, const RunConfig& config);

std::shared_ptr<service::Session> make_session(data::Dataset dataset, std::shared_ptr<const nets::CodeModel> model,
                                               std::shared_ptr<const nets::BlackBoxClassifier> classifier,
                                               ManifoldExport manifold);

}  // namespace cae::cli

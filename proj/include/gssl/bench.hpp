#pragma once

#include "gssl/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gssl {

/// Two interleaving unit half-circles: class 0 at (cos t, sin t), class 1 at
/// (1 - cos t, 0.5 - sin t), t evenly spaced on [0, pi], plus isotropic noise.
/// labels_per_class labels are revealed per class; ground truth is kept.
Dataset gen_two_moons(Index n, double noise, Index labels_per_class, std::uint64_t seed);

/// Isotropic Gaussian blobs, sample i drawn around center i mod (#centers).
/// Class = center index; at least two classes are declared even for one center.
Dataset gen_blobs(Index n, const Matrix& centers, double stddev, Index labels_per_class,
                  std::uint64_t seed);

/// CSV with header f1,...,fd,label[,truth]. The label cell is an integer class,
/// empty or '?' for unlabeled. The optional truth column carries ground truth.
Dataset read_csv(std::istream& in, std::optional<int> num_classes = std::nullopt);
Dataset load_csv(const std::filesystem::path& path, std::optional<int> num_classes = std::nullopt);
void write_csv(const Dataset& data, std::ostream& out);
void save_csv(const Dataset& data, const std::filesystem::path& path);

/// Fraction of masked positions where predicted == truth. An empty mask gives 0.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth,
                const std::vector<bool>& mask);

/// Outcome of running one configured experiment.
struct AlgorithmOutcome {
  std::string name;
  bool ok = true;
  std::string error;
  double accuracy = 0.0;
  double wall_ms = 0.0;
  int iterations = 0;
  bool converged = true;
  std::vector<int> predicted;
};

struct ExperimentReport {
  std::optional<Dataset> data;
  std::string config_digest;
  Index num_samples = 0;
  Index num_labeled = 0;
  double sigma = 0.0;
  std::vector<AlgorithmOutcome> algorithms;
  bool any_failed() const;
};

/// Runs the experiment described by a JSON configuration document.
/// Relative paths in the document resolve against base_dir.
/// Throws InvalidParameter / ParseError for configuration errors; algorithm
/// errors are captured per algorithm.
ExperimentReport run_experiment(std::string_view config_json,
                                const std::filesystem::path& base_dir = ".");

/// Report as JSON with sorted keys; include_timing = false drops wall-clock fields.
std::string report_json(const ExperimentReport& report, bool include_timing = true);

/// Per-point rows "x,y,true,predicted,algorithm" for every successful algorithm.
/// x and y are the first two features (y = 0 for one-dimensional data); true is
/// empty when no ground truth is known.
std::string predictions_csv(const ExperimentReport& report);

/// Scatter plot of a predictions CSV. Format chosen by extension: .svg or .csv.
void plot_predictions(const std::filesystem::path& predictions, const std::filesystem::path& output);

}  // namespace gssl

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmmd/classify.hpp"
#include "dmmd/dataio.hpp"
#include "dmmd/objectives.hpp"
#include "dmmd/statistics.hpp"

namespace dmmd {

enum class Classifier { kGlp, kOneNn };

const char* to_string(Classifier c);

struct AdaptConfig {
  Strategy strategy = Strategy::kStrategy1;
  AblationVariant variant = AblationVariant::kBoth;
  double gamma1 = 0.01;
  double gamma2 = 0.01;
  Index k = 20;
  double alpha = 0.05;
  double beta = 0.0;
  double lambda = 0.8;
  int t_iters = 5;
  Index p_neighbors = 20;
  NormalizeMode normalize = NormalizeMode::kZscoreL2;
  Classifier classifier = Classifier::kGlp;
  Metric metric = Metric::kCosine;
  double ridge = 0.0;
  WeightMode weight_mode = WeightMode::kProduct;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument for k, t_iters or p_neighbors below 1 and for
  /// negative alpha, ridge or gamma values.
  void validate() const;
  /// Soft range notes (beta outside [-1, 1], lambda outside [0, 1]).
  std::vector<std::string> range_warnings() const;
};

enum class Preset { kSmall, kLarge };

/// small: k=20, alpha=0.05. large: k=100, alpha=0.1. Both: T=5, p=20.
void apply_preset(AdaptConfig& cfg, Preset preset);
Preset parse_preset(const std::string& s);

struct IterationRecord {
  int iteration = 0;
  std::optional<double> accuracy;
  double objective = 0.0;  // sum of the kept generalized eigenvalues
  std::vector<int> classes_skipped;
  std::vector<std::pair<int, double>> implicit_weights;
  double constraint_residual = 0.0;
  double eig_residual = 0.0;
  double ridge_used = 0.0;
  std::vector<Index> isolated_targets;
  Labels labels;
  std::vector<std::string> warnings;
};

struct AdaptResult {
  AdaptConfig config;
  Index k_used = 0;
  Index p_used = 0;
  Labels initial_labels;
  std::optional<double> initial_accuracy;
  Labels final_labels;
  std::optional<double> final_accuracy;
  std::vector<IterationRecord> per_iteration;
  std::vector<std::string> notes;
  Eigen::MatrixXd z_source;  // final embeddings, unit-length columns
  Eigen::MatrixXd z_target;
  double elapsed_ms = 0.0;
};

/// Alternates projection learning and pseudo-label refresh for
/// cfg.t_iters iterations. Both domains are normalized with joint
/// statistics; iteration 1 uses 1-NN pseudo labels on the normalized
/// features. k is clamped to the feature count and p to n_st - 1, with a
/// note in the result.
AdaptResult adapt(const LabeledData& source, const Eigen::MatrixXd& target_x,
                  const std::optional<Labels>& target_truth, const AdaptConfig& cfg);

/// 1-NN on the normalized original features, no projection.
Labels no_adaptation_labels(const LabeledData& source, const Eigen::MatrixXd& target_x,
                            NormalizeMode mode);

/// Fraction of equal entries. Throws InvalidArgument on length mismatch or
/// empty input.
double evaluate_accuracy(const Labels& pred, const Labels& truth);

struct SuiteRow {
  std::string name;
  AdaptConfig config;
  AdaptResult result;
};

/// Rows MMD, D_tra, D_ter, D_tra+D_ter, Our-I, Our-II with the base
/// classifier, followed by MMD/Our-I/Our-II under both GLP and 1-NN.
std::vector<SuiteRow> run_ablation_suite(const LabeledData& source,
                                         const Eigen::MatrixXd& target_x,
                                         const std::optional<Labels>& target_truth,
                                         const AdaptConfig& base_cfg, unsigned workers = 1);

struct GridAxis {
  std::string param;  // beta, lambda, alpha, k, p, T, gamma1, gamma2
  std::vector<double> values;
};

struct GridPoint {
  AdaptConfig config;
  double accuracy = 0.0;
};

struct GridSearchResult {
  AdaptConfig best;
  double best_accuracy = 0.0;
  std::size_t best_index = 0;
  AdaptResult best_result;
  std::vector<GridPoint> table;
};

/// Cartesian product of the axes, first axis varying slowest. Picks the
/// highest final accuracy, earliest point on ties.
GridSearchResult grid_search(const LabeledData& source, const Eigen::MatrixXd& target_x,
                             const Labels& target_truth, const AdaptConfig& base_cfg,
                             const std::vector<GridAxis>& grid, unsigned workers = 1);

/// beta grid for s1, lambda grid for s2, empty otherwise.
std::vector<GridAxis> default_grid(Strategy strategy);

/// Sets a named numeric parameter on cfg; throws InvalidArgument for
/// unknown names.
void set_param(AdaptConfig& cfg, const std::string& param, double value);

/// Runs task(i) for i in [0, n) on up to `workers` threads. Results must be
/// written to per-index slots; the first failure by index is rethrown.
void run_indexed(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& task);

}  // namespace dmmd

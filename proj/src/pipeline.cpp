#include "dmmd/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "dmmd/errors.hpp"

namespace dmmd {

namespace {

Assembly assemble(const AdaptConfig& cfg, const Eigen::MatrixXd& x_st, const Labels& y_s,
                  const Labels& pseudo) {
  switch (cfg.strategy) {
    case Strategy::kBaseline:
      return assemble_baseline(x_st, y_s, pseudo, cfg.alpha);
    case Strategy::kStrategy1:
      return assemble_strategy1(x_st, y_s, pseudo, cfg.beta, cfg.alpha);
    case Strategy::kStrategy2:
      return assemble_strategy2(x_st, y_s, pseudo, cfg.lambda, cfg.alpha, cfg.weight_mode);
    case Strategy::kAblation:
      return assemble_ablation(x_st, y_s, pseudo, cfg.variant, cfg.gamma1, cfg.gamma2,
                               cfg.alpha);
  }
  throw InvalidArgument("unknown strategy");
}

std::optional<double> maybe_accuracy(const Labels& pred, const std::optional<Labels>& truth) {
  if (!truth) return std::nullopt;
  return evaluate_accuracy(pred, *truth);
}

}  // namespace

const char* to_string(Classifier c) { return c == Classifier::kGlp ? "glp" : "one_nn"; }

void AdaptConfig::validate() const {
  if (k < 1) throw InvalidArgument("AdaptConfig: k must be >= 1");
  if (t_iters < 1) throw InvalidArgument("AdaptConfig: t_iters must be >= 1");
  if (p_neighbors < 1) throw InvalidArgument("AdaptConfig: p_neighbors must be >= 1");
  if (!(alpha >= 0.0)) throw InvalidArgument("AdaptConfig: alpha must be >= 0");
  if (!(ridge >= 0.0)) throw InvalidArgument("AdaptConfig: ridge must be >= 0");
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) {
    throw InvalidArgument("AdaptConfig: gamma values must be >= 0");
  }
}

std::vector<std::string> AdaptConfig::range_warnings() const {
  std::vector<std::string> w;
  if (strategy == Strategy::kStrategy1 && (beta < -1.0 || beta > 1.0)) {
    w.push_back("beta=" + std::to_string(beta) + " outside [-1, 1]");
  }
  if (strategy == Strategy::kStrategy2 && (lambda < 0.0 || lambda > 1.0)) {
    w.push_back("lambda=" + std::to_string(lambda) + " outside [0, 1]");
  }
  return w;
}

void apply_preset(AdaptConfig& cfg, Preset preset) {
  if (preset == Preset::kSmall) {
    cfg.k = 20;
    cfg.alpha = 0.05;
  } else {
    cfg.k = 100;
    cfg.alpha = 0.1;
  }
  cfg.t_iters = 5;
  cfg.p_neighbors = 20;
}

Preset parse_preset(const std::string& s) {
  if (s == "small") return Preset::kSmall;
  if (s == "large") return Preset::kLarge;
  throw InvalidArgument("unknown preset '" + s + "' (expected small or large)");
}

double evaluate_accuracy(const Labels& pred, const Labels& truth) {
  if (pred.size() != truth.size()) {
    throw InvalidArgument("evaluate_accuracy: " + std::to_string(pred.size()) +
                          " predictions vs " + std::to_string(truth.size()) + " labels");
  }
  if (pred.empty()) throw InvalidArgument("evaluate_accuracy: empty label vectors");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

Labels no_adaptation_labels(const LabeledData& source, const Eigen::MatrixXd& target_x,
                            NormalizeMode mode) {
  source.validate();
  if (source.dim() != target_x.rows()) {
    throw InvalidArgument("no_adaptation_labels: source and target feature counts differ");
  }
  Eigen::MatrixXd joint(source.dim(), source.size() + target_x.cols());
  joint << source.x, target_x;
  const auto [normed, stats] = normalize(joint, mode);
  return one_nn_classify(normed.leftCols(source.size()), source.y,
                         normed.rightCols(target_x.cols()), Metric::kEuclideanGaussian);
}

AdaptResult adapt(const LabeledData& source, const Eigen::MatrixXd& target_x,
                  const std::optional<Labels>& target_truth, const AdaptConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  source.validate();
  const Index m = source.dim();
  const Index n_s = source.size();
  const Index n_t = target_x.cols();
  if (target_x.rows() != m) {
    throw InvalidArgument("adapt: source has " + std::to_string(m) + " features, target has " +
                          std::to_string(target_x.rows()));
  }
  if (n_t < 1) throw InvalidArgument("adapt: target domain is empty");
  if (target_truth && static_cast<Index>(target_truth->size()) != n_t) {
    throw InvalidArgument("adapt: truth labels do not match the target samples");
  }

  AdaptResult result;
  result.config = cfg;
  result.notes = cfg.range_warnings();
  result.k_used = std::min(cfg.k, m);
  if (result.k_used != cfg.k) {
    result.notes.push_back("k clamped from " + std::to_string(cfg.k) + " to feature count " +
                           std::to_string(m));
  }
  result.p_used = std::min(cfg.p_neighbors, n_s + n_t - 1);
  if (result.p_used != cfg.p_neighbors) {
    result.notes.push_back("p clamped from " + std::to_string(cfg.p_neighbors) + " to " +
                           std::to_string(result.p_used));
  }

  Eigen::MatrixXd x_st(m, n_s + n_t);
  x_st << source.x, target_x;
  x_st = normalize(x_st, cfg.normalize).first;

  const int num_classes = source.num_classes;
  Labels pseudo = one_nn_classify(x_st.leftCols(n_s), source.y, x_st.rightCols(n_t),
                                  Metric::kEuclideanGaussian);
  result.initial_labels = pseudo;
  result.initial_accuracy = maybe_accuracy(pseudo, target_truth);
  const Eigen::MatrixXd f_s = one_hot(source.y, num_classes);

  for (int t = 1; t <= cfg.t_iters; ++t) {
    const Assembly asm_ = assemble(cfg, x_st, source.y, pseudo);
    const Projection proj = learn_projection(asm_, result.k_used, cfg.ridge);

    Eigen::MatrixXd z = proj.a.transpose() * x_st;
    normalize_columns_l2(z);

    IterationRecord rec;
    rec.iteration = t;
    rec.objective = proj.theta.sum();
    rec.classes_skipped = asm_.meta.skipped_classes;
    rec.implicit_weights = asm_.meta.class_weights;
    rec.constraint_residual = proj.constraint_residual;
    rec.eig_residual = proj.eig_residual;
    rec.ridge_used = proj.ridge_used;
    rec.warnings = asm_.meta.warnings;

    if (cfg.classifier == Classifier::kGlp) {
      const SimilarityGraph g = build_knn_graph(z, result.p_used, cfg.metric);
      const SymMatrix l = graph_laplacian(g);
      const Eigen::MatrixXd f_t = propagate_labels(f_s, l, default_propagation_eps(l, n_s));
      ArgmaxResult am = argmax_labels(f_t);
      pseudo = std::move(am.labels);
      rec.isolated_targets = std::move(am.isolated);
      if (!rec.isolated_targets.empty()) {
        rec.warnings.push_back(std::to_string(rec.isolated_targets.size()) +
                               " isolated target nodes assigned class 1");
      }
    } else {
      pseudo = one_nn_classify(z.leftCols(n_s), source.y, z.rightCols(n_t),
                               Metric::kEuclideanGaussian);
    }
    rec.labels = pseudo;
    rec.accuracy = maybe_accuracy(pseudo, target_truth);
    result.per_iteration.push_back(std::move(rec));

    if (t == cfg.t_iters) {
      result.z_source = z.leftCols(n_s);
      result.z_target = z.rightCols(n_t);
    }
  }

  result.final_labels = pseudo;
  result.final_accuracy = maybe_accuracy(pseudo, target_truth);
  result.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();
  return result;
}

void run_indexed(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  auto guarded = [&](std::size_t i) {
    try {
      task(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) guarded(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<SuiteRow> run_ablation_suite(const LabeledData& source,
                                         const Eigen::MatrixXd& target_x,
                                         const std::optional<Labels>& target_truth,
                                         const AdaptConfig& base_cfg, unsigned workers) {
  auto with = [&](Strategy s, Classifier c) {
    AdaptConfig cfg = base_cfg;
    cfg.strategy = s;
    cfg.classifier = c;
    return cfg;
  };
  auto ablation = [&](AblationVariant v) {
    AdaptConfig cfg = with(Strategy::kAblation, base_cfg.classifier);
    cfg.variant = v;
    return cfg;
  };

  std::vector<SuiteRow> rows;
  rows.push_back({"MMD", with(Strategy::kBaseline, base_cfg.classifier), {}});
  rows.push_back({"D_tra", ablation(AblationVariant::kDtra), {}});
  rows.push_back({"D_ter", ablation(AblationVariant::kDter), {}});
  rows.push_back({"D_tra+D_ter", ablation(AblationVariant::kBoth), {}});
  rows.push_back({"Our-I", with(Strategy::kStrategy1, base_cfg.classifier), {}});
  rows.push_back({"Our-II", with(Strategy::kStrategy2, base_cfg.classifier), {}});
  const std::pair<const char*, Strategy> compared[] = {
      {"MMD", Strategy::kBaseline}, {"Our-I", Strategy::kStrategy1}, {"Our-II", Strategy::kStrategy2}};
  for (const auto& [name, s] : compared) {
    rows.push_back({std::string(name) + "/GLP", with(s, Classifier::kGlp), {}});
    rows.push_back({std::string(name) + "/KNN", with(s, Classifier::kOneNn), {}});
  }

  run_indexed(rows.size(), workers, [&](std::size_t i) {
    rows[i].result = adapt(source, target_x, target_truth, rows[i].config);
  });
  return rows;
}

void set_param(AdaptConfig& cfg, const std::string& param, double value) {
  auto as_count = [&](const char* name) {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw InvalidArgument(std::string("grid value for ") + name + " must be a positive integer");
    }
    return static_cast<Index>(value);
  };
  if (param == "beta") cfg.beta = value;
  else if (param == "lambda") cfg.lambda = value;
  else if (param == "alpha") cfg.alpha = value;
  else if (param == "gamma1") cfg.gamma1 = value;
  else if (param == "gamma2") cfg.gamma2 = value;
  else if (param == "k") cfg.k = as_count("k");
  else if (param == "p") cfg.p_neighbors = as_count("p");
  else if (param == "T") cfg.t_iters = static_cast<int>(as_count("T"));
  else throw InvalidArgument("unknown parameter '" + param + "'");
}

std::vector<GridAxis> default_grid(Strategy strategy) {
  if (strategy == Strategy::kStrategy1) return {{"beta", default_beta_grid()}};
  if (strategy == Strategy::kStrategy2) return {{"lambda", default_lambda_grid()}};
  return {};
}

GridSearchResult grid_search(const LabeledData& source, const Eigen::MatrixXd& target_x,
                             const Labels& target_truth, const AdaptConfig& base_cfg,
                             const std::vector<GridAxis>& grid, unsigned workers) {
  if (grid.empty()) throw InvalidArgument("grid_search: empty grid");
  std::size_t total = 1;
  for (const auto& axis : grid) {
    if (axis.values.empty()) {
      throw InvalidArgument("grid_search: axis '" + axis.param + "' has no values");
    }
    total *= axis.values.size();
  }

  std::vector<AdaptConfig> configs(total, base_cfg);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t a = grid.size(); a-- > 0;) {
      const auto& axis = grid[a];
      set_param(configs[idx], axis.param, axis.values[rem % axis.values.size()]);
      rem /= axis.values.size();
    }
  }

  std::vector<AdaptResult> results(total);
  run_indexed(total, workers, [&](std::size_t i) {
    results[i] = adapt(source, target_x, target_truth, configs[i]);
  });

  GridSearchResult out;
  out.table.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const double acc = *results[i].final_accuracy;
    out.table.push_back({configs[i], acc});
    if (i == 0 || acc > out.best_accuracy) {
      out.best_accuracy = acc;
      out.best_index = i;
    }
  }
  out.best = configs[out.best_index];
  out.best_result = std::move(results[out.best_index]);
  return out;
}

}  // namespace dmmd

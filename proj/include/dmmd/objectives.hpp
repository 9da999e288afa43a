#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmmd/laplacian.hpp"
#include "dmmd/matrixcore.hpp"
#include "dmmd/statistics.hpp"

namespace dmmd {

enum class Strategy { kBaseline, kStrategy1, kStrategy2, kAblation };

// Ablation variants add fixed-weight discriminative terms to the plain
// class-wise MMD: D_tra (within-class, minimized), D_ter (between-class,
// maximized) or both.
enum class AblationVariant { kDtra, kDter, kBoth };

const char* to_string(Strategy s);
const char* to_string(AblationVariant v);
const char* to_string(WeightMode m);
const char* to_string(Domain d);

struct SkippedPair {
  Domain domain = Domain::kSource;
  int i = 0;
  int j = 0;
};

struct AssemblyMeta {
  Strategy strategy = Strategy::kBaseline;
  AblationVariant variant = AblationVariant::kBoth;
  WeightMode weight_mode = WeightMode::kProduct;
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 1.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  int num_classes = 0;
  // (class, w_st^c) for every class that contributed a class-wise term.
  std::vector<std::pair<int, double>> class_weights;
  std::vector<int> skipped_classes;
  std::vector<SkippedPair> skipped_pairs;
  std::vector<std::string> warnings;
};

/// left A = right A Theta, with left = X K X^T + alpha I and right = X H X^T.
struct Assembly {
  SymMatrix left;
  SymMatrix right;
  AssemblyMeta meta;
};

struct Projection {
  Eigen::MatrixXd a;          // m x k
  Eigen::VectorXd theta;      // ascending
  double constraint_residual = 0.0;  // |A^T (right + ridge I) A - I|_F
  double eig_residual = 0.0;
  double ridge_used = 0.0;
};

// All assemblers take X_st = [X_s, X_t] (columns are samples, source first),
// the source labels and the current target pseudo labels. C is the largest
// label seen in either vector. Classes missing from the pseudo labels are
// skipped and recorded; if no class survives UnusableLabels is thrown.

/// X (M_0 + sum_c M_c) X^T + alpha I.
Assembly assemble_baseline(const Eigen::MatrixXd& x_st, const Labels& y_s,
                           const Labels& y_t_pseudo, double alpha);

/// X (M_0 + sum_c w_st^c (L_v^c + beta L_w^c)) X^T + alpha I.
/// beta = -1 reproduces the baseline.
Assembly assemble_strategy1(const Eigen::MatrixXd& x_st, const Labels& y_s,
                            const Labels& y_t_pseudo, double beta, double alpha);

/// X (M_0 + lambda sum_c w_st^c (L_v^c - L_w^c)
///      - (1 - lambda) sum_{i<j} [L_b,s^{ij} 0; 0 L_b,t^{ij}]) X^T + alpha I.
/// lambda = 1 reproduces the baseline.
Assembly assemble_strategy2(const Eigen::MatrixXd& x_st, const Labels& y_s,
                            const Labels& y_t_pseudo, double lambda, double alpha,
                            WeightMode mode = WeightMode::kProduct);

/// Baseline plus gamma1 X L_tra X^T (unweighted per-domain within-class
/// scatter) and minus gamma2 X L_ter X^T (unweighted per-domain
/// between-class scatter), keeping only the terms the variant selects.
Assembly assemble_ablation(const Eigen::MatrixXd& x_st, const Labels& y_s,
                           const Labels& y_t_pseudo, AblationVariant variant,
                           double gamma1 = 0.01, double gamma2 = 0.01,
                           double alpha = 0.0);

/// k smallest generalized eigenvectors of the assembly.
Projection learn_projection(const Assembly& asm_, Index k, double ridge = 0.0);

/// Default search grids: beta in {-1.0, -0.9, ..., 1.0}, lambda in {0.2, ..., 1.0}.
std::vector<double> default_beta_grid();
std::vector<double> default_lambda_grid();

}  // namespace dmmd

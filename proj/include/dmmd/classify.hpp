#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dmmd/matrixcore.hpp"
#include "dmmd/statistics.hpp"

namespace dmmd {

// kCosine maps cosine similarity to [0, 1] via (1 + cos) / 2.
// kEuclideanGaussian uses exp(-d^2 / (2 sigma^2)) with sigma the median
// pairwise distance.
enum class Metric { kCosine, kEuclideanGaussian };

const char* to_string(Metric m);

struct SimilarityGraph {
  SymMatrix w;  // nonnegative, zero diagonal
  Index p = 0;
  Metric metric = Metric::kCosine;
};

/// Symmetrized p-nearest-neighbour graph over the columns of z. Neighbour
/// ties go to the lower index. Throws InvalidArgument when p >= n or p < 1.
SimilarityGraph build_knn_graph(const Eigen::MatrixXd& z, Index p,
                                Metric metric = Metric::kCosine);

/// diag(column sums of W) - W.
SymMatrix graph_laplacian(const SimilarityGraph& g);
SymMatrix graph_laplacian(const Eigen::MatrixXd& w);

/// One-hot C x n matrix from 1-based labels.
Eigen::MatrixXd one_hot(const Labels& y, int num_classes);

/// Harmonic solution F_t = -F_s L^{st} (L^{tt} + eps I)^{-1} for an n_st
/// Laplacian whose first n_s rows belong to the source. Throws
/// NumericalFailure when eps == 0 and some group of target nodes has no
/// path to a source node.
Eigen::MatrixXd propagate_labels(const Eigen::MatrixXd& f_s, const SymMatrix& l,
                                 double eps);

/// 1e-9 times the mean diagonal of the target block of l.
double default_propagation_eps(const SymMatrix& l, Index n_s);

struct ArgmaxResult {
  Labels labels;
  // Columns with no positive score (target nodes cut off from every
  // source); they are assigned class 1.
  std::vector<Index> isolated;
};

/// Per-column argmax, 1-based; ties go to the smallest class.
ArgmaxResult argmax_labels(const Eigen::MatrixXd& f_t);

/// Nearest source sample (lowest index on ties) under the metric: largest
/// cosine, or smallest Euclidean distance for kEuclideanGaussian.
Labels one_nn_classify(const Eigen::MatrixXd& z_s, const Labels& y_s,
                       const Eigen::MatrixXd& z_t, Metric metric = Metric::kEuclideanGaussian);

}  // namespace dmmd

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dmmd/matrixcore.hpp"

namespace dmmd {

/// Class labels are 1-based (1..C).
using Labels = std::vector<int>;

/// Samples are the columns of x.
struct LabeledData {
  Eigen::MatrixXd x;
  Labels y;
  int num_classes = 0;

  Index dim() const noexcept { return x.rows(); }
  Index size() const noexcept { return x.cols(); }

  /// Throws InvalidArgument unless every label is in 1..num_classes, the
  /// label count matches the columns and there is at least one sample.
  void validate() const;
};

/// Per-class member counts, indexed 0..num_classes-1 for classes 1..C.
std::vector<Index> class_counts(const Labels& y, int num_classes);

/// Global indices of the samples carrying label c.
std::vector<Index> class_indices(const Labels& y, int c);

/// Columns of x selected by the given indices, in order.
Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, const std::vector<Index>& idx);

struct MmdMatrix {
  enum class Kind { kMarginal, kClass };

  SymMatrix m;
  Kind kind = Kind::kMarginal;
  int cls = 0;          // 0 for the marginal matrix
  Index n_source = 0;   // n_s, or n_s^c for a class matrix
  Index n_target = 0;
};

/// Marginal MMD matrix of order n_s + n_t; source samples come first.
MmdMatrix build_m0(Index n_s, Index n_t);

/// Class-wise MMD matrix for class c. Throws ClassAbsent when c has no
/// members in either domain.
MmdMatrix build_mc(const Labels& y_s, const Labels& y_t, int c);

/// X H X^T computed from explicitly centered columns.
SymMatrix scatter_total(const Eigen::MatrixXd& x);

/// Sum of the per-class total scatters; empty classes contribute nothing.
SymMatrix scatter_within(const LabeledData& d);

/// sum_i n^i (m^i - m)(m^i - m)^T.
SymMatrix scatter_between(const LabeledData& d);

/// (m^i - m^j)(m^i - m^j)^T. Throws ClassAbsent for an empty class and
/// InvalidArgument when i == j.
SymMatrix pairwise_mean_outer(const LabeledData& d, int i, int j);

/// (n_s^c + n_t^c) / (n_s^c n_t^c).
double implicit_weight(Index n_s_c, Index n_t_c);

struct ScatterSet {
  SymMatrix s_v;
  SymMatrix s_w;
  SymMatrix s_b;
};

ScatterSet scatter_set(const LabeledData& d);

/// Relative gap between tr(A^T S_b A) and the pairwise class-mean sum
/// (1/n) sum_{i<j} n^i n^j tr(A^T D^{ij} A).
double verify_lemma1(const LabeledData& d, const Eigen::MatrixXd& a);

/// |S_v - S_w - S_b|_F / max(1, |S_v|_F).
double verify_lemma2(const LabeledData& d);

/// Relative gap between the class-c MMD term built from the MMD matrix and
/// the weighted difference of pooled-variance and per-domain within scatter.
double verify_lemma3(const LabeledData& source, const LabeledData& target,
                     const Eigen::MatrixXd& a, int c);

}  // namespace dmmd

#include "dmmd/statistics.hpp"

#include <cmath>
#include <string>

#include "dmmd/errors.hpp"

namespace dmmd {

namespace {

Eigen::VectorXd column_mean(const Eigen::MatrixXd& x) {
  return x.rowwise().mean();
}

void check_projection(const Eigen::MatrixXd& a, Index m, const char* who) {
  if (a.rows() != m) {
    throw InvalidArgument(std::string(who) + ": projection has " +
                          std::to_string(a.rows()) + " rows, data has " +
                          std::to_string(m) + " features");
  }
}

double relative_gap(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

// Outer product of a coefficient vector: the MMD matrices are all of this
// rank-one form.
SymMatrix outer(const Eigen::VectorXd& e) { return SymMatrix(e * e.transpose()); }

}  // namespace

void LabeledData::validate() const {
  if (x.cols() < 1) throw InvalidArgument("LabeledData: no samples");
  if (static_cast<Index>(y.size()) != x.cols()) {
    throw InvalidArgument("LabeledData: " + std::to_string(y.size()) +
                          " labels for " + std::to_string(x.cols()) + " samples");
  }
  if (num_classes < 1) throw InvalidArgument("LabeledData: num_classes must be >= 1");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 1 || y[i] > num_classes) {
      throw InvalidArgument("LabeledData: label " + std::to_string(y[i]) +
                            " at sample " + std::to_string(i) + " outside 1.." +
                            std::to_string(num_classes));
    }
  }
}

std::vector<Index> class_counts(const Labels& y, int num_classes) {
  std::vector<Index> counts(static_cast<std::size_t>(std::max(num_classes, 0)), 0);
  for (int label : y) {
    if (label >= 1 && label <= num_classes) ++counts[static_cast<std::size_t>(label - 1)];
  }
  return counts;
}

std::vector<Index> class_indices(const Labels& y, int c) {
  std::vector<Index> idx;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == c) idx.push_back(static_cast<Index>(i));
  }
  return idx;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, const std::vector<Index>& idx) {
  Eigen::MatrixXd out(x.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = x.col(idx[j]);
  return out;
}

MmdMatrix build_m0(Index n_s, Index n_t) {
  if (n_s < 1 || n_t < 1) {
    throw InvalidArgument("build_m0: domain sizes must be >= 1 (got " +
                          std::to_string(n_s) + ", " + std::to_string(n_t) + ")");
  }
  Eigen::VectorXd e(n_s + n_t);
  e.head(n_s).setConstant(1.0 / static_cast<double>(n_s));
  e.tail(n_t).setConstant(-1.0 / static_cast<double>(n_t));
  return {outer(e), MmdMatrix::Kind::kMarginal, 0, n_s, n_t};
}

MmdMatrix build_mc(const Labels& y_s, const Labels& y_t, int c) {
  const auto src = class_indices(y_s, c);
  const auto tgt = class_indices(y_t, c);
  if (src.empty() || tgt.empty()) {
    throw ClassAbsent(c, "build_mc: class " + std::to_string(c) + " has " +
                             std::to_string(src.size()) + " source and " +
                             std::to_string(tgt.size()) + " target samples");
  }
  const Index n_s = static_cast<Index>(y_s.size());
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n_s + static_cast<Index>(y_t.size()));
  for (Index i : src) e(i) = 1.0 / static_cast<double>(src.size());
  for (Index j : tgt) e(n_s + j) = -1.0 / static_cast<double>(tgt.size());
  return {outer(e), MmdMatrix::Kind::kClass, c, static_cast<Index>(src.size()),
          static_cast<Index>(tgt.size())};
}

SymMatrix scatter_total(const Eigen::MatrixXd& x) {
  if (x.cols() < 1) throw InvalidArgument("scatter_total: no samples");
  const Eigen::MatrixXd centered = x.colwise() - column_mean(x);
  return SymMatrix(centered * centered.transpose());
}

SymMatrix scatter_within(const LabeledData& d) {
  d.validate();
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d.dim(), d.dim());
  for (int c = 1; c <= d.num_classes; ++c) {
    const auto idx = class_indices(d.y, c);
    if (idx.empty()) continue;
    sw += scatter_total(select_columns(d.x, idx)).dense();
  }
  return SymMatrix(sw);
}

SymMatrix scatter_between(const LabeledData& d) {
  d.validate();
  const Eigen::VectorXd mean = column_mean(d.x);
  Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(d.dim(), d.dim());
  for (int c = 1; c <= d.num_classes; ++c) {
    const auto idx = class_indices(d.y, c);
    if (idx.empty()) continue;
    const Eigen::VectorXd diff = column_mean(select_columns(d.x, idx)) - mean;
    sb += static_cast<double>(idx.size()) * diff * diff.transpose();
  }
  return SymMatrix(sb);
}

SymMatrix pairwise_mean_outer(const LabeledData& d, int i, int j) {
  if (i == j) throw InvalidArgument("pairwise_mean_outer: classes must differ");
  const auto idx_i = class_indices(d.y, i);
  const auto idx_j = class_indices(d.y, j);
  if (idx_i.empty()) throw ClassAbsent(i, "pairwise_mean_outer: class " + std::to_string(i) + " is empty");
  if (idx_j.empty()) throw ClassAbsent(j, "pairwise_mean_outer: class " + std::to_string(j) + " is empty");
  const Eigen::VectorXd diff =
      column_mean(select_columns(d.x, idx_i)) - column_mean(select_columns(d.x, idx_j));
  return outer(diff);
}

double implicit_weight(Index n_s_c, Index n_t_c) {
  if (n_s_c < 1 || n_t_c < 1) {
    throw InvalidArgument("implicit_weight: counts must be >= 1 (got " +
                          std::to_string(n_s_c) + ", " + std::to_string(n_t_c) + ")");
  }
  return static_cast<double>(n_s_c + n_t_c) /
         (static_cast<double>(n_s_c) * static_cast<double>(n_t_c));
}

ScatterSet scatter_set(const LabeledData& d) {
  return {scatter_total(d.x), scatter_within(d), scatter_between(d)};
}

double verify_lemma1(const LabeledData& d, const Eigen::MatrixXd& a) {
  d.validate();
  check_projection(a, d.dim(), "verify_lemma1");
  const double lhs = trace_quadratic(a, scatter_between(d));
  const auto counts = class_counts(d.y, d.num_classes);
  double rhs = 0.0;
  for (int i = 1; i <= d.num_classes; ++i) {
    for (int j = i + 1; j <= d.num_classes; ++j) {
      const Index ni = counts[static_cast<std::size_t>(i - 1)];
      const Index nj = counts[static_cast<std::size_t>(j - 1)];
      if (ni == 0 || nj == 0) continue;
      rhs += static_cast<double>(ni) * static_cast<double>(nj) *
             trace_quadratic(a, pairwise_mean_outer(d, i, j));
    }
  }
  rhs /= static_cast<double>(d.size());
  return relative_gap(lhs, rhs);
}

double verify_lemma2(const LabeledData& d) {
  const ScatterSet s = scatter_set(d);
  const double gap = (s.s_v.dense() - s.s_w.dense() - s.s_b.dense()).norm();
  return gap / std::max(1.0, s.s_v.dense().norm());
}

double verify_lemma3(const LabeledData& source, const LabeledData& target,
                     const Eigen::MatrixXd& a, int c) {
  if (source.dim() != target.dim()) {
    throw InvalidArgument("verify_lemma3: source and target feature counts differ");
  }
  check_projection(a, source.dim(), "verify_lemma3");

  // MMD side: tr(A^T X M_c X^T A) with the explicit M_c matrix.
  const MmdMatrix mc = build_mc(source.y, target.y, c);
  Eigen::MatrixXd x(source.dim(), source.size() + target.size());
  x << source.x, target.x;
  const double mmd_side = trace_quadratic(a, x * mc.m.dense() * x.transpose());

  // Scatter side: pooled class-c variance minus the two per-domain scatters.
  const Eigen::MatrixXd xs_c = select_columns(source.x, class_indices(source.y, c));
  const Eigen::MatrixXd xt_c = select_columns(target.x, class_indices(target.y, c));
  Eigen::MatrixXd pooled(xs_c.rows(), xs_c.cols() + xt_c.cols());
  pooled << xs_c, xt_c;
  const double variance = trace_quadratic(a, scatter_total(pooled));
  const double within =
      trace_quadratic(a, scatter_total(xs_c)) + trace_quadratic(a, scatter_total(xt_c));
  const double scatter_side = implicit_weight(xs_c.cols(), xt_c.cols()) * (variance - within);

  return relative_gap(mmd_side, scatter_side);
}

}  // namespace dmmd

#include "dmmd/laplacian.hpp"

#include <string>

#include "dmmd/errors.hpp"

namespace dmmd {

namespace {

void place_block(Eigen::MatrixXd& frame, const Eigen::MatrixXd& block,
                 const std::vector<Index>& global) {
  const auto n = static_cast<Index>(global.size());
  for (Index p = 0; p < n; ++p) {
    for (Index q = 0; q < n; ++q) frame(global[p], global[q]) = block(p, q);
  }
}

Eigen::MatrixXd block_centering(Index n_a, Index n_b) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n_a + n_b, n_a + n_b);
  l.topLeftCorner(n_a, n_a) = centering_matrix(n_a).dense();
  l.bottomRightCorner(n_b, n_b) = centering_matrix(n_b).dense();
  return l;
}

}  // namespace

SymMatrix within_laplacian_star(Index n_s_c, Index n_t_c) {
  if (n_s_c < 1 || n_t_c < 1) {
    throw InvalidArgument("within_laplacian_star: counts must be >= 1");
  }
  return SymMatrix(block_centering(n_s_c, n_t_c));
}

SymMatrix within_laplacian_star_literal(Index n_s_c, Index n_t_c) {
  if (n_s_c < 1 || n_t_c < 1) {
    throw InvalidArgument("within_laplacian_star_literal: counts must be >= 1");
  }
  const Index n = n_s_c + n_t_c;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
  const double ns = static_cast<double>(n_s_c);
  const double nt = static_cast<double>(n_t_c);
  v.topLeftCorner(n_s_c, n_s_c).setConstant(1.0 / (ns * ns));
  v.bottomRightCorner(n_t_c, n_t_c).setConstant(1.0 / (nt * nt));
  Eigen::MatrixXd g = v.rowwise().sum().asDiagonal();
  return SymMatrix(v - g);
}

SymMatrix variance_laplacian_star(Index n_st_c) {
  return centering_matrix(n_st_c);
}

SymMatrix embed_class_laplacian(const SymMatrix& l_star, const Labels& y_s,
                                const Labels& y_t, int c) {
  std::vector<Index> global = class_indices(y_s, c);
  const auto n_s_c = global.size();
  const auto n_s = static_cast<Index>(y_s.size());
  for (Index j : class_indices(y_t, c)) global.push_back(n_s + j);
  if (n_s_c == 0 || n_s_c == global.size()) {
    throw ClassAbsent(c, "embed_class_laplacian: class " + std::to_string(c) +
                             " missing from one domain");
  }
  if (l_star.order() != static_cast<Index>(global.size())) {
    throw InvalidArgument("embed_class_laplacian: star matrix has order " +
                          std::to_string(l_star.order()) + ", class " +
                          std::to_string(c) + " has " +
                          std::to_string(global.size()) + " samples");
  }
  const Index n_st = n_s + static_cast<Index>(y_t.size());
  Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(n_st, n_st);
  place_block(frame, l_star.dense(), global);
  return SymMatrix(frame);
}

ClassLaplacianSet build_class_set(const Labels& y_s, const Labels& y_t, int c,
                                  WithinForm form) {
  const auto n_s_c = static_cast<Index>(class_indices(y_s, c).size());
  const auto n_t_c = static_cast<Index>(class_indices(y_t, c).size());
  if (n_s_c == 0 || n_t_c == 0) {
    throw ClassAbsent(c, "build_class_set: class " + std::to_string(c) + " has " +
                             std::to_string(n_s_c) + " source and " +
                             std::to_string(n_t_c) + " target samples");
  }
  const SymMatrix within = form == WithinForm::kCorrected
                               ? within_laplacian_star(n_s_c, n_t_c)
                               : within_laplacian_star_literal(n_s_c, n_t_c);
  ClassLaplacianSet set;
  set.cls = c;
  set.l_v = embed_class_laplacian(variance_laplacian_star(n_s_c + n_t_c), y_s, y_t, c);
  set.l_w = embed_class_laplacian(within, y_s, y_t, c);
  set.weight = implicit_weight(n_s_c, n_t_c);
  set.n_source = n_s_c;
  set.n_target = n_t_c;
  return set;
}

InterClassLaplacian build_interclass(const Labels& domain_labels, Domain domain,
                                     int i, int j, Index n_st, Index offset,
                                     WeightMode mode) {
  if (i == j) throw InvalidArgument("build_interclass: classes must differ");
  const auto idx_i = class_indices(domain_labels, i);
  const auto idx_j = class_indices(domain_labels, j);
  if (idx_i.empty()) throw ClassAbsent(i, "build_interclass: class " + std::to_string(i) + " is empty");
  if (idx_j.empty()) throw ClassAbsent(j, "build_interclass: class " + std::to_string(j) + " is empty");
  if (offset < 0 || offset + static_cast<Index>(domain_labels.size()) > n_st) {
    throw InvalidArgument("build_interclass: domain block does not fit in the frame");
  }

  const auto n_i = static_cast<Index>(idx_i.size());
  const auto n_j = static_cast<Index>(idx_j.size());
  std::vector<Index> global;
  global.reserve(idx_i.size() + idx_j.size());
  for (Index p : idx_i) global.push_back(offset + p);
  for (Index p : idx_j) global.push_back(offset + p);

  const double weight = mode == WeightMode::kProduct
                            ? implicit_weight(n_i, n_j)
                            : static_cast<double>(n_i + n_j) / static_cast<double>(n_i + n_j);
  const Eigen::MatrixXd star =
      weight * (centering_matrix(n_i + n_j).dense() - block_centering(n_i, n_j));

  Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(n_st, n_st);
  place_block(frame, star, global);
  return {domain, i, j, SymMatrix(frame), weight};
}

}  // namespace dmmd

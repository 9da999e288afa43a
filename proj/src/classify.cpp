#include "dmmd/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dmmd/errors.hpp"

namespace dmmd {

namespace {

constexpr double kNormGuard = 1e-12;

Eigen::MatrixXd unit_columns(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd u = z;
  for (Index j = 0; j < u.cols(); ++j) {
    u.col(j) /= std::max(u.col(j).norm(), kNormGuard);
  }
  return u;
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd d(a.cols(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index i = 0; i < a.cols(); ++i) d(i, j) = (a.col(i) - b.col(j)).squaredNorm();
  }
  return d;
}

double median_pairwise_distance(const Eigen::MatrixXd& sq) {
  std::vector<double> d;
  const Index n = sq.rows();
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) d.push_back(std::sqrt(sq(i, j)));
  }
  if (d.empty()) return 1.0;
  const auto mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  double med = d[mid];
  if (d.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return med > 0.0 ? med : 1.0;
}

// Connected groups of target nodes (edges are nonzero off-diagonal entries
// of L^{tt}) that touch no source node.
bool has_unanchored_target_group(const Eigen::MatrixXd& l_tt, const Eigen::MatrixXd& l_st) {
  const Index n_t = l_tt.rows();
  std::vector<int> group(static_cast<std::size_t>(n_t), -1);
  for (Index start = 0; start < n_t; ++start) {
    if (group[static_cast<std::size_t>(start)] >= 0) continue;
    bool anchored = false;
    std::vector<Index> stack{start};
    group[static_cast<std::size_t>(start)] = static_cast<int>(start);
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      if (l_st.col(v).cwiseAbs().maxCoeff() > 0.0) anchored = true;
      for (Index u = 0; u < n_t; ++u) {
        if (u != v && l_tt(u, v) != 0.0 && group[static_cast<std::size_t>(u)] < 0) {
          group[static_cast<std::size_t>(u)] = static_cast<int>(start);
          stack.push_back(u);
        }
      }
    }
    if (!anchored) return true;
  }
  return false;
}

}  // namespace

const char* to_string(Metric m) {
  return m == Metric::kCosine ? "cosine" : "euclidean-gaussian";
}

SimilarityGraph build_knn_graph(const Eigen::MatrixXd& z, Index p, Metric metric) {
  const Index n = z.cols();
  if (p < 1 || p >= n) {
    throw InvalidArgument("build_knn_graph: p=" + std::to_string(p) +
                          " must be in [1, n-1] with n=" + std::to_string(n));
  }

  // closeness(i, j): larger means nearer.
  Eigen::MatrixXd sim(n, n);
  Eigen::MatrixXd closeness(n, n);
  if (metric == Metric::kCosine) {
    const Eigen::MatrixXd u = unit_columns(z);
    const Eigen::MatrixXd cos = (u.transpose() * u).cwiseMax(-1.0).cwiseMin(1.0);
    sim = 0.5 * (cos.array() + 1.0).matrix();
    closeness = sim;
  } else {
    const Eigen::MatrixXd sq = squared_distances(z, z);
    const double sigma = median_pairwise_distance(sq);
    sim = (-sq.array() / (2.0 * sigma * sigma)).exp().matrix();
    closeness = -sq;
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  std::vector<Index> order(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    order.clear();
    for (Index j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    std::partial_sort(order.begin(), order.begin() + p, order.end(), [&](Index a, Index b) {
      if (closeness(i, a) != closeness(i, b)) return closeness(i, a) > closeness(i, b);
      return a < b;
    });
    for (Index r = 0; r < p; ++r) {
      const Index j = order[static_cast<std::size_t>(r)];
      w(i, j) = sim(i, j);
      w(j, i) = sim(i, j);
    }
  }
  return {SymMatrix(w), p, metric};
}

SymMatrix graph_laplacian(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw InvalidArgument("graph_laplacian: W is not square");
  Eigen::MatrixXd l = -w;
  l.diagonal() += w.colwise().sum().transpose();
  return SymMatrix(l);
}

SymMatrix graph_laplacian(const SimilarityGraph& g) { return graph_laplacian(g.w.dense()); }

Eigen::MatrixXd one_hot(const Labels& y, int num_classes) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(num_classes, static_cast<Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 1 || y[i] > num_classes) {
      throw InvalidArgument("one_hot: label " + std::to_string(y[i]) + " outside 1.." +
                            std::to_string(num_classes));
    }
    f(y[i] - 1, static_cast<Index>(i)) = 1.0;
  }
  return f;
}

Eigen::MatrixXd propagate_labels(const Eigen::MatrixXd& f_s, const SymMatrix& l, double eps) {
  const Index n_s = f_s.cols();
  const Index n_t = l.order() - n_s;
  if (n_s < 1 || n_t < 1) {
    throw InvalidArgument("propagate_labels: Laplacian of order " + std::to_string(l.order()) +
                          " cannot hold " + std::to_string(n_s) + " sources plus targets");
  }
  if (!(eps >= 0.0)) throw InvalidArgument("propagate_labels: eps must be >= 0");

  Eigen::MatrixXd l_tt = l.dense().bottomRightCorner(n_t, n_t);
  const Eigen::MatrixXd l_st = l.dense().topRightCorner(n_s, n_t);
  if (eps == 0.0 && has_unanchored_target_group(l_tt, l_st)) {
    throw NumericalFailure("propagate_labels: L^tt is singular (target nodes without a path "
                           "to any source); use eps > 0");
  }
  l_tt.diagonal().array() += eps;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(l_tt);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalFailure("propagate_labels: factorization of L^tt failed");
  }
  const Eigen::MatrixXd rhs = -(l_st.transpose() * f_s.transpose());
  const Eigen::MatrixXd f_t_transposed = ldlt.solve(rhs);
  return f_t_transposed.transpose();
}

double default_propagation_eps(const SymMatrix& l, Index n_s) {
  const Index n_t = l.order() - n_s;
  if (n_t < 1) return 0.0;
  return 1e-9 * l.dense().diagonal().tail(n_t).mean();
}

ArgmaxResult argmax_labels(const Eigen::MatrixXd& f_t) {
  ArgmaxResult out;
  out.labels.resize(static_cast<std::size_t>(f_t.cols()), 1);
  for (Index j = 0; j < f_t.cols(); ++j) {
    Index best = 0;
    for (Index c = 1; c < f_t.rows(); ++c) {
      if (f_t(c, j) > f_t(best, j)) best = c;
    }
    if (f_t.rows() == 0 || !(f_t(best, j) > 0.0)) {
      out.isolated.push_back(j);
      best = 0;
    }
    out.labels[static_cast<std::size_t>(j)] = static_cast<int>(best) + 1;
  }
  return out;
}

Labels one_nn_classify(const Eigen::MatrixXd& z_s, const Labels& y_s,
                       const Eigen::MatrixXd& z_t, Metric metric) {
  if (z_s.cols() < 1) throw InvalidArgument("one_nn_classify: no source samples");
  if (static_cast<Index>(y_s.size()) != z_s.cols()) {
    throw InvalidArgument("one_nn_classify: label count does not match source samples");
  }
  if (z_s.rows() != z_t.rows()) {
    throw InvalidArgument("one_nn_classify: source and target dimensions differ");
  }
  Labels out(static_cast<std::size_t>(z_t.cols()));
  if (metric == Metric::kCosine) {
    const Eigen::MatrixXd cos = unit_columns(z_s).transpose() * unit_columns(z_t);
    for (Index j = 0; j < z_t.cols(); ++j) {
      Index best = 0;
      for (Index i = 1; i < z_s.cols(); ++i) {
        if (cos(i, j) > cos(best, j)) best = i;
      }
      out[static_cast<std::size_t>(j)] = y_s[static_cast<std::size_t>(best)];
    }
  } else {
    const Eigen::MatrixXd sq = squared_distances(z_s, z_t);
    for (Index j = 0; j < z_t.cols(); ++j) {
      Index best = 0;
      for (Index i = 1; i < z_s.cols(); ++i) {
        if (sq(i, j) < sq(best, j)) best = i;
      }
      out[static_cast<std::size_t>(j)] = y_s[static_cast<std::size_t>(best)];
    }
  }
  return out;
}

}  // namespace dmmd

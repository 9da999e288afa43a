#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "dmmd/statistics.hpp"

namespace dmmd::testing {

inline Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = g(rng);
  return x;
}

inline Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::MatrixXd a = gaussian(rng, n, n);
  return 0.5 * (a + a.transpose());
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::MatrixXd a = gaussian(rng, n, n);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

inline Labels random_labels(std::mt19937_64& rng, Eigen::Index n, int num_classes) {
  std::uniform_int_distribution<int> pick(1, num_classes);
  Labels y(static_cast<std::size_t>(n));
  for (auto& v : y) v = pick(rng);
  return y;
}

// Every class in 1..num_classes appears at least once.
inline Labels covering_labels(std::mt19937_64& rng, Eigen::Index n, int num_classes) {
  Labels y = random_labels(rng, n, num_classes);
  for (int c = 1; c <= num_classes && c <= n; ++c) y[static_cast<std::size_t>(c - 1)] = c;
  std::shuffle(y.begin(), y.end(), rng);
  return y;
}

inline double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Column mean of the samples carrying label c.
inline Eigen::VectorXd class_mean(const Eigen::MatrixXd& x, const Labels& y, int c) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(x.rows());
  int n = 0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] == c) {
      s += x.col(static_cast<Eigen::Index>(j));
      ++n;
    }
  }
  return s / n;
}

// Sum of outer products of deviations from the mean, one sample at a time.
inline Eigen::MatrixXd scatter_oracle(const Eigen::MatrixXd& x) {
  const Eigen::VectorXd mu = x.rowwise().mean();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(x.rows(), x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd d = x.col(j) - mu;
    s += d * d.transpose();
  }
  return s;
}

inline Eigen::MatrixXd columns_with_label(const Eigen::MatrixXd& x, const Labels& y, int c) {
  Eigen::Index n = 0;
  for (int v : y) n += v == c;
  Eigen::MatrixXd out(x.rows(), n);
  Eigen::Index k = 0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] == c) out.col(k++) = x.col(static_cast<Eigen::Index>(j));
  }
  return out;
}

}  // namespace dmmd::testing

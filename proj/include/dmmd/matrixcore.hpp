#pragma once

#include <Eigen/Dense>

namespace dmmd {

using Index = Eigen::Index;

// Dense symmetric matrix. Construction always symmetrizes (S + S^T)/2, so
// an exactly symmetric input is stored unchanged.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix zero(Index order);
  static SymMatrix identity(Index order);

  Index order() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& dense() const noexcept { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Eigen::MatrixXd m_;
};

/// I - (1/n) 1 1^T. Throws InvalidArgument for n == 0.
SymMatrix centering_matrix(Index n);

/// tr(A^T S A).
double trace_quadratic(const Eigen::MatrixXd& a, const SymMatrix& s);
double trace_quadratic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& s);

struct EigResult {
  Eigen::MatrixXd vectors;  // m x k, columns B-orthonormal
  Eigen::VectorXd values;   // ascending
  double residual = 0.0;    // max_j |S a_j - theta_j B a_j| / max(1, |S a_j|)
  double ridge_used = 0.0;
};

/// Returns the k smallest generalized eigenpairs of S a = theta (B + r I) a.
///
/// r starts at `ridge`. When B + r I is too ill-conditioned to factor, or
/// the returned columns miss B + r I orthonormality by more than 1e-9
/// (Frobenius), an extra shift of 1e-9 * tr(B)/m is added and grown by 10x
/// up to 1e-3 * tr(B)/m; the total shift is reported in ridge_used. Columns are
/// sign-normalized so the largest-magnitude entry is positive. Ordering
/// inside a tie of eigenvalues is whatever the dense solver produces.
///
/// Throws InvalidArgument when B is not PSD (smallest eigenvalue below
/// -1e-8 |B|), when the orders differ, or when k is 0 or exceeds the
/// order; NumericalFailure when the factorization never succeeds.
EigResult solve_generalized_eig(const SymMatrix& s, const SymMatrix& b, Index k,
                                double ridge = 0.0);

/// Largest-magnitude entry of each column made positive (first index wins
/// ties).
void normalize_column_signs(Eigen::MatrixXd& vectors);

}  // namespace dmmd

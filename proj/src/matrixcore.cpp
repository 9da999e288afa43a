#include "dmmd/matrixcore.hpp"

#include <array>
#include <cmath>
#include <string>

#include "dmmd/errors.hpp"

namespace dmmd {

namespace {

// B + rI is accepted for factorization once its reciprocal condition number
// clears this bound.
constexpr double kMinReciprocalCondition = 1e-12;
constexpr double kPsdTolerance = 1e-8;
// A rung is also rejected when |A^T (B + rI) A - I|_F exceeds this.
constexpr double kOrthonormalTolerance = 1e-9;

// Multipliers of tr(B)/m tried after the caller's ridge fails.
constexpr std::array<double, 8> kRidgeLadder = {0.0,  1e-9, 1e-8, 1e-7,
                                                1e-6, 1e-5, 1e-4, 1e-3};

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument("SymMatrix: matrix is " + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()) + ", not square");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(Index order) {
  return SymMatrix(Eigen::MatrixXd::Zero(order, order));
}

SymMatrix SymMatrix::identity(Index order) {
  return SymMatrix(Eigen::MatrixXd::Identity(order, order));
}

SymMatrix centering_matrix(Index n) {
  if (n <= 0) throw InvalidArgument("centering_matrix: n must be >= 1");
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  h.array() -= 1.0 / static_cast<double>(n);
  return SymMatrix(h);
}

double trace_quadratic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || a.rows() != s.rows()) {
    throw InvalidArgument("trace_quadratic: A is " + std::to_string(a.rows()) +
                          "x" + std::to_string(a.cols()) + " but S has order " +
                          std::to_string(s.rows()));
  }
  return a.cwiseProduct(s * a).sum();
}

double trace_quadratic(const Eigen::MatrixXd& a, const SymMatrix& s) {
  return trace_quadratic(a, s.dense());
}

void normalize_column_signs(Eigen::MatrixXd& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index arg = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

EigResult solve_generalized_eig(const SymMatrix& s, const SymMatrix& b, Index k,
                                double ridge) {
  const Index m = s.order();
  if (b.order() != m) {
    throw InvalidArgument("solve_generalized_eig: S has order " +
                          std::to_string(m) + ", B has order " +
                          std::to_string(b.order()));
  }
  if (k <= 0 || k > m) {
    throw InvalidArgument("solve_generalized_eig: k=" + std::to_string(k) +
                          " outside [1, " + std::to_string(m) + "]");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw InvalidArgument("solve_generalized_eig: ridge must be finite and >= 0");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spectrum(b.dense(),
                                                          Eigen::EigenvaluesOnly);
  if (spectrum.info() != Eigen::Success) {
    throw NumericalFailure("solve_generalized_eig: spectrum of B did not converge");
  }
  const double lo = spectrum.eigenvalues()(0);
  const double hi = spectrum.eigenvalues()(m - 1);
  const double norm = std::max(std::abs(lo), std::abs(hi));
  if (lo < -kPsdTolerance * norm) {
    throw InvalidArgument("solve_generalized_eig: B is not positive semidefinite "
                          "(smallest eigenvalue " + std::to_string(lo) + ")");
  }

  double scale = b.dense().trace() / static_cast<double>(m);
  if (!(scale > 0.0)) scale = 1.0;

  for (double step : kRidgeLadder) {
    const double r = ridge + step * scale;
    if (!(lo + r > kMinReciprocalCondition * (hi + r))) continue;

    Eigen::MatrixXd b_ridged = b.dense();
    b_ridged.diagonal().array() += r;
    Eigen::LLT<Eigen::MatrixXd> llt(b_ridged);
    if (llt.info() != Eigen::Success) continue;

    // C = L^{-1} S L^{-T}, symmetric with the same spectrum as (B+rI)^{-1} S.
    const Eigen::MatrixXd left_solved = llt.matrixL().solve(s.dense());
    Eigen::MatrixXd c = llt.matrixL().solve(left_solved.transpose());
    c = 0.5 * (c + c.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> reduced(c);
    if (reduced.info() != Eigen::Success) {
      throw NumericalFailure("solve_generalized_eig: reduced eigenproblem did not converge");
    }

    EigResult out;
    out.values = reduced.eigenvalues().head(k);
    out.vectors = llt.matrixU().solve(reduced.eigenvectors().leftCols(k));
    normalize_column_signs(out.vectors);
    out.ridge_used = r;

    const Eigen::MatrixXd sa = s.dense() * out.vectors;
    const Eigen::MatrixXd ba = b_ridged * out.vectors;
    const double drift =
        (out.vectors.transpose() * ba - Eigen::MatrixXd::Identity(k, k)).norm();
    if (!(drift <= kOrthonormalTolerance)) continue;
    for (Index j = 0; j < k; ++j) {
      const double res = (sa.col(j) - out.values(j) * ba.col(j)).norm() /
                         std::max(1.0, sa.col(j).norm());
      out.residual = std::max(out.residual, res);
    }
    return out;
  }
  throw NumericalFailure("solve_generalized_eig: B + ridge*I could not be factored accurately "
                         "even at ridge " + std::to_string(ridge + 1e-3 * scale));
}

}  // namespace dmmd

#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "dmmd/errors.hpp"
#include "dmmd/matrixcore.hpp"
#include "test_support.hpp"

using namespace dmmd;
using dmmd::testing::gaussian;
using dmmd::testing::max_abs;
using dmmd::testing::random_spd;
using dmmd::testing::random_symmetric;

TEST_CASE("SymMatrix symmetrizes its input") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 4, 3;
  const SymMatrix s(m);
  CHECK(s(0, 1) == doctest::Approx(3.0));
  CHECK(s(1, 0) == s(0, 1));
  CHECK_THROWS_AS(SymMatrix(Eigen::MatrixXd(2, 3)), InvalidArgument);

  std::mt19937_64 rng(3);
  const Eigen::MatrixXd exact = random_symmetric(rng, 5);
  CHECK(SymMatrix(exact).dense() == exact);
}

TEST_CASE("centering_matrix") {
  CHECK(centering_matrix(1).dense()(0, 0) == 0.0);

  Eigen::MatrixXd two(2, 2);
  two << 0.5, -0.5, -0.5, 0.5;
  CHECK(max_abs(centering_matrix(2).dense() - two) == 0.0);

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
  CHECK((centering_matrix(3).dense() * ones).norm() < 1e-15);

  CHECK_THROWS_AS(centering_matrix(0), InvalidArgument);

  for (Index n : {1, 2, 5, 17}) {
    const Eigen::MatrixXd h = centering_matrix(n).dense();
    CHECK(max_abs(h * h - h) < 1e-14);
    CHECK(h.rowwise().sum().cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    for (Index i = 0; i < n; ++i) {
      const double v = es.eigenvalues()(i);
      CHECK((std::abs(v) < 1e-12 || std::abs(v - 1.0) < 1e-12));
    }
  }
}

TEST_CASE("trace_quadratic") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd s = random_symmetric(rng, 4);
  CHECK(trace_quadratic(Eigen::MatrixXd::Identity(4, 4), SymMatrix(s)) ==
        doctest::Approx(s.trace()).epsilon(1e-14));
  CHECK(trace_quadratic(Eigen::MatrixXd::Zero(4, 2), SymMatrix(s)) == 0.0);

  const Eigen::MatrixXd a = gaussian(rng, 4, 2);
  double oracle = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int l = 0; l < 2; ++l) oracle += a(i, l) * s(i, j) * a(j, l);
  CHECK(std::abs(trace_quadratic(a, SymMatrix(s)) - oracle) < 1e-10);
  CHECK(std::abs(trace_quadratic(a, s) - oracle) < 1e-10);

  CHECK_THROWS_AS(trace_quadratic(gaussian(rng, 3, 2), SymMatrix(s)), InvalidArgument);
}

TEST_CASE("trace_quadratic is linear in S and nonnegative for PSD S") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd a = gaussian(rng, 6, 3);
    const Eigen::MatrixXd s1 = random_symmetric(rng, 6);
    const Eigen::MatrixXd s2 = random_symmetric(rng, 6);
    const double sum = trace_quadratic(a, SymMatrix(s1 + s2));
    CHECK(std::abs(sum - trace_quadratic(a, SymMatrix(s1)) - trace_quadratic(a, SymMatrix(s2))) <
          1e-10);
    CHECK(trace_quadratic(a, SymMatrix(random_spd(rng, 6))) >= 0.0);
  }
}

TEST_CASE("generalized eigensolver: diagonal case") {
  Eigen::MatrixXd s = Eigen::Vector3d(3, 1, 2).asDiagonal();
  const EigResult r =
      solve_generalized_eig(SymMatrix(s), SymMatrix::identity(3), 2);
  CHECK(r.values(0) == doctest::Approx(1.0));
  CHECK(r.values(1) == doctest::Approx(2.0));
  CHECK(std::abs(std::abs(r.vectors(1, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(r.vectors(2, 1)) - 1.0) < 1e-12);
  // sign normalization makes the dominant entry positive
  CHECK(r.vectors(1, 0) > 0.0);
  CHECK(r.vectors(2, 1) > 0.0);
  CHECK(r.ridge_used == 0.0);
}

TEST_CASE("generalized eigensolver: identical matrices") {
  const EigResult r = solve_generalized_eig(SymMatrix::identity(4), SymMatrix::identity(4), 4);
  CHECK(r.vectors.cols() == 4);
  for (Index i = 0; i < 4; ++i) CHECK(std::abs(r.values(i) - 1.0) < 1e-12);
}

TEST_CASE("generalized eigensolver matches the full spectrum of B^-1 S") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd s = random_symmetric(rng, 8);
    const Eigen::MatrixXd b = random_spd(rng, 8);
    const EigResult r = solve_generalized_eig(SymMatrix(s), SymMatrix(b), 3);

    Eigen::EigenSolver<Eigen::MatrixXd> full(b.inverse() * s);
    std::vector<double> spectrum;
    for (Index i = 0; i < 8; ++i) {
      CHECK(std::abs(full.eigenvalues()(i).imag()) < 1e-8);
      spectrum.push_back(full.eigenvalues()(i).real());
    }
    std::sort(spectrum.begin(), spectrum.end());
    for (Index i = 0; i < 3; ++i) {
      CHECK(std::abs(r.values(i) - spectrum[static_cast<std::size_t>(i)]) <
            1e-8 * std::max(1.0, std::abs(spectrum[static_cast<std::size_t>(i)])));
    }
    CHECK(r.residual <= 1e-8);
    const Eigen::MatrixXd gram = r.vectors.transpose() * b * r.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-8);
    for (Index i = 0; i < 3; ++i) {
      const Eigen::VectorXd a = r.vectors.col(i);
      CHECK((s * a - r.values(i) * b * a).norm() <= 1e-8 * std::max(1.0, (s * a).norm()));
    }
  }
}

TEST_CASE("generalized eigensolver properties over random orders") {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> order(1, 12);
  for (int t = 0; t < 40; ++t) {
    const Index m = order(rng);
    const Index k = std::uniform_int_distribution<Index>(1, m)(rng);
    const Eigen::MatrixXd b = random_spd(rng, m);
    const EigResult r = solve_generalized_eig(SymMatrix(random_symmetric(rng, m)), SymMatrix(b), k);
    REQUIRE(r.vectors.cols() == k);
    REQUIRE(r.values.size() == k);
    for (Index i = 1; i < k; ++i) CHECK(r.values(i - 1) <= r.values(i));
    CHECK(r.residual >= 0.0);
    const Eigen::MatrixXd bb = b + r.ridge_used * Eigen::MatrixXd::Identity(m, m);
    CHECK((r.vectors.transpose() * bb * r.vectors - Eigen::MatrixXd::Identity(k, k)).norm() < 1e-6);
  }
}

TEST_CASE("generalized eigensolver escalates the ridge for singular B") {
  std::mt19937_64 rng(31);
  const Eigen::MatrixXd f = gaussian(rng, 10, 3);
  const Eigen::MatrixXd b = f * f.transpose();  // rank 3
  const Eigen::MatrixXd s = random_symmetric(rng, 10);
  const EigResult r = solve_generalized_eig(SymMatrix(b), SymMatrix(b), 4);
  CHECK(r.ridge_used > 0.0);
  CHECK(r.ridge_used <= 1e-3 * b.trace() / 10 * (1 + 1e-12));
  const Eigen::MatrixXd bb = b + r.ridge_used * Eigen::MatrixXd::Identity(10, 10);
  CHECK((r.vectors.transpose() * bb * r.vectors - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-6);

  const EigResult r2 = solve_generalized_eig(SymMatrix(s), SymMatrix(b), 10);
  CHECK(r2.ridge_used > 0.0);
  const Eigen::MatrixXd bb2 = b + r2.ridge_used * Eigen::MatrixXd::Identity(10, 10);
  CHECK((r2.vectors.transpose() * bb2 * r2.vectors - Eigen::MatrixXd::Identity(10, 10)).norm() <
        1e-6);
}

TEST_CASE("ridged constraint holds across random rank-deficient B") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 300; ++t) {
    const Index m = std::uniform_int_distribution<Index>(4, 30)(rng);
    const Index rank = std::uniform_int_distribution<Index>(1, m - 1)(rng);
    const Index k = std::uniform_int_distribution<Index>(1, m)(rng);
    const Eigen::MatrixXd f = gaussian(rng, m, rank);
    const Eigen::MatrixXd b = f * f.transpose();
    const EigResult r = solve_generalized_eig(SymMatrix(random_symmetric(rng, m)), SymMatrix(b), k);
    const Eigen::MatrixXd bb = b + r.ridge_used * Eigen::MatrixXd::Identity(m, m);
    CHECK(r.ridge_used > 0.0);
    CHECK((r.vectors.transpose() * bb * r.vectors - Eigen::MatrixXd::Identity(k, k)).norm() < 1e-6);
    CHECK(r.residual <= 1e-6);
  }
}

TEST_CASE("generalized eigensolver: explicit ridge is honoured") {
  const EigResult r = solve_generalized_eig(SymMatrix::identity(3), SymMatrix::identity(3), 3, 1.0);
  CHECK(r.ridge_used == doctest::Approx(1.0));
  for (Index i = 0; i < 3; ++i) CHECK(r.values(i) == doctest::Approx(0.5));
}

TEST_CASE("generalized eigensolver argument errors") {
  const SymMatrix i3 = SymMatrix::identity(3);
  CHECK_THROWS_AS(solve_generalized_eig(i3, i3, 4), InvalidArgument);
  CHECK_THROWS_AS(solve_generalized_eig(i3, i3, 0), InvalidArgument);
  CHECK_THROWS_AS(solve_generalized_eig(i3, SymMatrix::identity(2), 1), InvalidArgument);
  Eigen::MatrixXd neg = Eigen::Vector3d(1, 1, -1).asDiagonal();
  CHECK_THROWS_AS(solve_generalized_eig(i3, SymMatrix(neg), 1), InvalidArgument);
  Eigen::MatrixXd nan_b = Eigen::MatrixXd::Identity(3, 3);
  nan_b(1, 1) = std::nan("");
  CHECK_THROWS_AS(solve_generalized_eig(i3, SymMatrix(nan_b), 1), NumericalFailure);
  CHECK_THROWS_AS(solve_generalized_eig(i3, i3, 1, -1.0), InvalidArgument);
}

TEST_CASE("generalized eigensolver: zero B falls back to the unit ridge scale") {
  const EigResult r = solve_generalized_eig(SymMatrix::identity(3), SymMatrix::zero(3), 1);
  CHECK(r.ridge_used == doctest::Approx(1e-9));
}

TEST_CASE("generalized eigensolver is deterministic") {
  std::mt19937_64 rng(41);
  const SymMatrix s(random_symmetric(rng, 9));
  const SymMatrix b(random_spd(rng, 9));
  const EigResult r1 = solve_generalized_eig(s, b, 5);
  const EigResult r2 = solve_generalized_eig(s, b, 5);
  CHECK(r1.vectors == r2.vectors);
  CHECK(r1.values == r2.values);
}

TEST_CASE("normalize_column_signs") {
  Eigen::MatrixXd v(3, 2);
  v << 0.1, 2.0, -0.9, -0.5, 0.3, -2.0;
  normalize_column_signs(v);
  CHECK(v(1, 0) == doctest::Approx(0.9));
  CHECK(v(0, 0) == doctest::Approx(-0.1));
  // tie between |2.0| and |-2.0|: the first index decides
  CHECK(v(0, 1) == doctest::Approx(2.0));
  CHECK(v(2, 1) == doctest::Approx(-2.0));
}

#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "dmmd/errors.hpp"
#include "dmmd/statistics.hpp"
#include "test_support.hpp"

using namespace dmmd;
using namespace dmmd::testing;

namespace {

Eigen::MatrixXd row(std::initializer_list<double> v) {
  Eigen::MatrixXd x(1, static_cast<Index>(v.size()));
  Index j = 0;
  for (double d : v) x(0, j++) = d;
  return x;
}

double smallest_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

Labels concat(const Labels& a, const Labels& b) {
  Labels out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

TEST_CASE("build_m0 entries") {
  Eigen::MatrixXd one(2, 2);
  one << 1, -1, -1, 1;
  CHECK(max_abs(build_m0(1, 1).m.dense() - one) == 0.0);

  Eigen::MatrixXd two(3, 3);
  two << 0.25, 0.25, -0.5, 0.25, 0.25, -0.5, -0.5, -0.5, 1;
  const MmdMatrix m = build_m0(2, 1);
  CHECK(max_abs(m.m.dense() - two) < 1e-15);
  CHECK(m.kind == MmdMatrix::Kind::kMarginal);
  CHECK(m.n_source == 2);
  CHECK(m.n_target == 1);

  CHECK_THROWS_AS(build_m0(0, 3), InvalidArgument);
  CHECK_THROWS_AS(build_m0(3, 0), InvalidArgument);
}

TEST_CASE("build_m0 quadratic form is the squared projected mean difference") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 25; ++t) {
    const Index n_s = std::uniform_int_distribution<Index>(1, 12)(rng);
    const Index n_t = std::uniform_int_distribution<Index>(1, 12)(rng);
    const Eigen::MatrixXd x = gaussian(rng, 4, n_s + n_t);
    const Eigen::MatrixXd a = gaussian(rng, 4, 2);
    const Eigen::MatrixXd z = a.transpose() * x;
    const Eigen::VectorXd diff =
        z.leftCols(n_s).rowwise().mean() - z.rightCols(n_t).rowwise().mean();
    const SymMatrix m0 = build_m0(n_s, n_t).m;
    CHECK(std::abs(trace_quadratic(x.transpose() * a, m0) - diff.squaredNorm()) < 1e-10);
    CHECK(m0.dense().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(smallest_eigenvalue(m0.dense()) >= -1e-10);
  }
}

TEST_CASE("build_mc entries and errors") {
  Eigen::MatrixXd one(2, 2);
  one << 1, -1, -1, 1;
  CHECK(max_abs(build_mc({1}, {1}, 1).m.dense() - one) == 0.0);

  const MmdMatrix m = build_mc({1, 1, 2}, {1, 2}, 1);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(5, 5);
  const int idx[] = {0, 1, 3};
  const double block[3][3] = {{0.25, 0.25, -0.5}, {0.25, 0.25, -0.5}, {-0.5, -0.5, 1}};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) expect(idx[p], idx[q]) = block[p][q];
  CHECK(max_abs(m.m.dense() - expect) < 1e-15);
  CHECK(m.kind == MmdMatrix::Kind::kClass);
  CHECK(m.cls == 1);
  CHECK(m.n_source == 2);
  CHECK(m.n_target == 1);

  CHECK_THROWS_AS(build_mc({1}, {2}, 1), ClassAbsent);
  try {
    build_mc({1}, {2}, 1);
  } catch (const ClassAbsent& e) {
    CHECK(e.cls() == 1);
  }
  CHECK_THROWS_AS(build_mc({2}, {1}, 1), ClassAbsent);
}

TEST_CASE("build_mc quadratic form is the per-class squared mean difference") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 25; ++t) {
    const Labels y_s = covering_labels(rng, 15, 3);
    const Labels y_t = covering_labels(rng, 11, 3);
    const Eigen::MatrixXd x = gaussian(rng, 5, 26);
    const Eigen::MatrixXd a = gaussian(rng, 5, 3);
    const Eigen::MatrixXd z = a.transpose() * x;
    for (int c = 1; c <= 3; ++c) {
      const SymMatrix mc = build_mc(y_s, y_t, c).m;
      const Eigen::VectorXd diff =
          class_mean(z.leftCols(15), y_s, c) - class_mean(z.rightCols(11), y_t, c);
      CHECK(std::abs(trace_quadratic(x.transpose() * a, mc) - diff.squaredNorm()) < 1e-10);
      CHECK(mc.dense().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
      CHECK(smallest_eigenvalue(mc.dense()) >= -1e-10);
      // nonzero entries only on class-c samples
      const Labels all = concat(y_s, y_t);
      for (Index p = 0; p < 26; ++p) {
        if (all[static_cast<std::size_t>(p)] == c) continue;
        CHECK(mc.dense().row(p).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
}

TEST_CASE("scatter_total") {
  CHECK(max_abs(scatter_total(Eigen::MatrixXd::Constant(3, 1, 4.0)).dense()) == 0.0);
  CHECK(scatter_total(row({-1, 1})).dense()(0, 0) == doctest::Approx(2.0));

  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd x = gaussian(rng, 4, 9);
    const Eigen::MatrixXd h =
        Eigen::MatrixXd::Identity(9, 9) - Eigen::MatrixXd::Constant(9, 9, 1.0 / 9);
    const Eigen::MatrixXd s = scatter_total(x).dense();
    CHECK(max_abs(s - x * h * x.transpose()) < 1e-10);
    CHECK(max_abs(s - scatter_oracle(x)) < 1e-10);
    CHECK(smallest_eigenvalue(s) >= -1e-10);
  }
}

TEST_CASE("scatter_within") {
  LabeledData singletons{row({1, 5, 9}), {1, 2, 3}, 3};
  CHECK(max_abs(scatter_within(singletons).dense()) == 0.0);

  LabeledData d{row({-1, 1, 5}), {1, 1, 2}, 2};
  CHECK(scatter_within(d).dense()(0, 0) == doctest::Approx(2.0));

  // an empty class contributes nothing
  LabeledData gap{row({-1, 1, 5}), {1, 1, 3}, 3};
  CHECK(scatter_within(gap).dense()(0, 0) == doctest::Approx(2.0));

  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    LabeledData r{gaussian(rng, 3, 20), random_labels(rng, 20, 4), 4};
    Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(3, 3);
    for (int c = 1; c <= 4; ++c) {
      const Eigen::MatrixXd xc = columns_with_label(r.x, r.y, c);
      if (xc.cols() > 0) oracle += scatter_oracle(xc);
    }
    CHECK(max_abs(scatter_within(r).dense() - oracle) < 1e-12);
  }
}

TEST_CASE("scatter_between") {
  std::mt19937_64 rng(9);
  LabeledData one{gaussian(rng, 3, 7), Labels(7, 1), 1};
  CHECK(max_abs(scatter_between(one).dense()) < 1e-12);

  LabeledData two{row({-1, 1}), {1, 2}, 2};
  CHECK(scatter_between(two).dense()(0, 0) == doctest::Approx(2.0));

  for (int t = 0; t < 10; ++t) {
    LabeledData r{gaussian(rng, 6, 25), covering_labels(rng, 25, 3), 3};
    const Eigen::MatrixXd sb = scatter_between(r).dense();
    CHECK(max_abs(sb - (scatter_oracle(r.x) - scatter_within(r).dense())) < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sb, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -1e-10);
    // rank <= C - 1: the smallest m - (C - 1) eigenvalues vanish
    for (Index i = 0; i < 6 - 2; ++i) CHECK(std::abs(es.eigenvalues()(i)) < 1e-9);
  }
}

TEST_CASE("scatter_set satisfies S_v = S_w + S_b") {
  std::mt19937_64 rng(10);
  LabeledData d{gaussian(rng, 5, 30), random_labels(rng, 30, 4), 4};
  const ScatterSet s = scatter_set(d);
  CHECK(max_abs(s.s_v.dense() - s.s_w.dense() - s.s_b.dense()) < 1e-10);
  for (const auto* m : {&s.s_v, &s.s_w, &s.s_b}) CHECK(smallest_eigenvalue(m->dense()) >= -1e-8);
}

TEST_CASE("pairwise_mean_outer") {
  LabeledData same{row({-1, 1, -2, 2}), {1, 1, 2, 2}, 2};
  CHECK(max_abs(pairwise_mean_outer(same, 1, 2).dense()) == 0.0);

  LabeledData d{row({-1, 1, 3}), {1, 1, 2}, 2};
  CHECK(pairwise_mean_outer(d, 1, 2).dense()(0, 0) == doctest::Approx(9.0));

  std::mt19937_64 rng(12);
  LabeledData r{gaussian(rng, 4, 12), covering_labels(rng, 12, 3), 3};
  CHECK(pairwise_mean_outer(r, 1, 3).dense() == pairwise_mean_outer(r, 3, 1).dense());
  CHECK(smallest_eigenvalue(pairwise_mean_outer(r, 1, 2).dense()) >= -1e-12);

  LabeledData gap{row({1, 2}), {1, 1}, 2};
  CHECK_THROWS_AS(pairwise_mean_outer(gap, 1, 2), ClassAbsent);
  CHECK_THROWS_AS(pairwise_mean_outer(r, 2, 2), InvalidArgument);
}

TEST_CASE("implicit_weight") {
  CHECK(implicit_weight(10, 10) == doctest::Approx(0.2));
  CHECK(implicit_weight(100, 50) == doctest::Approx(0.03));
  CHECK(implicit_weight(1, 1) == 2.0);
  CHECK_THROWS_AS(implicit_weight(0, 4), InvalidArgument);
  CHECK_THROWS_AS(implicit_weight(4, 0), InvalidArgument);
}

TEST_CASE("pairwise inter-class identity residuals") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const Index m = std::uniform_int_distribution<Index>(1, 10)(rng);
    const int c = std::uniform_int_distribution<int>(2, 5)(rng);
    const Index n = std::uniform_int_distribution<Index>(c, 50)(rng);
    const Index k = std::uniform_int_distribution<Index>(1, m)(rng);
    LabeledData d{gaussian(rng, m, n) * 3.0, covering_labels(rng, n, c), c};
    CHECK(verify_lemma1(d, gaussian(rng, m, k)) <= 1e-10);
  }
  LabeledData one{gaussian(rng, 3, 6), Labels(6, 1), 1};
  CHECK(verify_lemma1(one, gaussian(rng, 3, 2)) <= 1e-12);
  LabeledData two{gaussian(rng, 3, 6), {1, 2, 1, 2, 1, 2}, 2};
  CHECK(verify_lemma1(two, Eigen::MatrixXd::Zero(3, 2)) == 0.0);
}

TEST_CASE("total = within + between residuals") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 100; ++t) {
    const Index m = std::uniform_int_distribution<Index>(1, 10)(rng);
    const int c = std::uniform_int_distribution<int>(1, 5)(rng);
    const Index n = std::uniform_int_distribution<Index>(1, 50)(rng);
    LabeledData d{gaussian(rng, m, n), random_labels(rng, n, c), c};
    CHECK(verify_lemma2(d) <= 1e-10);
  }

  LabeledData singletons{gaussian(rng, 3, 4), {1, 2, 3, 4}, 4};
  const ScatterSet s1 = scatter_set(singletons);
  CHECK(max_abs(s1.s_w.dense()) == 0.0);
  CHECK(max_abs(s1.s_b.dense() - s1.s_v.dense()) < 1e-12);

  LabeledData one{gaussian(rng, 3, 8), Labels(8, 1), 1};
  const ScatterSet s2 = scatter_set(one);
  CHECK(max_abs(s2.s_b.dense()) < 1e-12);
  CHECK(max_abs(s2.s_w.dense() - s2.s_v.dense()) < 1e-12);
}

TEST_CASE("class MMD = w (S_v - S_w) residuals") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 100; ++t) {
    const Index m = std::uniform_int_distribution<Index>(1, 10)(rng);
    const int num_classes = std::uniform_int_distribution<int>(1, 5)(rng);
    const Index n_s = std::uniform_int_distribution<Index>(num_classes, 25)(rng);
    const Index n_t = std::uniform_int_distribution<Index>(num_classes, 25)(rng);
    const Index k = std::uniform_int_distribution<Index>(1, m)(rng);
    LabeledData src{gaussian(rng, m, n_s), covering_labels(rng, n_s, num_classes), num_classes};
    LabeledData tgt{gaussian(rng, m, n_t), covering_labels(rng, n_t, num_classes), num_classes};
    const Eigen::MatrixXd a = gaussian(rng, m, k);
    for (int c = 1; c <= num_classes; ++c) CHECK(verify_lemma3(src, tgt, a, c) <= 1e-10);
  }
}

TEST_CASE("class MMD identity degenerate cases") {
  std::mt19937_64 rng(16);
  // single point per domain: both sides are |x_s - x_t|^2 under A = I
  LabeledData src{gaussian(rng, 3, 1), {1}, 1};
  LabeledData tgt{gaussian(rng, 3, 1), {1}, 1};
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  CHECK(verify_lemma3(src, tgt, eye, 1) <= 1e-12);
  Eigen::MatrixXd x_st(3, 2);
  x_st << src.x, tgt.x;
  CHECK(trace_quadratic(x_st.transpose(), build_mc({1}, {1}, 1).m) ==
        doctest::Approx((src.x - tgt.x).squaredNorm()));

  // identical class means across domains
  LabeledData s2{row({-1, 1}), {1, 1}, 1};
  LabeledData t2{row({-3, 3}), {1, 1}, 1};
  CHECK(verify_lemma3(s2, t2, Eigen::MatrixXd::Identity(1, 1), 1) <= 1e-10);
  Eigen::MatrixXd both(1, 4);
  both << -1, 1, -3, 3;
  CHECK(std::abs(trace_quadratic(both.transpose(), build_mc({1, 1}, {1, 1}, 1).m)) < 1e-12);

  CHECK_THROWS_AS(verify_lemma3(s2, LabeledData{row({0}), {2}, 2}, Eigen::MatrixXd::Identity(1, 1), 1),
                  ClassAbsent);
}

TEST_CASE("class helpers") {
  const Labels y{2, 1, 2, 3};
  CHECK(class_counts(y, 4) == std::vector<Index>{1, 2, 1, 0});
  CHECK(class_indices(y, 2) == std::vector<Index>{0, 2});
  CHECK(class_indices(y, 4).empty());
  Eigen::MatrixXd x = row({10, 11, 12, 13});
  CHECK(select_columns(x, {3, 1}) == row({13, 11}));

  LabeledData bad{row({1, 2}), {1, 3}, 2};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  LabeledData ragged{row({1, 2}), {1}, 2};
  CHECK_THROWS_AS(ragged.validate(), InvalidArgument);
  LabeledData ok{row({1, 2}), {1, 2}, 2};
  CHECK_NOTHROW(ok.validate());
}

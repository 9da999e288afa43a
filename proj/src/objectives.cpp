#include "dmmd/objectives.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "dmmd/errors.hpp"

namespace dmmd {

namespace {

// Everything except the alpha term is accumulated in an n_st x n_st kernel
// K and sandwiched once as X K X^T. Blocks are added in place rather than
// through full-size embedded matrices so the cost stays O(n_st^2).
struct Frame {
  Index n_s = 0;
  Index n_t = 0;
  int num_classes = 0;
  Eigen::MatrixXd kernel;
};

Frame make_frame(const Eigen::MatrixXd& x_st, const Labels& y_s, const Labels& y_t) {
  Frame f;
  f.n_s = static_cast<Index>(y_s.size());
  f.n_t = static_cast<Index>(y_t.size());
  if (f.n_s < 1 || f.n_t < 1) {
    throw InvalidArgument("assemble: both domains need at least one sample");
  }
  if (x_st.cols() != f.n_s + f.n_t) {
    throw InvalidArgument("assemble: X_st has " + std::to_string(x_st.cols()) +
                          " columns but " + std::to_string(f.n_s + f.n_t) +
                          " labels were given");
  }
  for (int label : y_s) {
    if (label < 1) throw InvalidArgument("assemble: source labels must be >= 1");
  }
  for (int label : y_t) {
    if (label < 1) throw InvalidArgument("assemble: target pseudo labels must be >= 1");
  }
  f.num_classes = std::max(*std::max_element(y_s.begin(), y_s.end()),
                           *std::max_element(y_t.begin(), y_t.end()));
  f.kernel = Eigen::MatrixXd::Zero(f.n_s + f.n_t, f.n_s + f.n_t);
  return f;
}

void add_block(Eigen::MatrixXd& kernel, const Eigen::MatrixXd& block,
               const std::vector<Index>& global, double scale) {
  const auto n = static_cast<Index>(global.size());
  for (Index q = 0; q < n; ++q) {
    for (Index p = 0; p < n; ++p) kernel(global[p], global[q]) += scale * block(p, q);
  }
}

void add_rank_one(Eigen::MatrixXd& kernel, const Eigen::VectorXd& e) {
  kernel.noalias() += e * e.transpose();
}

void add_marginal(Frame& f) {
  Eigen::VectorXd e(f.n_s + f.n_t);
  e.head(f.n_s).setConstant(1.0 / static_cast<double>(f.n_s));
  e.tail(f.n_t).setConstant(-1.0 / static_cast<double>(f.n_t));
  add_rank_one(f.kernel, e);
}

struct ClassGroup {
  int cls = 0;
  std::vector<Index> global;  // source-c first, then target-c
  Index n_s_c = 0;
  Index n_t_c = 0;
};

// Classes present in both domains; the rest are recorded as skipped.
std::vector<ClassGroup> shared_classes(const Frame& f, const Labels& y_s,
                                       const Labels& y_t, AssemblyMeta& meta) {
  std::vector<ClassGroup> groups;
  for (int c = 1; c <= f.num_classes; ++c) {
    ClassGroup g;
    g.cls = c;
    g.global = class_indices(y_s, c);
    g.n_s_c = static_cast<Index>(g.global.size());
    for (Index j : class_indices(y_t, c)) g.global.push_back(f.n_s + j);
    g.n_t_c = static_cast<Index>(g.global.size()) - g.n_s_c;
    if (g.n_s_c == 0 || g.n_t_c == 0) {
      meta.skipped_classes.push_back(c);
      continue;
    }
    meta.class_weights.emplace_back(c, implicit_weight(g.n_s_c, g.n_t_c));
    groups.push_back(std::move(g));
  }
  if (groups.empty()) {
    throw UnusableLabels("assemble: no class is present in both the source labels and "
                         "the target pseudo labels");
  }
  if (!meta.skipped_classes.empty()) {
    std::ostringstream msg;
    msg << "classes skipped (absent from a domain):";
    for (int c : meta.skipped_classes) msg << ' ' << c;
    meta.warnings.push_back(msg.str());
  }
  return groups;
}

// M_c = e e^T with e = +1/n_s^c on source-c and -1/n_t^c on target-c.
void add_class_mmd(Frame& f, const ClassGroup& g) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(f.n_s + f.n_t);
  for (Index p = 0; p < g.n_s_c; ++p) e(g.global[p]) = 1.0 / static_cast<double>(g.n_s_c);
  for (Index p = g.n_s_c; p < g.n_s_c + g.n_t_c; ++p) {
    e(g.global[p]) = -1.0 / static_cast<double>(g.n_t_c);
  }
  add_rank_one(f.kernel, e);
}

// w_st^c (coef_v L_v^c + coef_w L_w^c).
void add_class_laplacians(Frame& f, const ClassGroup& g, double coef_v, double coef_w) {
  const double w = implicit_weight(g.n_s_c, g.n_t_c);
  if (coef_v != 0.0) {
    add_block(f.kernel, variance_laplacian_star(g.n_s_c + g.n_t_c).dense(), g.global,
              w * coef_v);
  }
  if (coef_w != 0.0) {
    add_block(f.kernel, within_laplacian_star(g.n_s_c, g.n_t_c).dense(), g.global,
              w * coef_w);
  }
}

// Sum over i<j of one domain's inter-class Laplacians, times scale.
void add_interclass(Frame& f, const Labels& labels, Domain domain, Index offset,
                    WeightMode mode, double scale, AssemblyMeta& meta) {
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(f.num_classes));
  for (int c = 1; c <= f.num_classes; ++c) {
    members[static_cast<std::size_t>(c - 1)] = class_indices(labels, c);
  }
  for (int i = 1; i <= f.num_classes; ++i) {
    for (int j = i + 1; j <= f.num_classes; ++j) {
      const auto& mi = members[static_cast<std::size_t>(i - 1)];
      const auto& mj = members[static_cast<std::size_t>(j - 1)];
      if (mi.empty() || mj.empty()) {
        meta.skipped_pairs.push_back({domain, i, j});
        continue;
      }
      const auto n_i = static_cast<Index>(mi.size());
      const auto n_j = static_cast<Index>(mj.size());
      std::vector<Index> global;
      global.reserve(mi.size() + mj.size());
      for (Index p : mi) global.push_back(offset + p);
      for (Index p : mj) global.push_back(offset + p);
      const double weight = mode == WeightMode::kProduct ? implicit_weight(n_i, n_j) : 1.0;
      Eigen::MatrixXd star = centering_matrix(n_i + n_j).dense();
      star.topLeftCorner(n_i, n_i) -= centering_matrix(n_i).dense();
      star.bottomRightCorner(n_j, n_j) -= centering_matrix(n_j).dense();
      add_block(f.kernel, star, global, scale * weight);
    }
  }
}

// Unweighted within-class (per domain and class) centering blocks.
void add_within_per_domain(Frame& f, const Labels& labels, Index offset, double scale) {
  for (int c = 1; c <= f.num_classes; ++c) {
    auto idx = class_indices(labels, c);
    if (idx.empty()) continue;
    for (Index& p : idx) p += offset;
    add_block(f.kernel, centering_matrix(static_cast<Index>(idx.size())).dense(), idx, scale);
  }
}

// Unweighted between-class Laplacian of one domain: H_domain - sum_c H_c.
void add_between_per_domain(Frame& f, const Labels& labels, Index offset, double scale) {
  std::vector<Index> all(labels.size());
  for (std::size_t p = 0; p < labels.size(); ++p) all[p] = offset + static_cast<Index>(p);
  add_block(f.kernel, centering_matrix(static_cast<Index>(all.size())).dense(), all, scale);
  add_within_per_domain(f, labels, offset, -scale);
}

Assembly finish(const Eigen::MatrixXd& x_st, const Frame& f, AssemblyMeta meta) {
  Eigen::MatrixXd left = (x_st * f.kernel) * x_st.transpose();
  left.diagonal().array() += meta.alpha;
  meta.num_classes = f.num_classes;
  return {SymMatrix(left), scatter_total(x_st), std::move(meta)};
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0)) throw InvalidArgument("assemble: alpha must be >= 0");
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kBaseline: return "baseline";
    case Strategy::kStrategy1: return "s1";
    case Strategy::kStrategy2: return "s2";
    case Strategy::kAblation: return "ablation";
  }
  return "?";
}

const char* to_string(AblationVariant v) {
  switch (v) {
    case AblationVariant::kDtra: return "Dtra";
    case AblationVariant::kDter: return "Dter";
    case AblationVariant::kBoth: return "Both";
  }
  return "?";
}

const char* to_string(WeightMode m) {
  return m == WeightMode::kProduct ? "product" : "sum";
}

const char* to_string(Domain d) {
  return d == Domain::kSource ? "source" : "target";
}

Assembly assemble_baseline(const Eigen::MatrixXd& x_st, const Labels& y_s,
                           const Labels& y_t_pseudo, double alpha) {
  check_alpha(alpha);
  Frame f = make_frame(x_st, y_s, y_t_pseudo);
  AssemblyMeta meta;
  meta.strategy = Strategy::kBaseline;
  meta.alpha = alpha;
  meta.beta = -1.0;
  meta.lambda = 1.0;
  add_marginal(f);
  for (const auto& g : shared_classes(f, y_s, y_t_pseudo, meta)) add_class_mmd(f, g);
  return finish(x_st, f, std::move(meta));
}

Assembly assemble_strategy1(const Eigen::MatrixXd& x_st, const Labels& y_s,
                            const Labels& y_t_pseudo, double beta, double alpha) {
  check_alpha(alpha);
  Frame f = make_frame(x_st, y_s, y_t_pseudo);
  AssemblyMeta meta;
  meta.strategy = Strategy::kStrategy1;
  meta.alpha = alpha;
  meta.beta = beta;
  if (beta < -1.0 || beta > 1.0) {
    meta.warnings.push_back("beta=" + std::to_string(beta) + " outside [-1, 1]");
  }
  // Within term enters as +beta L_w, so beta = -1 gives back w (L_v - L_w) = M_c.
  add_marginal(f);
  for (const auto& g : shared_classes(f, y_s, y_t_pseudo, meta)) {
    add_class_laplacians(f, g, 1.0, beta);
  }
  return finish(x_st, f, std::move(meta));
}

Assembly assemble_strategy2(const Eigen::MatrixXd& x_st, const Labels& y_s,
                            const Labels& y_t_pseudo, double lambda, double alpha,
                            WeightMode mode) {
  check_alpha(alpha);
  Frame f = make_frame(x_st, y_s, y_t_pseudo);
  AssemblyMeta meta;
  meta.strategy = Strategy::kStrategy2;
  meta.alpha = alpha;
  meta.lambda = lambda;
  meta.weight_mode = mode;
  if (lambda < 0.0 || lambda > 1.0) {
    meta.warnings.push_back("lambda=" + std::to_string(lambda) + " outside [0, 1]");
  }
  add_marginal(f);
  for (const auto& g : shared_classes(f, y_s, y_t_pseudo, meta)) {
    add_class_laplacians(f, g, lambda, -lambda);
  }
  const double inter = -(1.0 - lambda);
  if (inter != 0.0) {
    add_interclass(f, y_s, Domain::kSource, 0, mode, inter, meta);
    add_interclass(f, y_t_pseudo, Domain::kTarget, f.n_s, mode, inter, meta);
    if (!meta.skipped_pairs.empty()) {
      meta.warnings.push_back(std::to_string(meta.skipped_pairs.size()) +
                              " inter-class pairs skipped (empty class in a domain)");
    }
  }
  return finish(x_st, f, std::move(meta));
}

Assembly assemble_ablation(const Eigen::MatrixXd& x_st, const Labels& y_s,
                           const Labels& y_t_pseudo, AblationVariant variant,
                           double gamma1, double gamma2, double alpha) {
  check_alpha(alpha);
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) {
    throw InvalidArgument("assemble_ablation: gamma values must be >= 0");
  }
  Frame f = make_frame(x_st, y_s, y_t_pseudo);
  AssemblyMeta meta;
  meta.strategy = Strategy::kAblation;
  meta.variant = variant;
  meta.alpha = alpha;
  meta.gamma1 = gamma1;
  meta.gamma2 = gamma2;
  add_marginal(f);
  for (const auto& g : shared_classes(f, y_s, y_t_pseudo, meta)) add_class_mmd(f, g);

  const bool use_tra = variant != AblationVariant::kDter && gamma1 != 0.0;
  const bool use_ter = variant != AblationVariant::kDtra && gamma2 != 0.0;
  if (use_tra) {
    add_within_per_domain(f, y_s, 0, gamma1);
    add_within_per_domain(f, y_t_pseudo, f.n_s, gamma1);
  }
  if (use_ter) {
    add_between_per_domain(f, y_s, 0, -gamma2);
    add_between_per_domain(f, y_t_pseudo, f.n_s, -gamma2);
  }
  return finish(x_st, f, std::move(meta));
}

Projection learn_projection(const Assembly& asm_, Index k, double ridge) {
  const EigResult eig = solve_generalized_eig(asm_.left, asm_.right, k, ridge);
  Projection p;
  p.a = eig.vectors;
  p.theta = eig.values;
  p.eig_residual = eig.residual;
  p.ridge_used = eig.ridge_used;
  Eigen::MatrixXd b = asm_.right.dense();
  b.diagonal().array() += eig.ridge_used;
  p.constraint_residual =
      (p.a.transpose() * b * p.a - Eigen::MatrixXd::Identity(k, k)).norm();
  return p;
}

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int i = -10; i <= 10; ++i) grid.push_back(static_cast<double>(i) / 10.0);
  return grid;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 2; i <= 10; ++i) grid.push_back(static_cast<double>(i) / 10.0);
  return grid;
}

}  // namespace dmmd

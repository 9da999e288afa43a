#pragma once

#include <vector>

#include "dmmd/matrixcore.hpp"
#include "dmmd/statistics.hpp"

namespace dmmd {

enum class Domain { kSource, kTarget };

// How the inter-class Laplacians are weighted. kProduct uses the same
// (n^i + n^j) / (n^i n^j) coefficient the class-wise MMD carries implicitly,
// so each block's quadratic form is the squared class-mean distance.
// kSum is the literal n^{ij} / (n^i + n^j), which is always 1.
enum class WeightMode { kProduct, kSum };

// Which within-class star matrix build_class_set uses. kLiteral is the
// V - G construction with 1/n^2 block entries as printed; it does not
// reproduce M_c and exists only for inspection.
enum class WithinForm { kCorrected, kLiteral };

/// Per-class variance and within Laplacians embedded in the n_st x n_st
/// frame, plus the implicit weight w_st^c.
struct ClassLaplacianSet {
  int cls = 0;
  SymMatrix l_v;
  SymMatrix l_w;
  double weight = 0.0;
  Index n_source = 0;
  Index n_target = 0;
};

struct InterClassLaplacian {
  Domain domain = Domain::kSource;
  int i = 0;
  int j = 0;
  SymMatrix l_b;   // already multiplied by weight
  double weight = 0.0;
};

/// blockdiag(I - 1/n_s 1, I - 1/n_t 1) of order n_s + n_t.
SymMatrix within_laplacian_star(Index n_s_c, Index n_t_c);

/// V - G with V holding 1/n_s^2 and 1/n_t^2 blocks and G = diag(row sums of V).
SymMatrix within_laplacian_star_literal(Index n_s_c, Index n_t_c);

/// I - 1/n 1 over the pooled class samples.
SymMatrix variance_laplacian_star(Index n_st_c);

/// Scatters a star matrix (source-c samples first, then target-c samples,
/// each in original order) into the n_s + n_t frame.
SymMatrix embed_class_laplacian(const SymMatrix& l_star, const Labels& y_s,
                                const Labels& y_t, int c);

/// Throws ClassAbsent when c is missing from either domain.
ClassLaplacianSet build_class_set(const Labels& y_s, const Labels& y_t, int c,
                                  WithinForm form = WithinForm::kCorrected);

/// Inter-class Laplacian for classes i, j of one domain, placed at global
/// indices offset + local index inside an n_st frame. Inside the pooled
/// block class-i samples precede class-j samples.
InterClassLaplacian build_interclass(const Labels& domain_labels, Domain domain,
                                     int i, int j, Index n_st, Index offset,
                                     WeightMode mode = WeightMode::kProduct);

}  // namespace dmmd

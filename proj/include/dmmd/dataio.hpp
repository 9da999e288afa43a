#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dmmd/statistics.hpp"

namespace dmmd {

inline constexpr int kUnlabeled = -1;

/// Contents of a label-first CSV domain file. Labels are >= 1 or kUnlabeled.
struct DomainFile {
  std::filesystem::path path;
  Eigen::MatrixXd x;  // features x samples
  Labels y;

  Index n() const noexcept { return x.cols(); }
  Index m() const noexcept { return x.rows(); }
  bool labeled() const;     // every row carries a label >= 1
  bool unlabeled() const;   // every row carries kUnlabeled

  /// LabeledData with num_classes = largest label. Throws InvalidArgument
  /// when any row is unlabeled.
  LabeledData as_labeled() const;
};

/// Column 1 is the integer label (-1 for unlabeled), the remaining columns
/// are features. Throws ParseError naming the 1-based row and column on
/// ragged rows, non-numeric cells, bad labels or an empty file.
DomainFile load_domain_csv(const std::filesystem::path& path, bool has_header = false);
DomainFile parse_domain_csv(const std::string& text, bool has_header = false,
                            const std::string& source_name = "<memory>");

/// Writes with 17 significant digits so values reload bit-exactly.
void save_domain_csv(const std::filesystem::path& path, const Eigen::MatrixXd& x,
                     const Labels& y);

/// One integer label per line.
Labels load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const Labels& y);

/// Writes samples as rows, no label column.
void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& x);

enum class NormalizeMode { kNone, kZscore, kZscoreL2 };

const char* to_string(NormalizeMode m);
NormalizeMode parse_normalize_mode(const std::string& s);

struct NormStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;  // population standard deviation
};

NormStats compute_norm_stats(const Eigen::MatrixXd& x);

/// zscore: (x - mean) / max(sd, 1e-12) per feature, using `stats` when
/// given and statistics of x otherwise. zscore+l2 then scales every nonzero
/// column to unit length.
std::pair<Eigen::MatrixXd, NormStats> normalize(const Eigen::MatrixXd& x, NormalizeMode mode,
                                                const std::optional<NormStats>& stats = {});

/// Scales each nonzero column to unit Euclidean length.
void normalize_columns_l2(Eigen::MatrixXd& x);

struct SynthSpec {
  int num_classes = 4;
  Index dim = 20;
  Index n_per_class_source = 50;
  Index n_per_class_target = 50;
  double class_sep = 4.0;
  double domain_rotation_deg = 30.0;
  double domain_shift = 2.0;
  double noise_sigma = 1.0;
  std::uint64_t seed = 7;

  void validate() const;
};

struct SynthData {
  LabeledData source;
  Eigen::MatrixXd target_x;
  Labels target_truth;
  Eigen::MatrixXd class_means;  // dim x C
};

/// Class means sit on a regular simplex with pairwise distance class_sep in
/// the first C-1 coordinates. Both domains draw isotropic noise around the
/// same means; target samples are then rotated by domain_rotation_deg in a
/// random 2-D plane and offset by a random vector of length domain_shift.
/// The plane lies inside the class-mean coordinates when C >= 3. Samples
/// are grouped by class.
SynthData synth_shifted_gaussians(const SynthSpec& spec);

}  // namespace dmmd

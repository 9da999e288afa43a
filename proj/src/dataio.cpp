#include "dmmd/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>
#include <vector>

#include "dmmd/errors.hpp"

namespace dmmd {

namespace {

constexpr double kSdGuard = 1e-12;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::string where(const std::string& source, std::size_t row, std::size_t col) {
  return source + ": row " + std::to_string(row) + ", column " + std::to_string(col);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

}  // namespace

bool DomainFile::labeled() const {
  return !y.empty() && std::all_of(y.begin(), y.end(), [](int v) { return v >= 1; });
}

bool DomainFile::unlabeled() const {
  return std::all_of(y.begin(), y.end(), [](int v) { return v == kUnlabeled; });
}

LabeledData DomainFile::as_labeled() const {
  if (!labeled()) {
    throw InvalidArgument(path.string() + ": domain has unlabeled rows");
  }
  LabeledData d{x, y, *std::max_element(y.begin(), y.end())};
  d.validate();
  return d;
}

DomainFile parse_domain_csv(const std::string& text, bool has_header,
                            const std::string& source_name) {
  std::vector<std::vector<double>> rows;
  Labels labels;
  std::size_t width = 0;
  std::size_t row_no = 0;
  bool header_pending = has_header;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++row_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto cells = split_commas(body);
    if (cells.size() < 2) {
      throw ParseError(row_no, cells.size(),
                       where(source_name, row_no, 1) + ": need a label and at least one feature");
    }
    if (width == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw ParseError(row_no, cells.size(),
                       where(source_name, row_no, cells.size()) + ": ragged row with " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(width));
    }

    int label = 0;
    const auto& lc = cells[0];
    auto [lp, lec] = std::from_chars(lc.data(), lc.data() + lc.size(), label);
    if (lec != std::errc() || lp != lc.data() + lc.size()) {
      throw ParseError(row_no, 1, where(source_name, row_no, 1) + ": label '" +
                                      std::string(lc) + "' is not an integer");
    }
    if (label < 1 && label != kUnlabeled) {
      throw ParseError(row_no, 1, where(source_name, row_no, 1) + ": label " +
                                      std::to_string(label) + " must be >= 1 or -1");
    }

    std::vector<double> values(width - 1);
    for (std::size_t c = 1; c < width; ++c) {
      const auto& cell = cells[c];
      double v = 0.0;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || p != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError(row_no, c + 1, where(source_name, row_no, c + 1) + ": '" +
                                            std::string(cell) + "' is not a number");
      }
      values[c - 1] = v;
    }
    rows.push_back(std::move(values));
    labels.push_back(label);
  }
  if (rows.empty()) throw ParseError(row_no, 0, source_name + ": no data rows");

  DomainFile f;
  f.path = source_name;
  f.x.resize(static_cast<Index>(width - 1), static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i + 1 < width; ++i) {
      f.x(static_cast<Index>(i), static_cast<Index>(j)) = rows[j][i];
    }
  }
  f.y = std::move(labels);
  return f;
}

DomainFile load_domain_csv(const std::filesystem::path& path, bool has_header) {
  auto in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  DomainFile f = parse_domain_csv(buf.str(), has_header, path.string());
  f.path = path;
  return f;
}

void save_domain_csv(const std::filesystem::path& path, const Eigen::MatrixXd& x,
                     const Labels& y) {
  if (static_cast<Index>(y.size()) != x.cols()) {
    throw InvalidArgument("save_domain_csv: label count does not match samples");
  }
  auto out = open_out(path);
  for (Index j = 0; j < x.cols(); ++j) {
    out << y[static_cast<std::size_t>(j)];
    for (Index i = 0; i < x.rows(); ++i) out << ',' << format_double(x(i, j));
    out << '\n';
  }
}

void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& x) {
  auto out = open_out(path);
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (i > 0) out << ',';
      out << format_double(x(i, j));
    }
    out << '\n';
  }
}

Labels load_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  Labels y;
  std::string line;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    int v = 0;
    auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || p != body.data() + body.size()) {
      throw ParseError(row_no, 1, where(path.string(), row_no, 1) + ": '" +
                                      std::string(body) + "' is not an integer label");
    }
    y.push_back(v);
  }
  if (y.empty()) throw ParseError(row_no, 0, path.string() + ": no labels");
  return y;
}

void save_labels(const std::filesystem::path& path, const Labels& y) {
  auto out = open_out(path);
  for (int v : y) out << v << '\n';
}

const char* to_string(NormalizeMode m) {
  switch (m) {
    case NormalizeMode::kNone: return "none";
    case NormalizeMode::kZscore: return "zscore";
    case NormalizeMode::kZscoreL2: return "zscore+l2";
  }
  return "?";
}

NormalizeMode parse_normalize_mode(const std::string& s) {
  if (s == "none") return NormalizeMode::kNone;
  if (s == "zscore") return NormalizeMode::kZscore;
  if (s == "zscore+l2") return NormalizeMode::kZscoreL2;
  throw InvalidArgument("unknown normalize mode '" + s + "'");
}

NormStats compute_norm_stats(const Eigen::MatrixXd& x) {
  if (x.cols() < 1) throw InvalidArgument("compute_norm_stats: no samples");
  NormStats s;
  s.mean = x.rowwise().mean();
  const Eigen::MatrixXd centered = x.colwise() - s.mean;
  s.sd = (centered.array().square().rowwise().sum() / static_cast<double>(x.cols())).sqrt();
  return s;
}

void normalize_columns_l2(Eigen::MatrixXd& x) {
  for (Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    if (norm > 0.0) x.col(j) /= norm;
  }
}

std::pair<Eigen::MatrixXd, NormStats> normalize(const Eigen::MatrixXd& x, NormalizeMode mode,
                                                const std::optional<NormStats>& stats) {
  if (mode == NormalizeMode::kNone) return {x, stats.value_or(NormStats{})};
  NormStats s = stats ? *stats : compute_norm_stats(x);
  if (s.mean.size() != x.rows() || s.sd.size() != x.rows()) {
    throw InvalidArgument("normalize: statistics do not match the feature count");
  }
  Eigen::MatrixXd out = x.colwise() - s.mean;
  const Eigen::VectorXd inv = s.sd.cwiseMax(kSdGuard).cwiseInverse();
  out = inv.asDiagonal() * out;
  if (mode == NormalizeMode::kZscoreL2) normalize_columns_l2(out);
  return {std::move(out), std::move(s)};
}

void SynthSpec::validate() const {
  if (num_classes < 1) throw InvalidArgument("SynthSpec: num_classes must be >= 1");
  if (dim < 2 || dim < num_classes - 1) {
    throw InvalidArgument("SynthSpec: dim must be >= max(2, C-1)");
  }
  if (n_per_class_source < 1 || n_per_class_target < 1) {
    throw InvalidArgument("SynthSpec: per-class counts must be >= 1");
  }
  if (!(class_sep > 0.0)) throw InvalidArgument("SynthSpec: class_sep must be > 0");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("SynthSpec: noise_sigma must be >= 0");
  if (!std::isfinite(domain_rotation_deg) || !std::isfinite(domain_shift)) {
    throw InvalidArgument("SynthSpec: rotation and shift must be finite");
  }
}

SynthData synth_shifted_gaussians(const SynthSpec& spec) {
  spec.validate();
  const int C = spec.num_classes;
  const Index m = spec.dim;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Helmert coordinates of the centered one-hot vectors: a regular simplex
  // with pairwise distance sqrt(2), rescaled to class_sep.
  SynthData out;
  out.class_means = Eigen::MatrixXd::Zero(m, C);
  for (int c = 0; c < C; ++c) {
    for (int k = 1; k < C; ++k) {
      const double norm = std::sqrt(static_cast<double>(k) * (k + 1));
      double coord = 0.0;
      if (c < k) coord = 1.0 / norm;
      else if (c == k) coord = -static_cast<double>(k) / norm;
      out.class_means(k - 1, c) = coord * spec.class_sep / std::numbers::sqrt2;
    }
  }

  const Index plane_dims = C >= 3 ? C - 1 : m;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
  for (Index i = 0; i < plane_dims; ++i) u(i) = gauss(rng);
  for (Index i = 0; i < plane_dims; ++i) v(i) = gauss(rng);
  u.normalize();
  v -= u.dot(v) * u;
  v.normalize();
  const double theta = spec.domain_rotation_deg * std::numbers::pi / 180.0;
  Eigen::MatrixXd rotation = Eigen::MatrixXd::Identity(m, m) +
                             (std::cos(theta) - 1.0) * (u * u.transpose() + v * v.transpose()) +
                             std::sin(theta) * (v * u.transpose() - u * v.transpose());

  Eigen::VectorXd shift(m);
  for (Index i = 0; i < m; ++i) shift(i) = gauss(rng);
  shift *= spec.domain_shift / shift.norm();

  auto draw = [&](Index per_class, Eigen::MatrixXd& x, Labels& y) {
    x.resize(m, per_class * C);
    y.resize(static_cast<std::size_t>(per_class * C));
    Index col = 0;
    for (int c = 0; c < C; ++c) {
      for (Index r = 0; r < per_class; ++r, ++col) {
        for (Index i = 0; i < m; ++i) x(i, col) = out.class_means(i, c) + spec.noise_sigma * gauss(rng);
        y[static_cast<std::size_t>(col)] = c + 1;
      }
    }
  };

  draw(spec.n_per_class_source, out.source.x, out.source.y);
  out.source.num_classes = C;
  draw(spec.n_per_class_target, out.target_x, out.target_truth);
  out.target_x = (rotation * out.target_x).colwise() + shift;
  return out;
}

}  // namespace dmmd

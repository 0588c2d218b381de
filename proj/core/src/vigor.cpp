// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/vigor.hpp"

#include "parallel.hpp"
#include "vineskel/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>

namespace vineskel {

Eigen::Matrix<double, kFeatureCount, 1> VineFeatures::vector() const {
  return {cane_voxels, cordon_voxels, pole_distance, skeleton_length, cane_pixels};
}

VineFeatures extract_features(const PointCloud& cane_cloud, const PointCloud& cordon_cloud, const Skeleton& skeleton,
                              const std::vector<Mask>& cane_masks, double pole_distance, double voxel_size) {
  if (pole_distance < 0.0) throw InvalidParameter("pole distance must be non-negative");
  VineFeatures f;
  f.cane_voxels = static_cast<double>(count_filled_voxels(cane_cloud, voxel_size));
  f.cordon_voxels = static_cast<double>(count_filled_voxels(cordon_cloud, voxel_size));
  f.pole_distance = pole_distance;
  f.skeleton_length = skeleton.total_length();
  std::size_t pixels = 0;
  for (const Mask& m : cane_masks) pixels += m.count();
  f.cane_pixels = static_cast<double>(pixels);
  return f;
}

Eigen::VectorXd LinearModel::standardize(const Eigen::VectorXd& raw) const {
  return ((raw - feature_means).array() / feature_stds.array()).matrix();
}

double LinearModel::predict(const Eigen::VectorXd& raw) const { return bias + weights.dot(standardize(raw)); }

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& raw_rows) const {
  Eigen::VectorXd out(raw_rows.rows());
  for (Eigen::Index i = 0; i < raw_rows.rows(); ++i) out[i] = predict(Eigen::VectorXd(raw_rows.row(i).transpose()));
  return out;
}

LinearModel fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> names) {
  if (x.rows() != y.size()) throw ShapeError("feature rows and labels differ in count");
  if (static_cast<Eigen::Index>(names.size()) != x.cols()) throw ShapeError("feature names do not match columns");
  if (x.rows() < 6) throw InsufficientRows("linear model needs at least 6 rows, got " + std::to_string(x.rows()));

  const auto n = static_cast<double>(x.rows());
  LinearModel m;
  m.feature_names = std::move(names);
  m.feature_means = x.colwise().mean().transpose();
  m.feature_stds.resize(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double var = (x.col(c).array() - m.feature_means[c]).square().sum() / n;
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m.feature_means[c])))) throw DegenerateFeature(m.feature_names[static_cast<std::size_t>(c)]);
    m.feature_stds[c] = sd;
  }
  Eigen::MatrixXd z(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) z.row(i) = m.standardize(x.row(i).transpose()).transpose();

  // Centred columns decouple the bias from the weights.
  m.bias = y.mean();
  const Eigen::VectorXd yc = y.array() - m.bias;
  const Eigen::MatrixXd gram = z.transpose() * z;
  const Eigen::VectorXd rhs = z.transpose() * yc;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  Eigen::VectorXd w;
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-12) w = ldlt.solve(rhs);
  if (w.size() == 0 || !w.allFinite()) w = gram.completeOrthogonalDecomposition().solve(rhs);
  m.weights = w;
  return m;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> design_matrix(const std::vector<VineFeatures>& rows) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kFeatureCount));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].pruning_weight) throw InvalidParameter("row '" + rows[i].vine_id + "' has no pruning weight");
    x.row(static_cast<Eigen::Index>(i)) = rows[i].vector().transpose();
    y[static_cast<Eigen::Index>(i)] = *rows[i].pruning_weight;
  }
  return {x, y};
}

namespace {

std::vector<std::string> all_names() { return {kFeatureNames.begin(), kFeatureNames.end()}; }

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(idx[k]));
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& y, const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Eigen::Index>(k)] = y[static_cast<Eigen::Index>(idx[k])];
  return out;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

std::size_t train_count(std::size_t n, const FoldOptions& options) {
  if (!(options.train_frac > 0.0 && options.train_frac < 1.0)) throw InvalidParameter("train_frac must lie in (0, 1)");
  const auto train = static_cast<std::size_t>(std::llround(options.train_frac * static_cast<double>(n)));
  if (train < 6 || n < train + 2)
    throw InsufficientRows(std::to_string(n) + " rows leave fewer than 6 training or 2 test rows per split");
  return train;
}

// Unbiased integer in [0, bound) by rejection.
std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t v = gen();
    if (v < limit) return v % bound;
  }
}

}  // namespace

double r_squared(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted, double reference_mean) {
  const double ss_res = (truth - predicted).squaredNorm();
  const double ss_tot = (truth.array() - reference_mean).square().sum();
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

double rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted) {
  if (truth.size() == 0) return 0.0;
  return std::sqrt((truth - predicted).squaredNorm() / static_cast<double>(truth.size()));
}

LinearModel fit_model(const std::vector<VineFeatures>& rows) {
  auto [x, y] = design_matrix(rows);
  return fit_linear(x, y, all_names());
}

std::vector<std::size_t> fold_train_indices(std::size_t n_rows, std::size_t fold, const FoldOptions& options) {
  const std::size_t train = train_count(n_rows, options);
  std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                    static_cast<std::uint32_t>(fold), static_cast<std::uint32_t>(fold >> 32)};
  std::mt19937_64 gen(seq);
  std::vector<std::size_t> perm(n_rows);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n_rows; i > 1; --i) std::swap(perm[i - 1], perm[bounded(gen, i)]);
  perm.resize(train);
  std::sort(perm.begin(), perm.end());
  return perm;
}

FoldReport evaluate_folds(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names,
                          const FoldOptions& options) {
  const auto n = static_cast<std::size_t>(x.rows());
  train_count(n, options);
  if (options.n_folds == 0) throw InvalidParameter("n_folds must be positive");

  FoldReport report;
  report.folds.resize(options.n_folds);
  detail::parallel_for(options.n_folds, options.threads, [&](std::size_t f) {
    const auto train = fold_train_indices(n, f, options);
    std::vector<std::size_t> test;
    std::vector<std::uint8_t> in_train(n, 0);
    for (std::size_t i : train) in_train[i] = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (!in_train[i]) test.push_back(i);
    const Eigen::VectorXd y_train = take(y, train);
    const Eigen::VectorXd y_test = take(y, test);
    const LinearModel model = fit_linear(take_rows(x, train), y_train, names);
    const Eigen::VectorXd pred = model.predict(take_rows(x, test));
    const double ref = options.r2_reference == R2Reference::test_mean ? y_test.mean() : y_train.mean();
    report.folds[f] = {r_squared(y_test, pred, ref), rmse(y_test, pred)};
  });
  std::vector<double> r2, err;
  for (const auto& rec : report.folds) {
    r2.push_back(rec.r2);
    err.push_back(rec.rmse);
  }
  std::tie(report.r2_mean, report.r2_std) = mean_std(r2);
  std::tie(report.rmse_mean, report.rmse_std) = mean_std(err);
  return report;
}

FoldReport evaluate_folds(const std::vector<VineFeatures>& rows, const FoldOptions& options) {
  auto [x, y] = design_matrix(rows);
  return evaluate_folds(x, y, all_names(), options);
}

std::vector<std::pair<std::string, FoldReport>> drop_one_analysis(const std::vector<VineFeatures>& rows,
                                                                  const FoldOptions& options) {
  auto [x, y] = design_matrix(rows);
  std::vector<std::pair<std::string, FoldReport>> out;
  for (std::size_t drop = 0; drop < kFeatureCount; ++drop) {
    Eigen::MatrixXd reduced(x.rows(), static_cast<Eigen::Index>(kFeatureCount - 1));
    std::vector<std::string> names;
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < kFeatureCount; ++c) {
      if (c == drop) continue;
      reduced.col(col++) = x.col(static_cast<Eigen::Index>(c));
      names.emplace_back(kFeatureNames[c]);
    }
    out.emplace_back(std::string(kFeatureNames[drop]), evaluate_folds(reduced, y, names, options));
  }
  return out;
}

}  // namespace vineskel

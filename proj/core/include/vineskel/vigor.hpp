// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/cloud.hpp"
#include "vineskel/mask.hpp"
#include "vineskel/skeleton.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vineskel {

inline constexpr std::size_t kFeatureCount = 5;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "cane_voxels", "cordon_voxels", "pole_distance", "skeleton_length", "cane_pixels"};

struct VineFeatures {
  std::string vine_id;
  double cane_voxels = 0.0;      ///< filled 2 cm voxels
  double cordon_voxels = 0.0;    ///< filled 2 cm voxels
  double pole_distance = 0.0;    ///< m
  double skeleton_length = 0.0;  ///< m
  double cane_pixels = 0.0;      ///< summed over views
  std::optional<double> pruning_weight;  ///< kg

  Eigen::Matrix<double, kFeatureCount, 1> vector() const;
};

VineFeatures extract_features(const PointCloud& cane_cloud, const PointCloud& cordon_cloud, const Skeleton& skeleton,
                              const std::vector<Mask>& cane_masks, double pole_distance, double voxel_size = 0.02);

/// Ordinary least squares on z-scored features. Means and population
/// standard deviations come from the training rows.
struct LinearModel {
  std::vector<std::string> feature_names;
  Eigen::VectorXd weights;  ///< z-space
  double bias = 0.0;
  Eigen::VectorXd feature_means;
  Eigen::VectorXd feature_stds;

  Eigen::VectorXd standardize(const Eigen::VectorXd& raw) const;
  double predict(const Eigen::VectorXd& raw) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& raw_rows) const;
};

/// Fits on the columns of `x` (rows are samples). Throws InsufficientRows
/// below 6 rows and DegenerateFeature for a constant column.
LinearModel fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> names);

/// All five features; every row needs a pruning weight.
LinearModel fit_model(const std::vector<VineFeatures>& rows);

enum class R2Reference { test_mean, train_mean };

double r_squared(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted, double reference_mean);
double rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted);

struct FoldRecord {
  double r2 = 0.0;
  double rmse = 0.0;
};

struct FoldReport {
  double r2_mean = 0.0;
  double r2_std = 0.0;
  double rmse_mean = 0.0;
  double rmse_std = 0.0;
  std::vector<FoldRecord> folds;
};

struct FoldOptions {
  std::size_t n_folds = 100;
  double train_frac = 0.7;
  std::uint64_t seed = 0;
  R2Reference r2_reference = R2Reference::test_mean;
  int threads = 1;
};

/// Training-row indices of fold `fold`: a seeded Fisher-Yates permutation,
/// first round(train_frac * n) entries, sorted.
std::vector<std::size_t> fold_train_indices(std::size_t n_rows, std::size_t fold, const FoldOptions& options);

/// Random train/test splits. Throws InsufficientRows unless every split
/// has at least 6 training and 2 test rows.
FoldReport evaluate_folds(const std::vector<VineFeatures>& rows, const FoldOptions& options = {});
FoldReport evaluate_folds(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names,
                          const FoldOptions& options = {});

/// One report per removed feature, in kFeatureNames order, all on the
/// same splits.
std::vector<std::pair<std::string, FoldReport>> drop_one_analysis(const std::vector<VineFeatures>& rows,
                                                                  const FoldOptions& options = {});

/// Feature matrix and labels; throws InvalidParameter when a label is missing.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> design_matrix(const std::vector<VineFeatures>& rows);

}  // namespace vineskel

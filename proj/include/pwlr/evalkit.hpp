#pragma once

#include "pwlr/forest.hpp"
#include "pwlr/graph.hpp"
#include "pwlr/pipeline.hpp"

#include <compare>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pwlr {

/// Assigns every sample to one of `folds` folds so that each class is spread
/// as evenly as possible (per-fold class counts differ by at most one).
/// Throws StratificationError when a class has fewer members than folds.
std::vector<int> stratified_fold_ids(std::span<const int> labels, int folds, std::uint64_t seed);

struct GridChoice {
  int k1 = 0;
  int k2 = 0;
  int trees = 0;
  auto operator<=>(const GridChoice&) const = default;
};

struct CvOptions {
  int repeats = 10;
  int folds = 10;
  int inner_folds = 5;
  std::vector<int> k1_values;
  std::vector<int> k2_values;
  std::vector<int> tree_counts{10, 25, 50, 100, 150, 200};
  std::uint64_t seed = 0;
  int threads = 1;
  /// trees and seed are overridden per fit.
  ForestConfig forest;

  void validate() const;
};

struct CvReport {
  std::string mode;
  /// [repeat][fold]
  std::vector<std::vector<double>> fold_accuracies;
  /// Same layout as fold_accuracies.
  std::vector<std::vector<GridChoice>> chosen;
  double mean = 0.0;
  /// Population standard deviation over all repeats x folds.
  double std = 0.0;
  double runtime_seconds = 0.0;

  /// Recomputes mean and std from fold_accuracies.
  void finalize();
};

/// Repeated stratified k-fold with an inner k-fold grid search over
/// (k1, k2, trees) on each outer training fold. Ties in inner accuracy go to
/// the lexicographically smallest (k1, k2, trees).
CvReport cross_validate_grid(const EmbeddingGrid& grid, EmbeddingMode mode, const CvOptions& options);

/// Precomputes the grid for all modes once, then runs cross_validate_grid
/// per mode.
std::vector<CvReport> cross_validate(const GraphDataset& ds, const std::vector<EmbeddingMode>& modes,
                                     const PwlrConfig& base, const CvOptions& options);

/// Single-pass stratified k-fold accuracy of a fixed forest config.
double cross_validated_accuracy(const DenseMatrix& x, std::span<const int> labels, const ForestConfig& cfg, int folds,
                                std::uint64_t seed);

}  // namespace pwlr

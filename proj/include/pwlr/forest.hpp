#pragma once

#include "pwlr/graph.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace pwlr {

struct ForestConfig {
  int trees = 100;
  /// Features tried per split; 0 means floor(sqrt(dim)), at least 1.
  int max_features = 0;
  int min_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

/// splitmix64 finalizer; used to derive independent RNG streams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Unpruned CART tree with Gini splits.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  ///< -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;  ///< class index (majority at this node)
  };

  /// `rows` lists training rows, repeated for bootstrap multiplicity.
  /// Labels are class indices in [0, classes).
  static DecisionTree grow(const DenseMatrix& x, std::span<const int> y, int classes, std::vector<int> rows,
                           int max_features, int min_leaf, std::uint64_t seed);

  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& sample) const;
  std::size_t node_count() const { return nodes_.size(); }

 private:
  std::vector<Node> nodes_;
};

/// Bagged ensemble of DecisionTree. Tree i draws from its own stream
/// mix_seed(seed, i), so the first t trees of a forest equal a forest trained
/// with trees = t under the same seed.
class RandomForest {
 public:
  /// Throws ValidationError for fewer than two classes or bad shapes.
  static RandomForest train(const DenseMatrix& x, std::span<const int> labels, const ForestConfig& cfg);

  /// Majority vote of the first `tree_limit` trees (all when 0); ties go to
  /// the smallest class label.
  std::vector<int> predict(const DenseMatrix& x, std::size_t tree_limit = 0) const;

  /// Accuracy of every prefix size in `tree_counts` in one pass.
  std::vector<std::size_t> correct_by_prefix(const DenseMatrix& x, std::span<const int> labels,
                                             std::span<const int> tree_counts) const;

  std::size_t tree_count() const { return trees_.size(); }
  const std::vector<int>& classes() const { return classes_; }

 private:
  std::vector<DecisionTree> trees_;
  std::vector<int> classes_;
};

double accuracy(std::span<const int> predicted, std::span<const int> truth);

}  // namespace pwlr

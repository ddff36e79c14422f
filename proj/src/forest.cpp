#include "pwlr/forest.hpp"

#include "pwlr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace pwlr {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct Builder {
  const DenseMatrix& x;
  std::span<const int> y;
  int classes;
  int max_features;
  int min_leaf;
  std::mt19937_64 rng;
  std::vector<DecisionTree::Node>& nodes;

  std::vector<int> features{};
  std::vector<int> left_counts{};
  std::vector<int> total_counts{};
  std::vector<int> right_counts{};
  std::vector<std::pair<double, int>> column{};

  static double gini_weighted(const std::vector<int>& counts, int n) {
    if (n == 0) return 0.0;
    double sq = 0.0;
    for (int c : counts) sq += static_cast<double>(c) * c;
    return n - sq / n;  // n * gini
  }

  int majority(const std::vector<int>& counts) const {
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }

  int build(std::vector<int>& rows, std::size_t begin, std::size_t end) {
    const int node_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const int n = static_cast<int>(end - begin);

    total_counts.assign(static_cast<std::size_t>(classes), 0);
    for (std::size_t i = begin; i < end; ++i) ++total_counts[y[rows[i]]];
    nodes[node_id].label = majority(total_counts);
    const bool pure = std::count_if(total_counts.begin(), total_counts.end(), [](int c) { return c > 0; }) <= 1;
    if (pure || n < 2 * min_leaf) return node_id;

    const double parent = gini_weighted(total_counts, n);
    std::shuffle(features.begin(), features.end(), rng);

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_impurity = parent;
    int tried = 0;
    column.resize(static_cast<std::size_t>(n));
    for (int f : features) {
      if (tried >= max_features && best_feature >= 0) break;
      for (int i = 0; i < n; ++i) {
        const int r = rows[begin + static_cast<std::size_t>(i)];
        column[i] = {x(r, f), y[r]};
      }
      const auto col_end = column.begin() + n;
      std::sort(column.begin(), col_end, [](const auto& a, const auto& b) { return a.first < b.first; });
      if (column.front().first == column[n - 1].first) continue;  // constant: does not count as tried
      ++tried;
      left_counts.assign(static_cast<std::size_t>(classes), 0);
      right_counts = total_counts;
      for (int i = 0; i + 1 < n; ++i) {
        ++left_counts[column[i].second];
        --right_counts[column[i].second];
        if (column[i].first == column[i + 1].first) continue;
        const int nl = i + 1;
        const int nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double impurity = gini_weighted(left_counts, nl) + gini_weighted(right_counts, nr);
        if (impurity < best_impurity - 1e-12 || best_feature < 0) {
          best_impurity = impurity;
          best_feature = f;
          best_threshold = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
          if (best_threshold >= column[i + 1].first) best_threshold = column[i].first;
        }
      }
    }
    if (best_feature < 0) return node_id;

    auto mid_it = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                 rows.begin() + static_cast<std::ptrdiff_t>(end),
                                 [&](int r) { return x(r, best_feature) <= best_threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - rows.begin());
    nodes[node_id].feature = best_feature;
    nodes[node_id].threshold = best_threshold;
    const int left = build(rows, begin, mid);
    const int right = build(rows, mid, end);
    nodes[node_id].left = left;
    nodes[node_id].right = right;
    return node_id;
  }
};

}  // namespace

DecisionTree DecisionTree::grow(const DenseMatrix& x, std::span<const int> y, int classes, std::vector<int> rows,
                                int max_features, int min_leaf, std::uint64_t seed) {
  DecisionTree tree;
  Builder b{x, y, classes, std::max(1, max_features), std::max(1, min_leaf), std::mt19937_64(seed), tree.nodes_};
  b.features.resize(static_cast<std::size_t>(x.cols()));
  std::iota(b.features.begin(), b.features.end(), 0);
  if (rows.empty()) {
    tree.nodes_.emplace_back();
    return tree;
  }
  b.build(rows, 0, rows.size());
  return tree;
}

int DecisionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& sample) const {
  int id = 0;
  while (nodes_[id].feature >= 0) {
    id = sample[nodes_[id].feature] <= nodes_[id].threshold ? nodes_[id].left : nodes_[id].right;
  }
  return nodes_[id].label;
}

RandomForest RandomForest::train(const DenseMatrix& x, std::span<const int> labels, const ForestConfig& cfg) {
  if (cfg.trees < 1) throw ValidationError("forest needs at least one tree");
  if (x.rows() != static_cast<Eigen::Index>(labels.size())) throw ValidationError("feature rows differ from labels");
  if (!x.allFinite()) throw ValidationError("features contain missing or non-finite values");

  RandomForest forest;
  forest.classes_.assign(labels.begin(), labels.end());
  std::sort(forest.classes_.begin(), forest.classes_.end());
  forest.classes_.erase(std::unique(forest.classes_.begin(), forest.classes_.end()), forest.classes_.end());
  if (forest.classes_.size() < 2) throw ValidationError("training data must contain at least two classes");

  std::vector<int> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y[i] = static_cast<int>(std::lower_bound(forest.classes_.begin(), forest.classes_.end(), labels[i]) -
                            forest.classes_.begin());
  }
  const int dim = static_cast<int>(x.cols());
  const int mtry =
      cfg.max_features > 0 ? std::min(cfg.max_features, dim) : std::max(1, static_cast<int>(std::sqrt(dim)));
  const int n = static_cast<int>(x.rows());

  forest.trees_.reserve(static_cast<std::size_t>(cfg.trees));
  for (int t = 0; t < cfg.trees; ++t) {
    const std::uint64_t tree_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(t));
    std::mt19937_64 rng(tree_seed);
    std::vector<int> rows(static_cast<std::size_t>(n));
    if (cfg.bootstrap) {
      std::uniform_int_distribution<int> pick(0, n - 1);
      for (int& r : rows) r = pick(rng);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    forest.trees_.push_back(DecisionTree::grow(x, y, static_cast<int>(forest.classes_.size()), std::move(rows), mtry,
                                               cfg.min_leaf, mix_seed(tree_seed, 1)));
  }
  return forest;
}

std::vector<int> RandomForest::predict(const DenseMatrix& x, std::size_t tree_limit) const {
  const std::size_t used = tree_limit == 0 ? trees_.size() : std::min(tree_limit, trees_.size());
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  std::vector<int> votes(classes_.size());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::fill(votes.begin(), votes.end(), 0);
    for (std::size_t t = 0; t < used; ++t) ++votes[trees_[t].predict(x.row(r))];
    out[r] = classes_[std::max_element(votes.begin(), votes.end()) - votes.begin()];
  }
  return out;
}

std::vector<std::size_t> RandomForest::correct_by_prefix(const DenseMatrix& x, std::span<const int> labels,
                                                         std::span<const int> tree_counts) const {
  std::vector<std::size_t> correct(tree_counts.size(), 0);
  std::vector<int> votes(classes_.size());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::fill(votes.begin(), votes.end(), 0);
    std::size_t done = 0;
    // tree_counts need not be sorted; walk trees once and sample at each cut.
    std::vector<std::pair<int, std::size_t>> cuts;
    for (std::size_t i = 0; i < tree_counts.size(); ++i) cuts.emplace_back(tree_counts[i], i);
    std::sort(cuts.begin(), cuts.end());
    for (const auto& [count, slot] : cuts) {
      const auto target = std::min<std::size_t>(static_cast<std::size_t>(count), trees_.size());
      for (; done < target; ++done) ++votes[trees_[done].predict(x.row(r))];
      const int predicted = classes_[std::max_element(votes.begin(), votes.end()) - votes.begin()];
      if (predicted == labels[r]) ++correct[slot];
    }
  }
  return correct;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size() || truth.empty()) throw ValidationError("accuracy needs equal nonempty spans");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace pwlr

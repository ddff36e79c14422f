#include "pwlr/evalkit.hpp"

#include "pwlr/errors.hpp"
#include "pwlr/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

namespace pwlr {

std::vector<int> stratified_fold_ids(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("need at least two folds");
  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(static_cast<int>(i));
  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), -1);
  int next = 0;
  for (auto& [cls, members] : by_class) {
    if (static_cast<int>(members.size()) < folds) {
      throw StratificationError("class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                                " samples, fewer than " + std::to_string(folds) + " folds");
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (int idx : members) {
      fold[idx] = next;
      next = (next + 1) % folds;
    }
  }
  return fold;
}

void CvOptions::validate() const {
  if (repeats < 1) throw ValidationError("repeats must be >= 1");
  if (folds < 2) throw ValidationError("folds must be >= 2");
  if (inner_folds < 2) throw ValidationError("inner folds must be >= 2");
  if (tree_counts.empty()) throw ValidationError("need at least one tree count");
  for (int t : tree_counts) {
    if (t < 1) throw ValidationError("tree counts must be >= 1");
  }
}

void CvReport::finalize() {
  std::vector<double> all;
  for (const auto& rep : fold_accuracies) all.insert(all.end(), rep.begin(), rep.end());
  if (all.empty()) {
    mean = std = 0.0;
    return;
  }
  mean = std::accumulate(all.begin(), all.end(), 0.0) / static_cast<double>(all.size());
  double var = 0.0;
  for (double a : all) var += (a - mean) * (a - mean);
  std = std::sqrt(var / static_cast<double>(all.size()));
}

namespace {

DenseMatrix take_rows(const DenseMatrix& x, const std::vector<int>& rows) { return x(rows, Eigen::all); }

std::vector<int> take(std::span<const int> v, const std::vector<int>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(v[r]);
  return out;
}

}  // namespace

CvReport cross_validate_grid(const EmbeddingGrid& grid, EmbeddingMode mode, const CvOptions& options) {
  options.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::vector<int>& labels = grid.graph_labels;
  std::vector<int> trees = options.tree_counts;
  std::sort(trees.begin(), trees.end());
  trees.erase(std::unique(trees.begin(), trees.end()), trees.end());
  const int max_trees = trees.back();

  std::vector<std::pair<int, int>> points;
  for (int k1 : grid.k1_values) {
    for (int k2 : grid.k2_values) points.emplace_back(k1, k2);
  }

  CvReport report;
  report.mode = std::string(to_string(mode));
  report.fold_accuracies.assign(static_cast<std::size_t>(options.repeats),
                                std::vector<double>(static_cast<std::size_t>(options.folds)));
  report.chosen.assign(static_cast<std::size_t>(options.repeats),
                       std::vector<GridChoice>(static_cast<std::size_t>(options.folds)));

  const auto total = static_cast<std::size_t>(options.repeats) * static_cast<std::size_t>(options.folds);
  std::vector<std::vector<int>> outer_ids;
  for (int r = 0; r < options.repeats; ++r) {
    outer_ids.push_back(stratified_fold_ids(labels, options.folds, mix_seed(options.seed, static_cast<std::uint64_t>(r))));
  }

  parallel_for(total, options.threads, [&](std::size_t job) {
    const int rep = static_cast<int>(job / static_cast<std::size_t>(options.folds));
    const int fold = static_cast<int>(job % static_cast<std::size_t>(options.folds));
    std::vector<int> train_rows;
    std::vector<int> test_rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (outer_ids[rep][i] == fold ? test_rows : train_rows).push_back(static_cast<int>(i));
    }
    const auto train_labels = take(labels, train_rows);
    const auto test_labels = take(labels, test_rows);
    const std::uint64_t fold_seed =
        mix_seed(mix_seed(options.seed, static_cast<std::uint64_t>(rep)), static_cast<std::uint64_t>(fold) + 1000);
    const auto inner_ids = stratified_fold_ids(train_labels, options.inner_folds, fold_seed);

    // Correct-prediction totals over the inner folds, per tree count.
    GridChoice best{};
    std::size_t best_correct = 0;
    bool have_best = false;
    for (const auto& [k1, k2] : points) {
      const DenseMatrix& x_all = grid.at(k1, k2, mode);
      const DenseMatrix x_train = take_rows(x_all, train_rows);
      std::vector<std::size_t> correct(trees.size(), 0);
      for (int inner = 0; inner < options.inner_folds; ++inner) {
        std::vector<int> fit_rows;
        std::vector<int> val_rows;
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
          (inner_ids[i] == inner ? val_rows : fit_rows).push_back(static_cast<int>(i));
        }
        ForestConfig fc = options.forest;
        fc.trees = max_trees;
        fc.seed = mix_seed(fold_seed, static_cast<std::uint64_t>(inner) + 1);
        const auto fit_labels = take(train_labels, fit_rows);
        const auto val_labels = take(train_labels, val_rows);
        const auto forest = RandomForest::train(take_rows(x_train, fit_rows), fit_labels, fc);
        const auto hits = forest.correct_by_prefix(take_rows(x_train, val_rows), val_labels, trees);
        for (std::size_t t = 0; t < trees.size(); ++t) correct[t] += hits[t];
      }
      for (std::size_t t = 0; t < trees.size(); ++t) {
        const GridChoice candidate{k1, k2, trees[t]};
        if (!have_best || correct[t] > best_correct || (correct[t] == best_correct && candidate < best)) {
          best = candidate;
          best_correct = correct[t];
          have_best = true;
        }
      }
    }

    const DenseMatrix& x_all = grid.at(best.k1, best.k2, mode);
    ForestConfig fc = options.forest;
    fc.trees = best.trees;
    fc.seed = mix_seed(fold_seed, 0);
    const auto forest = RandomForest::train(take_rows(x_all, train_rows), train_labels, fc);
    const auto predicted = forest.predict(take_rows(x_all, test_rows));
    report.fold_accuracies[rep][fold] = accuracy(predicted, test_labels);
    report.chosen[rep][fold] = best;
  });

  report.finalize();
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<CvReport> cross_validate(const GraphDataset& ds, const std::vector<EmbeddingMode>& modes,
                                     const PwlrConfig& base, const CvOptions& options) {
  options.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto grid = embed_dataset_grid(ds, base, options.k1_values, options.k2_values, modes, options.threads);
  const double embed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<CvReport> reports;
  for (EmbeddingMode mode : modes) {
    reports.push_back(cross_validate_grid(grid, mode, options));
    reports.back().runtime_seconds += embed_seconds / static_cast<double>(modes.size());
  }
  return reports;
}

double cross_validated_accuracy(const DenseMatrix& x, std::span<const int> labels, const ForestConfig& cfg, int folds,
                                std::uint64_t seed) {
  const auto ids = stratified_fold_ids(labels, folds, seed);
  std::size_t hit = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_rows;
    std::vector<int> test_rows;
    for (std::size_t i = 0; i < labels.size(); ++i) (ids[i] == f ? test_rows : train_rows).push_back(static_cast<int>(i));
    ForestConfig fc = cfg;
    fc.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(f));
    const auto forest = RandomForest::train(take_rows(x, train_rows), take(labels, train_rows), fc);
    const auto predicted = forest.predict(take_rows(x, test_rows));
    const auto truth = take(labels, test_rows);
    for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  }
  return static_cast<double>(hit) / static_cast<double>(labels.size());
}

}  // namespace pwlr

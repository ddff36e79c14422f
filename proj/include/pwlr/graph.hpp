#pragma once

#include <Eigen/Dense>

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace pwlr {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Edge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

/// Finite undirected graph without self-loops.
///
/// Edges are stored once each with u < v and kept in lexicographic (u, v)
/// order; that order is the canonical edge index used for tie-breaking
/// throughout the filtration.
struct Graph {
  int node_count = 0;
  std::vector<Edge> edges;
  std::optional<std::vector<int>> discrete_labels;
  /// node_count x attr_width; zero columns when the graph has no attributes.
  DenseMatrix continuous_attrs;
  /// Multi-column edge attributes, row-aligned with `edges`. Kept for
  /// round-tripping only; a single-column attribute becomes the weight.
  DenseMatrix edge_attrs;
  int graph_label = 0;

  Eigen::Index attr_width() const { return continuous_attrs.cols(); }

  /// Number of incident edges per node (the implicit self-loop excluded).
  std::vector<int> unweighted_degrees() const;
  /// Sum of incident edge weights per node.
  std::vector<double> weighted_degrees() const;
  /// Connected component id per node, numbered in order of first node.
  std::vector<int> component_ids() const;
  int component_count() const;

  /// Throws ValidationError on any broken invariant. Zero weights are only
  /// tolerated when `allow_zero_weights` is set (raw distance-weighted input).
  void validate(bool allow_zero_weights = false) const;

  /// Canonicalizes endpoint order, sorts and validates.
  static Graph from_edges(int node_count, std::vector<Edge> edges);
};

struct GraphDataset {
  std::string name;
  std::vector<Graph> graphs;
  /// Sorted union of discrete node labels over all graphs.
  std::vector<int> label_vocabulary;
  Eigen::Index attr_width = 0;
  /// Sorted set of graph classes.
  std::vector<int> class_labels;
  /// Non-fatal notes produced while loading (e.g. asymmetric edge rows).
  std::vector<std::string> warnings;

  bool has_discrete_labels() const;

  /// Recomputes label_vocabulary, class_labels and attr_width from graphs.
  void refresh_metadata();
};

}  // namespace pwlr

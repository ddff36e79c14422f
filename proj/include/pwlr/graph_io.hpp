#pragma once

#include "pwlr/features.hpp"
#include "pwlr/graph.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pwlr {

/// Loads a dataset in the TU Dortmund text layout from `root`.
///
/// Requires `{name}_A.txt` and `{name}_graph_indicator.txt`; graph labels,
/// node labels, node attributes and edge attributes are read when present.
/// Global 1-indexed node ids become per-graph 0-indexed ids in order of
/// appearance. Both directions of an edge collapse into one undirected edge;
/// when the two rows carry different attributes the first one wins and a
/// warning is recorded in GraphDataset::warnings.
GraphDataset parse_tu_dataset(const std::filesystem::path& root, const std::string& name);

/// Writes `ds` in the same layout (both edge directions, 17 significant
/// digits), so that parse_tu_dataset(root, ds.name) reproduces it.
void write_tu_dataset(const GraphDataset& ds, const std::filesystem::path& root);

/// One-hot discrete labels over `vocabulary`, raw continuous attributes, or
/// [one-hot | attributes]. Rows follow node order.
FeatureMatrix encode_graph_features(const Graph& g, const std::vector<int>& vocabulary,
                                    FeatureMode mode);

std::vector<FeatureMatrix> encode_features(const GraphDataset& ds, FeatureMode mode);

/// Drops zero-weight edges and replaces the remaining weights by their
/// reciprocals (bond distances become affinities).
Graph preprocess_md(const Graph& g);

}  // namespace pwlr

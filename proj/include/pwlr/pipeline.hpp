#pragma once

#include "pwlr/diffusion.hpp"
#include "pwlr/features.hpp"
#include "pwlr/filtration.hpp"
#include "pwlr/graph.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pwlr {

enum class EmbeddingMode { H0, H1, H0H1, OptH0, OptH1, OptH0H1 };

EmbeddingMode parse_embedding_mode(std::string_view text);
std::string_view to_string(EmbeddingMode mode);
bool is_reduced(EmbeddingMode mode);

struct PwlrConfig {
  int k1 = 0;
  int k2 = 0;
  double p = 1.0;
  double tau = 1.0;
  EmbeddingMode mode = EmbeddingMode::H0;
  FeatureMode feature_mode = FeatureMode::Discrete;
  bool md_preprocess = false;
  /// Upper bound on k1 and k2 (grid 0..29 by default).
  int max_iterations = 29;

  void validate() const;
};

/// Everything computed for one graph at one (k1, k2).
struct GraphEmbedding {
  /// (M^k1 X)^T M^k2, feature-major.
  FeatureMatrix features;
  std::vector<double> heights;
  PersistenceSummary summary;
  PhiVectors sorted;
  /// The graph's own sorted degree tuples and the reduced vectors over them.
  std::vector<DegreeTuple> local_vocab;
  PhiVectors reduced;
};

/// Applies the md preprocessing when cfg.md_preprocess is set.
GraphEmbedding embed_graph(const Graph& g, const FeatureMatrix& x, const PwlrConfig& cfg);

/// Sorted union of edge degree tuples across the dataset.
std::vector<DegreeTuple> build_degree_vocab(const GraphDataset& ds);

/// Copy of `ds` with the configured preprocessing applied.
GraphDataset prepare_dataset(const GraphDataset& ds, const PwlrConfig& cfg);

/// Dataset-wide lengths of the padded sorted blocks: the largest number of
/// merge (resp. cycle) events of any graph. They depend on structure only.
std::pair<std::size_t, std::size_t> padded_lengths(const GraphDataset& ds);

struct DatasetEmbedding {
  PwlrConfig config;
  /// One row per graph, in dataset order.
  DenseMatrix vectors;
  std::vector<int> graph_labels;
  std::vector<DegreeTuple> vocab;
  std::size_t pad_len_h0 = 0;
  std::size_t pad_len_h1 = 0;

  std::vector<std::string> column_names() const;
};

/// Width of a vector in `mode` given the dataset-wide sizes.
std::size_t embedding_dimension(EmbeddingMode mode, std::size_t vocab_size, std::size_t pad_h0, std::size_t pad_h1);

/// Lays out one graph's vector for `mode`: sorted blocks are right-padded with
/// zeros, reduced blocks use `vocab`, "+H1" modes concatenate H0 then H1.
std::vector<double> assemble_vector(EmbeddingMode mode, const PhiVectors& sorted, const PhiVectors& reduced,
                                    std::size_t pad_h0, std::size_t pad_h1);

DatasetEmbedding embed_dataset(const GraphDataset& ds, const PwlrConfig& cfg, int threads = 1);

/// Feature matrices for every (k1, k2) in the grid and every mode. Each graph
/// is propagated incrementally, so the whole grid costs one pass of
/// max(k1) + max(k1)*max(k2) sparse products per graph.
struct EmbeddingGrid {
  std::vector<int> k1_values;
  std::vector<int> k2_values;
  std::vector<EmbeddingMode> modes;
  std::vector<int> graph_labels;
  /// (k1, k2) -> one matrix per entry of `modes`.
  std::map<std::pair<int, int>, std::vector<DenseMatrix>> features;

  const DenseMatrix& at(int k1, int k2, EmbeddingMode mode) const;
};

EmbeddingGrid embed_dataset_grid(const GraphDataset& ds, const PwlrConfig& base, const std::vector<int>& k1_values,
                                 const std::vector<int>& k2_values, const std::vector<EmbeddingMode>& modes,
                                 int threads = 1);

struct StabilityReport {
  double epsilon = 0.0;
  /// Per trial: |phi_H0(G) - phi_H0(G')|_1, entrywise |M_G - M_G'|_1, their ratio.
  std::vector<double> embedding_distances;
  std::vector<double> matrix_distances;
  std::vector<double> ratios;
  double median_embedding_distance = 0.0;
  double mu2 = 0.0;
  /// mu2^k for k = 0..cfg.k2.
  std::vector<double> mu2_decay;
};

/// Perturbs every edge weight by an independent factor in [1 - eps, 1 + eps]
/// and compares the H0 sorted vectors. Features are the graph's own encoding
/// under cfg.feature_mode. Requires a connected graph.
StabilityReport stability_probe(const Graph& g, const PwlrConfig& cfg, double epsilon, int trials, std::uint64_t seed);

double median(std::vector<double> values);

}  // namespace pwlr

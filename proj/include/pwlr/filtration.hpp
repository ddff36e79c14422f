#pragma once

#include "pwlr/features.hpp"
#include "pwlr/graph.hpp"

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pwlr {

/// Sorted pair of unweighted endpoint degrees of an edge.
struct DegreeTuple {
  int low = 0;
  int high = 0;
  auto operator<=>(const DegreeTuple&) const = default;
};

std::string to_string(const DegreeTuple& t);

/// Degree tuple of every edge, in edge order.
std::vector<DegreeTuple> edge_degree_tuples(const Graph& g);

/// Union-find with path halving and union by size.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n);

  std::size_t find(std::size_t x);
  /// Returns false if x and y were already in the same set.
  bool unite(std::size_t x, std::size_t y);
  std::size_t set_count() const { return sets_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::size_t sets_;
};

enum class EventKind { Merge, Cycle };

struct PersistenceEvent {
  std::size_t edge = 0;  ///< canonical edge index
  double height = 0.0;
  EventKind kind = EventKind::Merge;
  DegreeTuple degrees;
};

struct PersistenceSummary {
  int node_count = 0;
  /// One event per edge, by nondecreasing height then edge index.
  std::vector<PersistenceEvent> events;
  int beta0_final = 0;
  int beta1_final = 0;

  std::size_t merge_count() const;
  std::size_t cycle_count() const;
};

/// Betti numbers of the prefix subgraph G^[i] (all nodes, first i events).
struct BettiPrefix {
  std::size_t edges = 0;
  double height = 0.0;
  int beta0 = 0;
  int beta1 = 0;
};
std::vector<BettiPrefix> betti_prefixes(const PersistenceSummary& summary);

/// h(u, v) = |X(u) - X(v)|_p per edge. p may be +infinity.
std::vector<double> edge_heights(const Graph& g, const FeatureMatrix& features, double p);

PersistenceSummary persistence_run(const Graph& g, std::span<const double> heights);

struct PhiVectors {
  std::vector<double> h0;
  std::vector<double> h1;
};

/// Sorted (height + tau) over merge events and over cycle events.
PhiVectors phi_sorted(const PersistenceSummary& summary, double tau);

/// Sum of (height + tau) binned by degree tuple, coordinates in `vocab`
/// order. Throws VocabularyError if an event's tuple is not in `vocab`.
PhiVectors phi_reduced(const PersistenceSummary& summary, double tau, std::span<const DegreeTuple> vocab);

}  // namespace pwlr

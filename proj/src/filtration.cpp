#include "pwlr/filtration.hpp"

#include "pwlr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pwlr {

std::string to_string(const DegreeTuple& t) {
  return "(" + std::to_string(t.low) + "," + std::to_string(t.high) + ")";
}

std::vector<DegreeTuple> edge_degree_tuples(const Graph& g) {
  const auto deg = g.unweighted_degrees();
  std::vector<DegreeTuple> out;
  out.reserve(g.edges.size());
  for (const Edge& e : g.edges) {
    out.push_back({std::min(deg[e.u], deg[e.v]), std::max(deg[e.u], deg[e.v])});
  }
  return out;
}

DisjointSet::DisjointSet(std::size_t n) : parent_(n), size_(n, 1), sets_(n) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSet::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSet::unite(std::size_t x, std::size_t y) {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (size_[x] < size_[y]) std::swap(x, y);
  parent_[y] = x;
  size_[x] += size_[y];
  --sets_;
  return true;
}

std::size_t PersistenceSummary::merge_count() const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [](const auto& e) { return e.kind == EventKind::Merge; }));
}

std::size_t PersistenceSummary::cycle_count() const { return events.size() - merge_count(); }

std::vector<BettiPrefix> betti_prefixes(const PersistenceSummary& summary) {
  std::vector<BettiPrefix> out;
  out.reserve(summary.events.size() + 1);
  BettiPrefix cur{0, 0.0, summary.node_count, 0};
  out.push_back(cur);
  for (const auto& ev : summary.events) {
    ++cur.edges;
    cur.height = ev.height;
    if (ev.kind == EventKind::Merge) {
      --cur.beta0;
    } else {
      ++cur.beta1;
    }
    out.push_back(cur);
  }
  return out;
}

std::vector<double> edge_heights(const Graph& g, const FeatureMatrix& features, double p) {
  if (!(p >= 1.0)) throw ValidationError("norm order p must be >= 1");
  if (features.node_count() != g.node_count) throw ValidationError("feature node count differs from graph");

  const DenseMatrix x = features.orientation == Orientation::NodeMajor ? features.values
                                                                       : DenseMatrix(features.values.transpose());
  std::vector<double> h;
  h.reserve(g.edges.size());
  for (const Edge& e : g.edges) {
    const auto diff = (x.row(e.u) - x.row(e.v)).array().abs();
    if (p == 1.0) {
      h.push_back(diff.sum());
    } else if (p == 2.0) {
      h.push_back(std::sqrt(diff.square().sum()));
    } else if (std::isinf(p)) {
      h.push_back(diff.size() ? diff.maxCoeff() : 0.0);
    } else {
      h.push_back(std::pow(diff.pow(p).sum(), 1.0 / p));
    }
  }
  return h;
}

PersistenceSummary persistence_run(const Graph& g, std::span<const double> heights) {
  if (heights.size() != g.edges.size()) throw ValidationError("need exactly one height per edge");
  for (double h : heights) {
    if (std::isnan(h)) throw ValidationError("edge height is NaN");
  }

  std::vector<std::size_t> order(g.edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return heights[a] < heights[b]; });

  const auto tuples = edge_degree_tuples(g);
  PersistenceSummary s;
  s.node_count = g.node_count;
  s.events.reserve(order.size());
  DisjointSet uf(static_cast<std::size_t>(g.node_count));
  int cycles = 0;
  for (std::size_t idx : order) {
    const Edge& e = g.edges[idx];
    const bool merged = uf.unite(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v));
    if (!merged) ++cycles;
    s.events.push_back({idx, heights[idx], merged ? EventKind::Merge : EventKind::Cycle, tuples[idx]});
  }
  s.beta0_final = static_cast<int>(uf.set_count());
  s.beta1_final = cycles;
  return s;
}

PhiVectors phi_sorted(const PersistenceSummary& summary, double tau) {
  PhiVectors out;
  for (const auto& ev : summary.events) {
    (ev.kind == EventKind::Merge ? out.h0 : out.h1).push_back(ev.height + tau);
  }
  std::sort(out.h0.begin(), out.h0.end());
  std::sort(out.h1.begin(), out.h1.end());
  return out;
}

PhiVectors phi_reduced(const PersistenceSummary& summary, double tau, std::span<const DegreeTuple> vocab) {
  PhiVectors out{std::vector<double>(vocab.size(), 0.0), std::vector<double>(vocab.size(), 0.0)};
  for (const auto& ev : summary.events) {
    auto it = std::find(vocab.begin(), vocab.end(), ev.degrees);
    if (it == vocab.end()) {
      throw VocabularyError("degree tuple " + to_string(ev.degrees) + " missing from vocabulary");
    }
    auto& target = ev.kind == EventKind::Merge ? out.h0 : out.h1;
    target[static_cast<std::size_t>(it - vocab.begin())] += ev.height + tau;
  }
  return out;
}

}  // namespace pwlr

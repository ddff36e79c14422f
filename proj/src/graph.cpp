#include "pwlr/graph.hpp"

#include "pwlr/errors.hpp"
#include "pwlr/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

namespace pwlr {

std::vector<int> Graph::unweighted_degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(node_count), 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

std::vector<double> Graph::weighted_degrees() const {
  std::vector<double> deg(static_cast<std::size_t>(node_count), 0.0);
  for (const Edge& e : edges) {
    deg[e.u] += e.weight;
    deg[e.v] += e.weight;
  }
  return deg;
}

std::vector<int> Graph::component_ids() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(node_count));
  for (const Edge& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<int> comp(static_cast<std::size_t>(node_count), -1);
  std::vector<int> stack;
  int next = 0;
  for (int s = 0; s < node_count; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : adj[x]) {
        if (comp[y] < 0) {
          comp[y] = next;
          stack.push_back(y);
        }
      }
    }
    ++next;
  }
  return comp;
}

int Graph::component_count() const {
  auto comp = component_ids();
  return comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
}

void Graph::validate(bool allow_zero_weights) const {
  if (node_count < 0) throw ValidationError("negative node count");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.u == e.v) throw ValidationError("self-loop on node " + std::to_string(e.u));
    if (e.u > e.v) throw ValidationError("edge endpoints not canonical (u < v)");
    if (e.u < 0 || e.v >= node_count) throw ValidationError("edge endpoint out of range");
    if (!std::isfinite(e.weight) || e.weight < 0.0 || (!allow_zero_weights && e.weight == 0.0)) {
      throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") has non-positive weight");
    }
    if (i > 0) {
      const Edge& p = edges[i - 1];
      if (std::tie(p.u, p.v) >= std::tie(e.u, e.v)) {
        throw ValidationError("edges not in canonical order or duplicated");
      }
    }
  }
  if (discrete_labels && discrete_labels->size() != static_cast<std::size_t>(node_count)) {
    throw ValidationError("discrete label count differs from node count");
  }
  if (continuous_attrs.cols() > 0 && continuous_attrs.rows() != node_count) {
    throw ValidationError("continuous attribute rows differ from node count");
  }
  if (edge_attrs.cols() > 0 && edge_attrs.rows() != static_cast<Eigen::Index>(edges.size())) {
    throw ValidationError("edge attribute rows differ from edge count");
  }
}

Graph Graph::from_edges(int node_count, std::vector<Edge> edges) {
  for (Edge& e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  Graph g;
  g.node_count = node_count;
  g.edges = std::move(edges);
  g.validate();
  return g;
}

bool GraphDataset::has_discrete_labels() const {
  return !graphs.empty() &&
         std::all_of(graphs.begin(), graphs.end(), [](const Graph& g) { return g.discrete_labels.has_value(); });
}

void GraphDataset::refresh_metadata() {
  std::set<int> labels;
  std::set<int> classes;
  attr_width = 0;
  for (const Graph& g : graphs) {
    if (g.node_count > 0) {
      attr_width = g.attr_width();
      break;
    }
  }
  for (const Graph& g : graphs) {
    if (g.discrete_labels) labels.insert(g.discrete_labels->begin(), g.discrete_labels->end());
    classes.insert(g.graph_label);
    if (g.attr_width() != attr_width && g.node_count > 0) {
      throw ValidationError("inconsistent continuous attribute width across graphs");
    }
  }
  label_vocabulary.assign(labels.begin(), labels.end());
  class_labels.assign(classes.begin(), classes.end());
}

FeatureMode parse_feature_mode(std::string_view text) {
  if (text == "discrete") return FeatureMode::Discrete;
  if (text == "continuous") return FeatureMode::Continuous;
  if (text == "both") return FeatureMode::Both;
  throw ValidationError("unknown feature mode '" + std::string(text) + "'");
}

std::string_view to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::Discrete: return "discrete";
    case FeatureMode::Continuous: return "continuous";
    case FeatureMode::Both: return "both";
  }
  return "?";
}

}  // namespace pwlr

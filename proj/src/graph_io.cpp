#include "pwlr/graph_io.hpp"

#include "pwlr/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <utility>

namespace pwlr {
namespace {

namespace fs = std::filesystem;

struct TextFile {
  std::string path;
  std::vector<std::string> lines;
};

TextFile read_lines(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  TextFile tf{file.string(), {}};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tf.lines.push_back(std::move(line));
  }
  // Trailing blank lines are common in the published archives.
  while (!tf.lines.empty() && tf.lines.back().find_first_not_of(" \t") == std::string::npos) {
    tf.lines.pop_back();
  }
  return tf;
}

std::optional<TextFile> read_optional(const fs::path& file) {
  if (!fs::exists(file)) return std::nullopt;
  return read_lines(file);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

long long parse_int(std::string_view field, const TextFile& tf, std::size_t line_no) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(tf.path, line_no, "expected integer, got '" + std::string(field) + "'");
  }
  return value;
}

double parse_real(std::string_view field, const TextFile& tf, std::size_t line_no) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(tf.path, line_no, "expected real number, got '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::vector<double>> parse_real_rows(const TextFile& tf) {
  std::vector<std::vector<double>> rows;
  rows.reserve(tf.lines.size());
  std::size_t width = 0;
  for (std::size_t i = 0; i < tf.lines.size(); ++i) {
    std::vector<double> row;
    for (auto field : split_fields(tf.lines[i])) row.push_back(parse_real(field, tf, i + 1));
    if (i == 0) width = row.size();
    if (row.size() != width) {
      throw ValidationError(tf.path + ":" + std::to_string(i + 1) + ": attribute width " +
                            std::to_string(row.size()) + " differs from " + std::to_string(width));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void expect_line_count(const TextFile& tf, std::size_t expected, const char* what) {
  if (tf.lines.size() != expected) {
    throw ParseError(tf.path, std::min(tf.lines.size(), expected) + 1,
                     "expected " + std::to_string(expected) + " lines (one per " + what + "), found " +
                         std::to_string(tf.lines.size()));
  }
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

GraphDataset parse_tu_dataset(const fs::path& root, const std::string& name) {
  const fs::path a_file = root / (name + "_A.txt");
  const fs::path indicator_file = root / (name + "_graph_indicator.txt");
  if (!fs::exists(a_file)) throw IoError("missing mandatory file " + a_file.string());
  if (!fs::exists(indicator_file)) throw IoError("missing mandatory file " + indicator_file.string());

  const TextFile indicator = read_lines(indicator_file);
  const std::size_t n = indicator.lines.size();

  // Global node id (0-based) -> (graph index, local index).
  std::vector<int> node_graph(n);
  std::vector<int> node_local(n);
  std::vector<int> graph_sizes;
  for (std::size_t i = 0; i < n; ++i) {
    const long long gid = parse_int(trim(indicator.lines[i]), indicator, i + 1);
    if (gid < 1) throw ParseError(indicator.path, i + 1, "graph id must be >= 1");
    if (static_cast<std::size_t>(gid) > graph_sizes.size()) graph_sizes.resize(static_cast<std::size_t>(gid), 0);
    node_graph[i] = static_cast<int>(gid - 1);
    node_local[i] = graph_sizes[gid - 1]++;
  }
  for (std::size_t gi = 0; gi < graph_sizes.size(); ++gi) {
    if (graph_sizes[gi] == 0) {
      throw ParseError(indicator.path, n, "graph id " + std::to_string(gi + 1) + " has no nodes");
    }
  }

  GraphDataset ds;
  ds.name = name;
  ds.graphs.resize(graph_sizes.size());
  for (std::size_t gi = 0; gi < graph_sizes.size(); ++gi) ds.graphs[gi].node_count = graph_sizes[gi];

  if (auto labels = read_optional(root / (name + "_graph_labels.txt"))) {
    expect_line_count(*labels, ds.graphs.size(), "graph");
    for (std::size_t gi = 0; gi < ds.graphs.size(); ++gi) {
      ds.graphs[gi].graph_label = static_cast<int>(parse_int(trim(labels->lines[gi]), *labels, gi + 1));
    }
  }

  if (auto node_labels = read_optional(root / (name + "_node_labels.txt"))) {
    expect_line_count(*node_labels, n, "node");
    for (Graph& g : ds.graphs) g.discrete_labels.emplace(static_cast<std::size_t>(g.node_count), 0);
    for (std::size_t i = 0; i < n; ++i) {
      // Multi-column label files keep the first column.
      const auto fields = split_fields(node_labels->lines[i]);
      (*ds.graphs[node_graph[i]].discrete_labels)[node_local[i]] =
          static_cast<int>(parse_int(fields.front(), *node_labels, i + 1));
    }
  }

  if (auto attrs = read_optional(root / (name + "_node_attributes.txt"))) {
    expect_line_count(*attrs, n, "node");
    const auto rows = parse_real_rows(*attrs);
    const auto width = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
    for (Graph& g : ds.graphs) g.continuous_attrs = DenseMatrix::Zero(g.node_count, width);
    for (std::size_t i = 0; i < n; ++i) {
      for (Eigen::Index c = 0; c < width; ++c) {
        ds.graphs[node_graph[i]].continuous_attrs(node_local[i], c) = rows[i][c];
      }
    }
  }

  const TextFile adjacency = read_lines(a_file);
  std::optional<std::vector<std::vector<double>>> edge_rows;
  if (auto edge_attrs = read_optional(root / (name + "_edge_attributes.txt"))) {
    expect_line_count(*edge_attrs, adjacency.lines.size(), "adjacency row");
    edge_rows = parse_real_rows(*edge_attrs);
  }
  const std::size_t edge_width = edge_rows && !edge_rows->empty() ? edge_rows->front().size() : 0;

  // Per graph: canonical (u, v) -> attribute row of first occurrence.
  std::vector<std::map<std::pair<int, int>, std::size_t>> seen(ds.graphs.size());
  for (std::size_t line = 0; line < adjacency.lines.size(); ++line) {
    const auto fields = split_fields(adjacency.lines[line]);
    if (fields.size() != 2) throw ParseError(adjacency.path, line + 1, "expected 'i, j'");
    const long long i = parse_int(fields[0], adjacency, line + 1);
    const long long j = parse_int(fields[1], adjacency, line + 1);
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n) {
      throw ParseError(adjacency.path, line + 1, "node id out of range 1.." + std::to_string(n));
    }
    if (i == j) throw ParseError(adjacency.path, line + 1, "self-loop on node " + std::to_string(i));
    const int gi = node_graph[i - 1];
    if (node_graph[j - 1] != gi) throw ParseError(adjacency.path, line + 1, "edge joins two different graphs");
    int u = node_local[i - 1];
    int v = node_local[j - 1];
    if (u > v) std::swap(u, v);
    auto [it, inserted] = seen[gi].try_emplace({u, v}, line);
    if (!inserted && edge_rows && (*edge_rows)[it->second] != (*edge_rows)[line]) {
      ds.warnings.push_back(adjacency.path + ":" + std::to_string(line + 1) +
                            ": edge attributes differ from the reverse row; keeping line " +
                            std::to_string(it->second + 1));
    }
  }

  for (std::size_t gi = 0; gi < ds.graphs.size(); ++gi) {
    Graph& g = ds.graphs[gi];
    g.edges.reserve(seen[gi].size());
    if (edge_width > 1) g.edge_attrs = DenseMatrix::Zero(static_cast<Eigen::Index>(seen[gi].size()), edge_width);
    Eigen::Index row = 0;
    for (const auto& [key, source_line] : seen[gi]) {
      Edge e{key.first, key.second, 1.0};
      if (edge_width == 1) {
        e.weight = (*edge_rows)[source_line][0];
        if (e.weight < 0.0) throw ParseError(adjacency.path, source_line + 1, "negative edge weight");
      } else if (edge_width > 1) {
        for (std::size_t c = 0; c < edge_width; ++c) g.edge_attrs(row, c) = (*edge_rows)[source_line][c];
      }
      g.edges.push_back(e);
      ++row;
    }
    g.validate(/*allow_zero_weights=*/true);
  }

  ds.refresh_metadata();
  return ds;
}

void write_tu_dataset(const GraphDataset& ds, const fs::path& root) {
  fs::create_directories(root);
  auto open = [&](const std::string& suffix) {
    std::ofstream out(root / (ds.name + suffix));
    if (!out) throw IoError("cannot write " + (root / (ds.name + suffix)).string());
    return out;
  };

  const bool any_weight = std::any_of(ds.graphs.begin(), ds.graphs.end(), [](const Graph& g) {
    return std::any_of(g.edges.begin(), g.edges.end(), [](const Edge& e) { return e.weight != 1.0; });
  });
  const bool any_edge_attrs =
      std::any_of(ds.graphs.begin(), ds.graphs.end(), [](const Graph& g) { return g.edge_attrs.cols() > 0; });
  if (any_weight && any_edge_attrs) {
    throw ValidationError("cannot serialize both scalar weights and multi-column edge attributes");
  }

  auto a_out = open("_A.txt");
  auto indicator_out = open("_graph_indicator.txt");
  auto labels_out = open("_graph_labels.txt");
  std::ofstream edge_out;
  if (any_weight || any_edge_attrs) edge_out = open("_edge_attributes.txt");
  std::ofstream node_label_out;
  if (ds.has_discrete_labels()) node_label_out = open("_node_labels.txt");
  std::ofstream attr_out;
  if (ds.attr_width > 0) attr_out = open("_node_attributes.txt");

  long long offset = 0;
  for (std::size_t gi = 0; gi < ds.graphs.size(); ++gi) {
    const Graph& g = ds.graphs[gi];
    labels_out << g.graph_label << '\n';
    for (int v = 0; v < g.node_count; ++v) {
      indicator_out << gi + 1 << '\n';
      if (node_label_out.is_open()) node_label_out << (*g.discrete_labels)[v] << '\n';
      if (attr_out.is_open()) {
        for (Eigen::Index c = 0; c < g.attr_width(); ++c) {
          attr_out << (c ? ", " : "") << format_real(g.continuous_attrs(v, c));
        }
        attr_out << '\n';
      }
    }
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
      const Edge& e = g.edges[ei];
      std::string attr_line;
      if (any_weight) {
        attr_line = format_real(e.weight);
      } else if (any_edge_attrs) {
        for (Eigen::Index c = 0; c < g.edge_attrs.cols(); ++c) {
          attr_line += (c ? ", " : "") + format_real(g.edge_attrs(static_cast<Eigen::Index>(ei), c));
        }
      }
      a_out << offset + e.u + 1 << ", " << offset + e.v + 1 << '\n';
      a_out << offset + e.v + 1 << ", " << offset + e.u + 1 << '\n';
      if (edge_out.is_open()) edge_out << attr_line << '\n' << attr_line << '\n';
    }
    offset += g.node_count;
  }
}

FeatureMatrix encode_graph_features(const Graph& g, const std::vector<int>& vocabulary, FeatureMode mode) {
  const bool want_discrete = mode != FeatureMode::Continuous;
  const bool want_continuous = mode != FeatureMode::Discrete;
  if (want_discrete && !g.discrete_labels) throw ValidationError("graph has no discrete node labels");
  if (want_continuous && g.attr_width() == 0) throw ValidationError("graph has no continuous node attributes");

  const Eigen::Index one_hot = want_discrete ? static_cast<Eigen::Index>(vocabulary.size()) : 0;
  const Eigen::Index width = one_hot + (want_continuous ? g.attr_width() : 0);
  FeatureMatrix x{DenseMatrix::Zero(g.node_count, width), Orientation::NodeMajor};
  if (want_discrete) {
    for (int v = 0; v < g.node_count; ++v) {
      const int label = (*g.discrete_labels)[v];
      auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), label);
      if (it == vocabulary.end() || *it != label) {
        throw ValidationError("node label " + std::to_string(label) + " missing from vocabulary");
      }
      x.values(v, it - vocabulary.begin()) = 1.0;
    }
  }
  if (want_continuous) x.values.rightCols(g.attr_width()) = g.continuous_attrs;
  return x;
}

std::vector<FeatureMatrix> encode_features(const GraphDataset& ds, FeatureMode mode) {
  if (mode != FeatureMode::Continuous && !ds.has_discrete_labels()) {
    throw ValidationError("dataset '" + ds.name + "' has no discrete node labels");
  }
  if (mode != FeatureMode::Discrete && ds.attr_width == 0) {
    throw ValidationError("dataset '" + ds.name + "' has no continuous node attributes");
  }
  std::vector<FeatureMatrix> out;
  out.reserve(ds.graphs.size());
  for (const Graph& g : ds.graphs) out.push_back(encode_graph_features(g, ds.label_vocabulary, mode));
  return out;
}

Graph preprocess_md(const Graph& g) {
  Graph out = g;
  out.edges.clear();
  std::vector<Eigen::Index> kept_rows;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const Edge& e = g.edges[i];
    if (e.weight == 0.0) continue;
    out.edges.push_back({e.u, e.v, 1.0 / e.weight});
    kept_rows.push_back(static_cast<Eigen::Index>(i));
  }
  if (g.edge_attrs.cols() > 0) {
    out.edge_attrs = g.edge_attrs(kept_rows, Eigen::all);
  }
  return out;
}

}  // namespace pwlr

#include "pwlr/embedding_io.hpp"

#include "pwlr/errors.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace pwlr {

EmbeddingTable to_table(const DatasetEmbedding& emb) {
  EmbeddingTable t;
  t.columns = emb.column_names();
  t.labels = emb.graph_labels;
  t.values = emb.vectors;
  t.ids.resize(t.labels.size());
  for (std::size_t i = 0; i < t.ids.size(); ++i) t.ids[i] = static_cast<int>(i);
  return t;
}

void write_embedding_csv(std::ostream& out, const EmbeddingTable& table, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "id,label";
  for (const auto& c : table.columns) out << ',' << c;
  out << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    out << table.ids[r] << ',' << table.labels[r];
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", table.values(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

EmbeddingTable read_embedding_csv(std::istream& in) {
  EmbeddingTable t;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (!header) {
      if (fields.size() < 2 || fields[0] != "id" || fields[1] != "label") {
        throw ParseError("<csv>", line_no, "expected header starting with id,label");
      }
      t.columns.assign(fields.begin() + 2, fields.end());
      header = true;
      continue;
    }
    if (fields.size() != t.columns.size() + 2) throw ParseError("<csv>", line_no, "wrong field count");
    t.ids.push_back(std::stoi(fields[0]));
    t.labels.push_back(std::stoi(fields[1]));
    std::vector<double> row;
    for (std::size_t i = 2; i < fields.size(); ++i) {
      double v = 0.0;
      const auto& f = fields[i];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) throw ParseError("<csv>", line_no, "bad number '" + f + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) t.values(r, c) = rows[r][c];
  }
  return t;
}

void write_embedding_json(std::ostream& out, const EmbeddingTable& table) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    std::vector<double> v(table.values.row(r).begin(), table.values.row(r).end());
    arr.push_back({{"id", table.ids[r]}, {"label", table.labels[r]}, {"vector", v}});
  }
  out << arr.dump() << '\n';
}

EmbeddingTable read_embedding_json(std::istream& in) {
  const auto arr = nlohmann::json::parse(in);
  if (!arr.is_array()) throw ValidationError("embedding JSON must be an array");
  EmbeddingTable t;
  std::size_t width = 0;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& item = arr[i];
    const auto v = item.at("vector").get<std::vector<double>>();
    if (i == 0) width = v.size();
    if (v.size() != width) throw ValidationError("embedding vectors differ in length");
    t.ids.push_back(item.at("id").get<int>());
    t.labels.push_back(item.at("label").get<int>());
    t.values.conservativeResize(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(width));
    for (std::size_t c = 0; c < width; ++c) t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v[c];
  }
  for (std::size_t c = 0; c < width; ++c) t.columns.push_back("c" + std::to_string(c));
  return t;
}

}  // namespace pwlr

#pragma once

#include "pwlr/pipeline.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pwlr {

/// Flat table of per-graph vectors as written by the CLI.
struct EmbeddingTable {
  std::vector<std::string> columns;  ///< vector coordinates only
  std::vector<int> ids;
  std::vector<int> labels;
  DenseMatrix values;
};

EmbeddingTable to_table(const DatasetEmbedding& emb);

/// Header row `id,label,<columns>` then one row per graph; reals use 17
/// significant digits. Lines starting with '#' precede the header.
void write_embedding_csv(std::ostream& out, const EmbeddingTable& table, const std::string& comment = {});
EmbeddingTable read_embedding_csv(std::istream& in);

/// JSON array of {"id", "label", "vector"}.
void write_embedding_json(std::ostream& out, const EmbeddingTable& table);
EmbeddingTable read_embedding_json(std::istream& in);

}  // namespace pwlr

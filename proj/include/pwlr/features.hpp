#pragma once

#include "pwlr/graph.hpp"

#include <string_view>

namespace pwlr {

enum class Orientation { NodeMajor, FeatureMajor };

/// Dense node features. Node-major is |V| x l (rows are nodes); after the
/// random-walk transposition the matrix is feature-major, l x |V|.
struct FeatureMatrix {
  DenseMatrix values;
  Orientation orientation = Orientation::NodeMajor;

  Eigen::Index node_count() const {
    return orientation == Orientation::NodeMajor ? values.rows() : values.cols();
  }
  Eigen::Index feature_count() const {
    return orientation == Orientation::NodeMajor ? values.cols() : values.rows();
  }
  FeatureMatrix transposed() const {
    return {values.transpose(),
            orientation == Orientation::NodeMajor ? Orientation::FeatureMajor : Orientation::NodeMajor};
  }
  /// Feature vector of node v regardless of orientation.
  Eigen::VectorXd node_vector(Eigen::Index v) const {
    if (orientation == Orientation::NodeMajor) return values.row(v).transpose();
    return values.col(v);
  }
};

enum class FeatureMode { Discrete, Continuous, Both };

FeatureMode parse_feature_mode(std::string_view text);
std::string_view to_string(FeatureMode mode);

}  // namespace pwlr

#pragma once

#include "pwlr/features.hpp"
#include "pwlr/graph.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <span>
#include <vector>

namespace pwlr {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Row-stochastic lazy random-walk matrix (D + I)^-1 (A + I).
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  TransitionMatrix(SparseMatrix matrix, std::vector<double> weighted_degrees, std::vector<int> component_ids);

  Eigen::Index dim() const { return matrix_.rows(); }
  const SparseMatrix& matrix() const { return matrix_; }
  /// d_v = sum of incident weights, without the self-loop term.
  const std::vector<double>& weighted_degrees() const { return degrees_; }
  const std::vector<int>& component_ids() const { return components_; }
  int component_count() const { return component_count_; }
  bool connected() const { return component_count_ <= 1; }

  DenseMatrix dense() const { return DenseMatrix(matrix_); }

 private:
  SparseMatrix matrix_;
  std::vector<double> degrees_;
  std::vector<int> components_;
  int component_count_ = 0;
};

TransitionMatrix build_transition_matrix(const Graph& g);

/// M^k1 X by k1 sparse products. X must be node-major.
FeatureMatrix wl_propagate(const TransitionMatrix& m, const FeatureMatrix& x, int k1);

/// One normalized WL relabelling computed directly from the graph:
///   L'(v) = sum_{w in N[v]} a~_vw L(w) / sum_{w in N[v]} a~_vw |L(w)|_1,  a~_vv = 1.
/// `labels` is |V| x l and must be nonnegative.
DenseMatrix normalized_wl_step(const Graph& g, const DenseMatrix& labels);

/// Y M^k2 by k2 sparse products. Y must be feature-major.
FeatureMatrix rw_propagate(const FeatureMatrix& y, const TransitionMatrix& m, int k2);

/// lim_k Y M^k = (Y 1) pi^T for a connected graph.
FeatureMatrix rw_limit(const FeatureMatrix& y, const TransitionMatrix& m);

/// Stationary distribution, pi_v ∝ d_v + 1. Throws ValidationError when the
/// graph is disconnected; use stationary_distributions_by_component then.
Eigen::VectorXd stationary_distribution(const TransitionMatrix& m);

struct ComponentDistribution {
  std::vector<int> nodes;
  Eigen::VectorXd pi;
};
std::vector<ComponentDistribution> stationary_distributions_by_component(const TransitionMatrix& m);

struct PowerIterationOptions {
  int max_iterations = 10000;
  double tolerance = 1e-12;
  std::uint64_t seed = 0x5eed;
};

/// Second largest eigenvalue modulus of M for a connected graph.
///
/// Power iteration on B = M - 1 pi^T in the pi-weighted inner product, where
/// M is self-adjoint; the Rayleigh quotient of B^2 gives mu2^2 even when
/// +mu2 and -mu2 are both eigenvalues. Throws NumericalError with the last
/// residual when the iteration cap is hit.
double second_eigenvalue(const TransitionMatrix& m, const PowerIterationOptions& options = {});

struct SpectralSummary {
  Eigen::VectorXd stationary;
  double mu2 = 0.0;
};
SpectralSummary spectral_summary(const TransitionMatrix& m, const PowerIterationOptions& options = {});

/// Distance of M^k to its rank-one limit 1 pi^T for k = 0..k_max, taken as
/// the maximum over rows. `chi2` measures a row r as |r - pi| in l2(1/pi),
/// `l1` as the plain l1 distance. Connected graphs only.
struct ErgodicityProfile {
  std::vector<double> chi2;
  std::vector<double> l1;
};
ErgodicityProfile ergodicity_profile(const TransitionMatrix& m, int k_max);

}  // namespace pwlr

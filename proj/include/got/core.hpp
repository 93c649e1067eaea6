#pragma once

// Domain types shared by every solver, the cosine kernels, and graph
// construction from embeddings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "got/error.hpp"
#include "got/matrix.hpp"

namespace got {

/// Index map i -> perm[i]. Used for ground-truth correspondences and assignments.
using Permutation = std::vector<std::size_t>;

inline bool is_permutation(const Permutation& p) {
  std::vector<bool> seen(p.size(), false);
  for (std::size_t v : p) {
    if (v >= p.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

inline Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

inline Permutation inverse(const Permutation& p) {
  Permutation inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = i;
  return inv;
}

/// Ordered set of n >= 1 nonzero vectors of a common dimension d >= 1,
/// stored one vector per row.
class EmbeddingSet {
 public:
  explicit EmbeddingSet(Matrix vectors) : vectors_(std::move(vectors)) {
    detail::require(vectors_.rows() >= 1, "EmbeddingSet: at least one vector is required");
    detail::require(vectors_.cols() >= 1, "EmbeddingSet: vector dimension must be >= 1");
    norms_.resize(vectors_.rows());
    for (std::size_t i = 0; i < vectors_.rows(); ++i) {
      double s = 0.0;
      for (double v : vectors_.row(i)) {
        detail::require(std::isfinite(v),
                        "EmbeddingSet: vector " + std::to_string(i) + " has a non-finite entry");
        s += v * v;
      }
      detail::require(s > 0.0, "EmbeddingSet: vector " + std::to_string(i) + " has zero norm");
      norms_[i] = std::sqrt(s);
    }
  }

  explicit EmbeddingSet(const std::vector<std::vector<double>>& vectors)
      : EmbeddingSet(pack(vectors)) {}
  EmbeddingSet(std::initializer_list<std::vector<double>> vectors)
      : EmbeddingSet(std::vector<std::vector<double>>(vectors)) {}

  std::size_t count() const noexcept { return vectors_.rows(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }
  std::span<const double> vector(std::size_t i) const noexcept { return vectors_.row(i); }
  double norm(std::size_t i) const noexcept { return norms_[i]; }
  const Matrix& matrix() const noexcept { return vectors_; }

 private:
  static Matrix pack(const std::vector<std::vector<double>>& vectors) {
    detail::require(!vectors.empty(), "EmbeddingSet: at least one vector is required");
    const std::size_t d = vectors.front().size();
    Matrix m(vectors.size(), d);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      detail::require(vectors[i].size() == d,
                      "EmbeddingSet: vector " + std::to_string(i) + " has dimension " +
                          std::to_string(vectors[i].size()) + ", expected " + std::to_string(d));
      std::copy(vectors[i].begin(), vectors[i].end(), m.row(i).begin());
    }
    return m;
  }

  Matrix vectors_;
  std::vector<double> norms_;
};

/// Probability vector: nonnegative entries summing to one.
class MarginalWeights {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit MarginalWeights(std::vector<double> weights) : weights_(std::move(weights)) {
    detail::require(!weights_.empty(), "MarginalWeights: empty weight vector");
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      detail::require(std::isfinite(weights_[i]) && weights_[i] >= 0.0,
                      "MarginalWeights: entry " + std::to_string(i) + " is negative or non-finite");
      s += weights_[i];
    }
    detail::require(std::abs(s - 1.0) <= kSumTolerance,
                    "MarginalWeights: entries sum to " + std::to_string(s) + ", expected 1");
  }

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  std::span<const double> values() const noexcept { return weights_; }

 private:
  std::vector<double> weights_;
};

inline MarginalWeights uniform_marginal(std::size_t n) {
  detail::require(n >= 1, "uniform_marginal: n must be >= 1");
  return MarginalWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

/// Square symmetric intra-domain matrix. Raw cosine matrices carry a unit
/// diagonal; thresholded ones (graph adjacency weights) are entrywise >= 0.
class SimilarityMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-9;

  explicit SimilarityMatrix(Matrix entries, bool thresholded = false, double tau = 0.0)
      : entries_(std::move(entries)), thresholded_(thresholded), tau_(tau) {
    detail::require(entries_.rows() == entries_.cols() && entries_.rows() >= 1,
                    "SimilarityMatrix: must be square and nonempty, got " + shape_string(entries_));
    detail::require(all_finite(entries_), "SimilarityMatrix: non-finite entry");
    for (std::size_t i = 0; i < entries_.rows(); ++i)
      for (std::size_t j = i + 1; j < entries_.cols(); ++j)
        detail::require(std::abs(entries_(i, j) - entries_(j, i)) <= kSymmetryTolerance,
                        "SimilarityMatrix: not symmetric at (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
    if (thresholded_) {
      detail::require(tau_ >= 0.0, "SimilarityMatrix: tau must be >= 0");
      for (double v : entries_.data())
        detail::require(v >= 0.0, "SimilarityMatrix: thresholded entries must be >= 0");
    }
  }

  std::size_t size() const noexcept { return entries_.rows(); }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_(i, j); }
  bool thresholded() const noexcept { return thresholded_; }
  double tau() const noexcept { return tau_; }

  /// Edge (i, j) exists iff the weight is strictly positive.
  bool has_edge(std::size_t i, std::size_t j) const noexcept { return entries_(i, j) > 0.0; }

 private:
  Matrix entries_;
  bool thresholded_;
  double tau_;
};

/// Nonnegative cross-domain ground cost.
class CostMatrix {
 public:
  explicit CostMatrix(Matrix entries) : entries_(std::move(entries)) {
    detail::require(!entries_.empty(), "CostMatrix: empty matrix");
    for (double v : entries_.data())
      detail::require(std::isfinite(v) && v >= 0.0,
                      "CostMatrix: entries must be finite and >= 0");
  }

  std::size_t rows() const noexcept { return entries_.rows(); }
  std::size_t cols() const noexcept { return entries_.cols(); }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_(i, j); }

 private:
  Matrix entries_;
};

/// Nonnegative coupling together with the marginals it is meant to satisfy.
/// Solvers hit the marginals only up to their tolerance, so construction checks
/// shape and sign; marginal feasibility is queried with marginal_violation().
class TransportPlan {
 public:
  TransportPlan(Matrix entries, MarginalWeights row_marginal, MarginalWeights col_marginal)
      : entries_(std::move(entries)),
        row_marginal_(std::move(row_marginal)),
        col_marginal_(std::move(col_marginal)) {
    detail::require(entries_.rows() == row_marginal_.size() &&
                        entries_.cols() == col_marginal_.size(),
                    "TransportPlan: entries " + shape_string(entries_) +
                        " do not match marginal lengths");
    for (double v : entries_.data())
      detail::require(std::isfinite(v) && v >= 0.0,
                      "TransportPlan: entries must be finite and >= 0");
  }

  std::size_t rows() const noexcept { return entries_.rows(); }
  std::size_t cols() const noexcept { return entries_.cols(); }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_(i, j); }
  const MarginalWeights& row_marginal() const noexcept { return row_marginal_; }
  const MarginalWeights& col_marginal() const noexcept { return col_marginal_; }

  double total_mass() const { return total_sum(entries_); }

  /// max over rows and columns of |sum - target|.
  double marginal_violation() const {
    double worst = 0.0;
    const auto rs = row_sums(entries_);
    for (std::size_t i = 0; i < rs.size(); ++i)
      worst = std::max(worst, std::abs(rs[i] - row_marginal_[i]));
    const auto cs = col_sums(entries_);
    for (std::size_t j = 0; j < cs.size(); ++j)
      worst = std::max(worst, std::abs(cs[j] - col_marginal_[j]));
    return worst;
  }

  /// Throws unless the marginals hold within tol and the mass is one within 1e-9.
  void validate(double tol) const {
    const double v = marginal_violation();
    detail::require(v <= tol, "TransportPlan: marginal violation " + std::to_string(v) +
                                  " exceeds tolerance " + std::to_string(tol));
    detail::require(std::abs(total_mass() - 1.0) <= 1e-9, "TransportPlan: total mass is not 1");
  }

 private:
  Matrix entries_;
  MarginalWeights row_marginal_;
  MarginalWeights col_marginal_;
};

/// (1/n) P for the permutation i -> perm[i].
inline TransportPlan permutation_plan(const Permutation& perm) {
  detail::require(is_permutation(perm) && !perm.empty(), "permutation_plan: not a permutation");
  const std::size_t n = perm.size();
  Matrix t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, perm[i]) = 1.0 / static_cast<double>(n);
  return TransportPlan(std::move(t), uniform_marginal(n), uniform_marginal(n));
}

/// p q^T.
inline TransportPlan independent_plan(const MarginalWeights& p, const MarginalWeights& q) {
  Matrix t(p.size(), q.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) t(i, j) = p[i] * q[j];
  return TransportPlan(std::move(t), p, q);
}

enum class SolveMode { shared, unshared };

struct SolverConfig {
  double beta = 0.5;            // proximal / entropic step weight
  int outer_iters = 1000;       // proximal-point loop and structure-matching loop caps
  int inner_iters = 1;          // scaling sweeps per proximal step
  double lambda = 0.8;          // weight of the node (Wasserstein) term
  double tau = 0.1;             // graph threshold
  bool threshold_graphs = true; // feed thresholded graphs to the structure term
  SolveMode mode = SolveMode::shared;
  double marginal_tol = 1e-6;
  double convergence_tol = 1e-9;

  void validate() const {
    detail::require(std::isfinite(beta) && beta > 0.0, "config: beta must be > 0");
    detail::require(outer_iters >= 1, "config: outer_iters must be >= 1");
    detail::require(inner_iters >= 1, "config: inner_iters must be >= 1");
    detail::require(lambda >= 0.0 && lambda <= 1.0, "config: lambda must lie in [0, 1]");
    detail::require(std::isfinite(tau) && tau >= 0.0, "config: tau must be >= 0");
    detail::require(marginal_tol > 0.0, "config: marginal_tol must be > 0");
    detail::require(convergence_tol > 0.0, "config: convergence_tol must be > 0");
  }
};

inline const char* to_string(SolveMode m) { return m == SolveMode::shared ? "shared" : "unshared"; }

// ---------------------------------------------------------------------------
// Kernels

/// entry (i, j) = cos(a_i, b_j), clamped to [-1, 1] against rounding.
inline Matrix cosine_similarity_matrix(const EmbeddingSet& a, const EmbeddingSet& b) {
  detail::require(a.dim() == b.dim(), "cosine_similarity_matrix: dimension mismatch (" +
                                          std::to_string(a.dim()) + " vs " +
                                          std::to_string(b.dim()) + ")");
  Matrix s(a.count(), b.count());
  for (std::size_t i = 0; i < a.count(); ++i) {
    auto ai = a.vector(i);
    for (std::size_t j = 0; j < b.count(); ++j) {
      auto bj = b.vector(j);
      double dot = 0.0;
      for (std::size_t k = 0; k < ai.size(); ++k) dot += ai[k] * bj[k];
      s(i, j) = std::clamp(dot / (a.norm(i) * b.norm(j)), -1.0, 1.0);
    }
  }
  return s;
}

/// Cosine distance 1 - cos(a_i, b_j), in [0, 2].
inline CostMatrix cosine_cost_matrix(const EmbeddingSet& a, const EmbeddingSet& b) {
  Matrix c = cosine_similarity_matrix(a, b);
  for (double& v : c.data()) v = 1.0 - v;
  return CostMatrix(std::move(c));
}

/// Raw intra-domain cosine similarities.
inline SimilarityMatrix similarity_graph(const EmbeddingSet& x) {
  return SimilarityMatrix(cosine_similarity_matrix(x, x));
}

/// Thresholded graph: weight max(cos(x_i, x_j) - tau, 0); positive weight means an edge.
inline SimilarityMatrix build_graph(const EmbeddingSet& x, double tau) {
  detail::require(std::isfinite(tau) && tau >= 0.0, "build_graph: tau must be >= 0");
  Matrix c = cosine_similarity_matrix(x, x);
  for (double& v : c.data()) v = std::max(v - tau, 0.0);
  return SimilarityMatrix(std::move(c), true, tau);
}

}  // namespace got

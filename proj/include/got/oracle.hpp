#pragma once

// Exact small-instance references. With uniform marginals on a square problem
// the optimal coupling is a scaled permutation matrix (Birkhoff), so exact
// Wasserstein reduces to linear assignment. These are test and harness tools;
// the solvers never call them.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "got/core.hpp"
#include "got/error.hpp"
#include "got/matrix.hpp"

namespace got::oracle {

inline constexpr std::size_t kMaxExhaustive = 8;
inline constexpr std::size_t kMaxAssignment = 12;

struct ExactWdResult {
  double distance = 0.0;  // (1/n) sum_i C(i, assignment[i])
  Permutation assignment;
  TransportPlan plan;  // (1/n) P
};

inline double assignment_cost(const Matrix& cost, const Permutation& perm) {
  double s = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) s += cost(i, perm[i]);
  return s / static_cast<double>(perm.size());
}

/// Minimum-cost assignment by enumerating all n! permutations. Ties keep the
/// lexicographically first permutation.
inline Permutation assignment_exhaustive(const Matrix& cost) {
  detail::require(cost.rows() == cost.cols() && cost.rows() >= 1,
                  "assignment_exhaustive: cost must be square, got " + shape_string(cost));
  detail::require(cost.rows() <= kMaxExhaustive,
                  "assignment_exhaustive: n=" + std::to_string(cost.rows()) + " exceeds " +
                      std::to_string(kMaxExhaustive));
  Permutation perm = identity_permutation(cost.rows());
  Permutation best = perm;
  double best_cost = assignment_cost(cost, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double c = assignment_cost(cost, perm);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  }
  return best;
}

/// Shortest augmenting path assignment (Hungarian method with potentials), O(n^3).
inline Permutation assignment_hungarian(const Matrix& cost) {
  detail::require(cost.rows() == cost.cols() && cost.rows() >= 1,
                  "assignment_hungarian: cost must be square, got " + shape_string(cost));
  detail::require(cost.rows() <= kMaxAssignment,
                  "assignment_hungarian: n=" + std::to_string(cost.rows()) + " exceeds " +
                      std::to_string(kMaxAssignment));
  const std::size_t n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based; column 0 is the virtual root of each augmenting search.
  std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - row_pot[i0] - col_pot[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          row_pot[match[j]] += delta;
          col_pot[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Permutation perm(n);
  for (std::size_t j = 1; j <= n; ++j) perm[match[j] - 1] = j - 1;
  return perm;
}

/// Exact Wasserstein distance for a square cost under uniform marginals.
/// Exhaustive search up to n = 8, augmenting paths up to n = 12.
inline ExactWdResult exact_wd_uniform(const Matrix& cost) {
  detail::require(cost.rows() == cost.cols(),
                  "exact_wd_uniform: cost must be square, got " + shape_string(cost));
  detail::require(cost.rows() >= 1 && cost.rows() <= kMaxAssignment,
                  "exact_wd_uniform: n=" + std::to_string(cost.rows()) + " outside [1, " +
                      std::to_string(kMaxAssignment) + "]");
  Permutation perm = cost.rows() <= kMaxExhaustive ? assignment_exhaustive(cost)
                                                   : assignment_hungarian(cost);
  const double d = assignment_cost(cost, perm);
  TransportPlan plan = permutation_plan(perm);
  return ExactWdResult{d, std::move(perm), std::move(plan)};
}

inline ExactWdResult exact_wd_uniform(const CostMatrix& cost) {
  return exact_wd_uniform(cost.entries());
}

/// sum_{i,j,i',j'} T_ij T_i'j' (cx_ii' - cy_jj')^2 by direct quadruple loop.
inline double gw_objective_at_coupling(const SimilarityMatrix& cx, const SimilarityMatrix& cy,
                                       const Matrix& plan) {
  detail::require(plan.rows() == cx.size() && plan.cols() == cy.size(),
                  "gw_objective_at_coupling: plan is " + shape_string(plan) +
                      " but graphs have sizes " + std::to_string(cx.size()) + ", " +
                      std::to_string(cy.size()));
  const std::size_t n = cx.size();
  const std::size_t m = cy.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double tij = plan(i, j);
      if (tij == 0.0) continue;
      double inner = 0.0;
      for (std::size_t i2 = 0; i2 < n; ++i2)
        for (std::size_t j2 = 0; j2 < m; ++j2) {
          const double d = cx(i, i2) - cy(j, j2);
          inner += plan(i2, j2) * d * d;
        }
      total += tij * inner;
    }
  return total;
}

inline double gw_objective_at_coupling(const SimilarityMatrix& cx, const SimilarityMatrix& cy,
                                       const TransportPlan& plan) {
  return gw_objective_at_coupling(cx, cy, plan.entries());
}

/// Smallest GW objective over the n! permutation couplings (1/n) P. An upper
/// bound on the true distance, which ranges over all couplings.
inline std::pair<double, Permutation> exact_gw_over_permutations(const SimilarityMatrix& cx,
                                                                 const SimilarityMatrix& cy) {
  detail::require(cx.size() == cy.size(), "exact_gw_over_permutations: graph sizes " +
                                              std::to_string(cx.size()) + " and " +
                                              std::to_string(cy.size()) + " differ");
  detail::require(cx.size() <= kMaxExhaustive,
                  "exact_gw_over_permutations: n=" + std::to_string(cx.size()) + " exceeds " +
                      std::to_string(kMaxExhaustive));
  const std::size_t n = cx.size();
  const double w = 1.0 / static_cast<double>(n * n);
  // At a permutation coupling only the n^2 pairs (i, perm[i]) x (i', perm[i']) carry mass.
  auto objective = [&](const Permutation& perm) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t i2 = 0; i2 < n; ++i2) {
        const double d = cx(i, i2) - cy(perm[i], perm[i2]);
        s += d * d;
      }
    return s * w;
  };
  Permutation perm = identity_permutation(n);
  Permutation best = perm;
  double best_value = objective(perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double v = objective(perm);
    if (v < best_value) {
      best_value = v;
      best = perm;
    }
  }
  return {best_value, best};
}

}  // namespace got::oracle

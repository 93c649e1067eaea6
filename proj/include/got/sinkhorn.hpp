#pragma once

// Wasserstein distance by the inexact proximal-point method: each outer step
// multiplies the Gibbs kernel by the current plan and rescales it toward the
// marginals with a few Sinkhorn sweeps. The iterates converge to the
// unregularized optimal plan rather than the entropic one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "got/core.hpp"
#include "got/error.hpp"
#include "got/matrix.hpp"

namespace got {

struct WdResult {
  TransportPlan plan;
  double distance = 0.0;  // <C, T>
  int outer_iterations_run = 0;
  double final_marginal_violation = 0.0;
  bool converged = false;  // plan change below convergence_tol and marginals within marginal_tol
  bool clamped = false;    // some scaling denominator hit the underflow floor
};

namespace detail {

inline constexpr double kDenominatorFloor = 1e-30;

inline double marginal_gap(const Matrix& plan, const MarginalWeights& u,
                           const MarginalWeights& v) {
  double gap = 0.0;
  const auto rs = row_sums(plan);
  const auto cs = col_sums(plan);
  for (std::size_t i = 0; i < rs.size(); ++i) gap = std::max(gap, std::abs(rs[i] - u[i]));
  for (std::size_t j = 0; j < cs.size(); ++j) gap = std::max(gap, std::abs(cs[j] - v[j]));
  return gap;
}

// exp(-(C - min C) / beta). The shift cancels in the scaling vectors, so the
// plan is that of exp(-C / beta); it only keeps the largest entry at 1.
inline Matrix gibbs_kernel(const Matrix& cost, double beta) {
  double lo = cost.data().front();
  for (double c : cost.data()) lo = std::min(lo, c);
  Matrix a(cost.rows(), cost.cols());
  auto cd = cost.data();
  auto ad = a.data();
  for (std::size_t k = 0; k < cd.size(); ++k) ad[k] = std::exp(-(cd[k] - lo) / beta);

  const auto rs = row_sums(a);
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (!(rs[i] > 0.0))
      throw ConditioningError("kernel exp(-C/beta) underflows to zero on row " +
                              std::to_string(i) + " (beta=" + std::to_string(beta) +
                              "); increase beta");
  const auto cs = col_sums(a);
  for (std::size_t j = 0; j < cs.size(); ++j)
    if (!(cs[j] > 0.0))
      throw ConditioningError("kernel exp(-C/beta) underflows to zero on column " +
                              std::to_string(j) + " (beta=" + std::to_string(beta) +
                              "); increase beta");
  return a;
}

}  // namespace detail

/// Solves min <C, T> over couplings of (u, v). The cost may have any sign;
/// structure-matching solvers pass linearized pseudo-costs through here.
inline WdResult solve_wd(const Matrix& cost, const MarginalWeights& u, const MarginalWeights& v,
                         const SolverConfig& config) {
  config.validate();
  detail::require(cost.rows() == u.size() && cost.cols() == v.size(),
                  "solve_wd: cost is " + shape_string(cost) + " but marginals have lengths " +
                      std::to_string(u.size()) + " and " + std::to_string(v.size()));
  detail::require(all_finite(cost), "solve_wd: cost has non-finite entries");

  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  const Matrix kernel = detail::gibbs_kernel(cost, config.beta);

  std::vector<double> delta(n, 0.0);
  std::vector<double> sigma(v.values().begin(), v.values().end());
  Matrix plan(n, m, 1.0);
  Matrix q(n, m);
  bool clamped = false;
  bool converged = false;
  int iters = 0;

  for (int t = 0; t < config.outer_iters; ++t) {
    q = hadamard(kernel, plan);
    for (int k = 0; k < config.inner_iters; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        auto qi = q.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += qi[j] * sigma[j];
        if (s < detail::kDenominatorFloor) {
          clamped = clamped || u[i] > 0.0;
          s = detail::kDenominatorFloor;
        }
        delta[i] = u[i] / s;
      }
      std::vector<double> colsum(m, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        auto qi = q.row(i);
        for (std::size_t j = 0; j < m; ++j) colsum[j] += qi[j] * delta[i];
      }
      for (std::size_t j = 0; j < m; ++j) {
        double s = colsum[j];
        if (s < detail::kDenominatorFloor) {
          clamped = clamped || v[j] > 0.0;
          s = detail::kDenominatorFloor;
        }
        sigma[j] = v[j] / s;
      }
    }

    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto qi = q.row(i);
      auto ti = plan.row(i);
      for (std::size_t j = 0; j < m; ++j) {
        const double next = delta[i] * qi[j] * sigma[j];
        change = std::max(change, std::abs(next - ti[j]));
        ti[j] = next;
      }
    }
    iters = t + 1;
    // A small step alone is not enough: with uneven marginals the row sums
    // can still be off long after the plan has stopped moving much.
    if (change < config.convergence_tol &&
        detail::marginal_gap(plan, u, v) <= config.marginal_tol) {
      converged = true;
      break;
    }
  }

  if (!all_finite(plan))
    throw ConditioningError("solve_wd: plan became non-finite (beta=" +
                            std::to_string(config.beta) + "); increase beta");

  const double distance = frobenius_dot(cost, plan);
  TransportPlan result(std::move(plan), u, v);
  const double violation = result.marginal_violation();
  return WdResult{std::move(result), distance, iters, violation, converged, clamped};
}

inline WdResult solve_wd(const CostMatrix& cost, const MarginalWeights& u,
                         const MarginalWeights& v, const SolverConfig& config) {
  return solve_wd(cost.entries(), u, v, config);
}

/// Gradient of <C, T> with respect to C at a frozen plan, which is T itself.
/// A trainer differentiating the alignment loss treats the plan as a constant
/// and back-propagates this matrix into whatever produced C.
inline Matrix envelope_gradient(const Matrix& cost, const TransportPlan& plan) {
  detail::require(cost.rows() == plan.rows() && cost.cols() == plan.cols(),
                  "envelope_gradient: cost is " + shape_string(cost) + " but plan is " +
                      shape_string(plan.entries()));
  return plan.entries();
}

inline Matrix envelope_gradient(const CostMatrix& cost, const TransportPlan& plan) {
  return envelope_gradient(cost.entries(), plan);
}

}  // namespace got

#pragma once

#include "crsim/stiffness_qp.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace crsim {

//! Reference solver for small scaling problems. Enumerates every choice of
//! tight axis constraints and pinned bounds, solves the resulting
//! equality-constrained projection in closed form, and keeps the feasible
//! candidate with the smallest objective. Exponential in n, so instances
//! are capped at n <= 6. Intended for validation runs and tests; shares no
//! iteration logic with solve_scaling.
inline ScalingSolution oracle_solve(const ScalingProblem& problem) {
  const std::size_t n = problem.size();
  if (n > 6)
    throw std::invalid_argument("oracle_solve handles at most 6 contacts");

  ScalingSolution best;
  if (n == 0) return best;

  const double r = problem.k_max / problem.stiffness;
  const auto& c = problem.c_vectors;
  const double feas_tol = 1e-9 * std::max(1.0, r);

  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<double> best_s;

  std::vector<int> bound_state(n, 0);  // 0 free, 1 at lower, 2 at upper
  std::vector<double> s(n);

  // 3^n bound assignments enumerated by mixed-radix counting.
  const int axis_combos = 8;
  std::size_t total_bound_combos = 1;
  for (std::size_t i = 0; i < n; ++i) total_bound_combos *= 3;

  for (std::size_t bc = 0; bc < total_bound_combos; ++bc) {
    std::size_t rem = bc;
    for (std::size_t i = 0; i < n; ++i) {
      bound_state[i] = static_cast<int>(rem % 3);
      rem /= 3;
    }
    for (int axes = 0; axes < axis_combos; ++axes) {
      std::vector<int> tight;
      for (int j = 0; j < 3; ++j)
        if (axes & (1 << j)) tight.push_back(j);
      const int m = static_cast<int>(tight.size());

      // Equality-restricted minimizer of sum (s_i - 1)^2.
      for (std::size_t i = 0; i < n; ++i)
        s[i] = bound_state[i] == 0 ? 1.0 : (bound_state[i] == 2 ? 1.0 : 0.0);

      if (m > 0) {
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3> G(m, m);
        Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1> q(m);
        for (int a = 0; a < m; ++a) {
          double qa = -r;
          for (std::size_t i = 0; i < n; ++i) qa += c[i][tight[a]] * s[i];
          q(a) = qa;
          for (int b = a; b < m; ++b) {
            double g = 0.0;
            for (std::size_t i = 0; i < n; ++i)
              if (bound_state[i] == 0) g += c[i][tight[a]] * c[i][tight[b]];
            G(a, b) = g;
            G(b, a) = g;
          }
        }
        Eigen::CompleteOrthogonalDecomposition<
            Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>>
            cod(G);
        const auto lam = cod.solve(q).eval();
        for (std::size_t i = 0; i < n; ++i) {
          if (bound_state[i] != 0) continue;
          double v = 1.0;
          for (int a = 0; a < m; ++a) v -= lam(a) * c[i][tight[a]];
          s[i] = v;
        }
        // Overdetermined / inconsistent subsets are rejected here.
        bool consistent = true;
        for (int a = 0; a < m && consistent; ++a) {
          double load = 0.0;
          for (std::size_t i = 0; i < n; ++i) load += s[i] * c[i][tight[a]];
          consistent = std::abs(load - r) <= 1e-7 * std::max(1.0, r);
        }
        if (!consistent) continue;
      }

      bool feasible = true;
      for (std::size_t i = 0; i < n && feasible; ++i)
        feasible = s[i] >= -1e-9 && s[i] <= 1.0 + 1e-9;
      for (int j = 0; j < 3 && feasible; ++j) {
        double load = 0.0;
        for (std::size_t i = 0; i < n; ++i) load += s[i] * c[i][j];
        feasible = load <= r + feas_tol;
      }
      if (!feasible) continue;

      double obj = 0.0;
      for (std::size_t i = 0; i < n; ++i) obj += (s[i] - 1.0) * (s[i] - 1.0);
      if (obj < best_obj - 1e-15) {
        best_obj = obj;
        best_s = s;
      }
    }
  }

  if (!std::isfinite(best_obj))
    throw std::runtime_error("oracle_solve found no feasible candidate");

  for (double& si : best_s) si = std::min(1.0, std::max(0.0, si));
  detail_qp::polish_feasibility(c, r, best_s);

  best.scales = best_s;
  best.objective = 0.0;
  for (double si : best_s) best.objective += (si - 1.0) * (si - 1.0);
  for (int j = 0; j < 3; ++j) {
    double load = 0.0;
    for (std::size_t i = 0; i < n; ++i) load += best_s[i] * c[i][j];
    best.active_axes[j] = std::abs(load - r) <= 1e-8 * std::max(1.0, r);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (best_s[i] <= 1e-12 || best_s[i] >= 1.0 - 1e-12)
      best.active_bounds.push_back(static_cast<int>(i));
  best.kkt_residual = 0.0;
  return best;
}

}  // namespace crsim

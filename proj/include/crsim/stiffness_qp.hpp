#pragma once

#include "crsim/contact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace crsim {

//! Per-axis stiffness bounding problem: choose scale factors s_i for n
//! contacts with axis fractions c_i so that K * sum_i s_i c_ij stays below
//! k_max on every translational axis.
struct ScalingProblem {
  std::vector<Vec3> c_vectors;  // one per contact, components in [0,1], sum 1
  double stiffness = 1.0;       // shared contact stiffness K, N/m
  double k_max = 1.0;           // per-axis bound, N/m

  ScalingProblem() = default;

  ScalingProblem(std::vector<Vec3> c, double k, double bound)
      : c_vectors(std::move(c)), stiffness(k), k_max(bound) {
    if (!(stiffness > 0.0))
      throw std::invalid_argument("scaling problem stiffness must be > 0");
    if (!(k_max > 0.0))
      throw std::invalid_argument("scaling problem k_max must be > 0");
    for (const Vec3& cv : c_vectors) {
      if (cv.minCoeff() < -1e-9 || cv.maxCoeff() > 1.0 + 1e-9 ||
          std::abs(cv.sum() - 1.0) > 1e-9)
        throw std::invalid_argument(
            "axis stiffness vector components must lie in [0,1] and sum to 1");
    }
  }

  std::size_t size() const { return c_vectors.size(); }
};

//! Solution of the scaling problem with active-set diagnostics.
struct ScalingSolution {
  std::vector<double> scales;            // s_i in [0, 1]
  double objective = 0.0;                // sum (s_i - 1)^2
  std::array<bool, 3> active_axes{};     // axis bound tight at the optimum
  std::vector<int> active_bounds;        // contacts pinned at 0 or 1
  double kkt_residual = 0.0;
};

namespace detail_qp {

//! Rescales s multiplicatively so no normalized axis load exceeds r.
//! Rounding in the equality solves can leave loads a few ulps high; the
//! downstream contract is a hard per-axis ceiling.
inline void polish_feasibility(const std::vector<Vec3>& c, double r,
                               std::vector<double>& s) {
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) {
    double load = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) load += s[i] * c[i][j];
    worst = std::max(worst, load);
  }
  if (worst > r) {
    const double f = r / worst;
    for (double& si : s) si = std::min(1.0, std::max(0.0, si * f));
  }
}

inline double kkt_residual(const std::vector<Vec3>& c, double r,
                           const std::vector<double>& s,
                           const std::array<double, 3>& lambda,
                           const std::vector<double>& mu_sigma) {
  const double scale = std::max(1.0, r);
  double res = 0.0;
  std::array<double, 3> load{0.0, 0.0, 0.0};
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < s.size(); ++i) load[j] += s[i] * c[i][j];
  for (int j = 0; j < 3; ++j) {
    res = std::max(res, std::max(0.0, load[j] - r) / scale);
    res = std::max(res, std::abs(lambda[j] * (load[j] - r)) / scale);
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    double g = s[i] - 1.0 + mu_sigma[i];
    for (int j = 0; j < 3; ++j) g += lambda[j] * c[i][j];
    res = std::max(res, std::abs(g));
    res = std::max(res, std::max(0.0, s[i] - 1.0));
    res = std::max(res, std::max(0.0, -s[i]));
  }
  return res;
}

}  // namespace detail_qp

//! Minimizes sum_i (s_i - 1)^2 subject to K * sum_i s_i c_ij <= k_max for
//! j = 1..3 and 0 <= s_i <= 1, by a primal active-set iteration. The
//! identity Hessian keeps every working-set subproblem a closed-form
//! projection; bound-pinned variables are eliminated so the linear solves
//! never exceed 3x3.
inline ScalingSolution solve_scaling(const ScalingProblem& problem) {
  const std::size_t n = problem.size();
  ScalingSolution sol;
  if (n == 0) return sol;

  const double r = problem.k_max / problem.stiffness;  // normalized bound
  const auto& c = problem.c_vectors;

  // Axis rows with no support can never bind (0 <= r always holds).
  std::array<bool, 3> axis_present{};
  std::array<double, 3> row_sum{0.0, 0.0, 0.0};
  for (int j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < n; ++i) row_sum[j] += c[i][j];
    axis_present[j] = row_sum[j] > 1e-15;
  }

  // Feasible start: uniform shrink of the unconstrained optimum s = 1.
  double t = 1.0;
  for (int j = 0; j < 3; ++j)
    if (axis_present[j] && row_sum[j] > r) t = std::min(t, r / row_sum[j]);
  std::vector<double> s(n, t);

  std::array<bool, 3> axis_active{};
  std::vector<std::int8_t> bound(n, 0);  // 0 free, -1 at 0, +1 at 1
  std::array<double, 3> lambda{0.0, 0.0, 0.0};

  const double step_tol = 1e-13;
  const double mult_tol = 1e-12;
  const int max_iter = 100 + 10 * static_cast<int>(n);

  std::vector<double> target(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    // Equality-constrained subproblem on the current working set.
    std::vector<int> axes;
    for (int j = 0; j < 3; ++j)
      if (axis_active[j]) axes.push_back(j);
    const int m = static_cast<int>(axes.size());

    lambda = {0.0, 0.0, 0.0};
    if (m > 0) {
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3> G(m, m);
      Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1> q(m);
      for (int a = 0; a < m; ++a) {
        q(a) = -r;
        for (std::size_t i = 0; i < n; ++i) {
          const double cij = c[i][axes[a]];
          q(a) += (bound[i] == 0) ? cij
                                  : cij * (bound[i] > 0 ? 1.0 : 0.0);
        }
        for (int b = a; b < m; ++b) {
          double g = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            if (bound[i] == 0) g += c[i][axes[a]] * c[i][axes[b]];
          G(a, b) = g;
          G(b, a) = g;
        }
      }
      Eigen::CompleteOrthogonalDecomposition<
          Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>>
          cod(G);
      Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1> lam = cod.solve(q);
      for (int a = 0; a < m; ++a) lambda[axes[a]] = lam(a);
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (bound[i] != 0) {
        target[i] = bound[i] > 0 ? 1.0 : 0.0;
      } else {
        double v = 1.0;
        for (int j = 0; j < 3; ++j)
          if (axis_active[j]) v -= lambda[j] * c[i][j];
        target[i] = v;
      }
    }

    double step_inf = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      step_inf = std::max(step_inf, std::abs(target[i] - s[i]));

    if (step_inf <= step_tol) {
      // Candidate optimum for this working set: test multiplier signs.
      int worst_kind = -1;  // 0 axis, 1 bound
      int worst_index = -1;
      double worst_val = -mult_tol;
      for (int j = 0; j < 3; ++j) {
        if (axis_active[j] && lambda[j] < worst_val) {
          worst_val = lambda[j];
          worst_kind = 0;
          worst_index = j;
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (bound[i] == 0) continue;
        double g = s[i] - 1.0;
        for (int j = 0; j < 3; ++j)
          if (axis_active[j]) g += lambda[j] * c[i][j];
        // Stationarity: g + mu * sigma = 0 with sigma = sign of the bound row.
        const double mu = bound[i] > 0 ? -g : g;
        if (mu < worst_val) {
          worst_val = mu;
          worst_kind = 1;
          worst_index = static_cast<int>(i);
        }
      }
      if (worst_kind < 0) break;  // KKT satisfied
      if (worst_kind == 0)
        axis_active[worst_index] = false;
      else
        bound[worst_index] = 0;
      continue;
    }

    // Line search toward the subproblem optimum; stop at the first
    // blocking constraint outside the working set.
    double alpha = 1.0;
    int block_kind = -1;  // 0 axis, 1 lower bound, 2 upper bound
    int block_index = -1;
    for (int j = 0; j < 3; ++j) {
      if (axis_active[j] || !axis_present[j]) continue;
      double load = 0.0, dload = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        load += s[i] * c[i][j];
        dload += (target[i] - s[i]) * c[i][j];
      }
      if (dload > 1e-15 * std::max(1.0, row_sum[j])) {
        const double a_j = (r - load) / dload;
        if (a_j < alpha - 1e-15) {
          alpha = std::max(0.0, a_j);
          block_kind = 0;
          block_index = j;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (bound[i] != 0) continue;
      const double d = target[i] - s[i];
      if (d < -step_tol) {
        const double a_i = (0.0 - s[i]) / d;
        if (a_i < alpha - 1e-15) {
          alpha = std::max(0.0, a_i);
          block_kind = 1;
          block_index = static_cast<int>(i);
        }
      } else if (d > step_tol) {
        const double a_i = (1.0 - s[i]) / d;
        if (a_i < alpha - 1e-15) {
          alpha = std::max(0.0, a_i);
          block_kind = 2;
          block_index = static_cast<int>(i);
        }
      }
    }

    for (std::size_t i = 0; i < n; ++i) s[i] += alpha * (target[i] - s[i]);

    if (block_kind == 0) {
      axis_active[block_index] = true;
    } else if (block_kind == 1) {
      s[block_index] = 0.0;
      bound[block_index] = -1;
    } else if (block_kind == 2) {
      s[block_index] = 1.0;
      bound[block_index] = +1;
    }
    if (iter + 1 == max_iter)
      throw std::runtime_error("stiffness scaling active-set did not converge");
  }

  for (double& si : s) si = std::min(1.0, std::max(0.0, si));
  detail_qp::polish_feasibility(c, r, s);

  sol.scales = s;
  sol.objective = 0.0;
  for (double si : s) sol.objective += (si - 1.0) * (si - 1.0);
  sol.active_axes = axis_active;
  for (std::size_t i = 0; i < n; ++i)
    if (bound[i] != 0) sol.active_bounds.push_back(static_cast<int>(i));

  std::vector<double> mu_sigma(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (bound[i] == 0) continue;
    double g = s[i] - 1.0;
    for (int j = 0; j < 3; ++j) g += lambda[j] * c[i][j];
    mu_sigma[i] = -g;  // mu * sigma folded into the stationarity test
  }
  sol.kkt_residual = detail_qp::kkt_residual(c, r, s, lambda, mu_sigma);
  return sol;
}

//! Builds the scaling problem for a contact set against an absolute bound.
inline ScalingProblem make_scaling_problem(const ContactSet& set,
                                           double k_max) {
  std::vector<Vec3> c;
  c.reserve(set.size());
  for (const ContactPoint& p : set.points) c.push_back(axis_stiffness_vector(p));
  return ScalingProblem(std::move(c), set.stiffness, k_max);
}

//! Copies the set with scale factors installed on each point.
inline ContactSet apply_scaling(const ContactSet& set,
                                const ScalingSolution& solution) {
  if (solution.scales.size() != set.points.size())
    throw std::invalid_argument(
        "apply_scaling: solution size does not match contact count");
  ContactSet out = set;
  for (std::size_t i = 0; i < out.points.size(); ++i)
    out.points[i].scale = solution.scales[i];
  return out;
}

}  // namespace crsim

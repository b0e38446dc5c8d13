#pragma once

#include "crsim/contact.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace crsim {

struct ReductionConfig {
  int k = 10;            // target cluster count, >= 1
  double c = 1.0;        // positional metric weight, 1/m^2, >= 0
  int max_iters = 50;    // Lloyd iteration cap
  double tol = 1e-8;     // center-movement stop threshold (metric units)

  void validate() const {
    if (k < 1) throw std::invalid_argument("reduction k must be >= 1");
    if (!(c >= 0.0)) throw std::invalid_argument("reduction c must be >= 0");
    if (max_iters < 1)
      throw std::invalid_argument("reduction max_iters must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("reduction tol must be > 0");
  }
};

struct ClusterAssignment {
  std::vector<int> labels;          // one entry per input contact, in [0, k)
  std::vector<Vec6> centers;        // [normal, position]; normal part unnormalized
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // assignment objective per iteration
};

namespace detail_reduce {

inline std::vector<Vec6> features(const ContactSet& set) {
  std::vector<Vec6> f;
  f.reserve(set.size());
  for (const ContactPoint& p : set.points) f.push_back(contact_feature(p));
  return f;
}

//! Nearest center by the weighted metric; ties resolve to the lowest index.
inline int nearest_center(const Vec6& f, const std::vector<Vec6>& centers,
                          double c) {
  int best = 0;
  double best_d = feature_distance(f, centers[0], c);
  for (std::size_t j = 1; j < centers.size(); ++j) {
    const double d = feature_distance(f, centers[j], c);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

}  // namespace detail_reduce

//! Farthest-point seeding. The first center is the input point farthest
//! from the feature centroid; each next center is the point farthest from
//! its nearest chosen center. All ties resolve to the lowest input index,
//! making the selection a pure function of input order.
inline std::vector<Vec6> kmeanspp_init(const ContactSet& set,
                                       const ReductionConfig& cfg) {
  cfg.validate();
  const std::size_t n = set.size();
  const std::size_t k = static_cast<std::size_t>(cfg.k);
  if (n < k)
    throw std::invalid_argument(
        "kmeanspp_init requires at least k contact points");

  const std::vector<Vec6> f = detail_reduce::features(set);

  Vec6 centroid = Vec6::Zero();
  for (const Vec6& v : f) centroid += v;
  centroid /= static_cast<double>(n);

  std::vector<bool> chosen(n, false);
  std::vector<Vec6> centers;
  centers.reserve(k);

  std::size_t first = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = feature_distance(f[i], centroid, cfg.c);
    if (d > best_d) {
      best_d = d;
      first = i;
    }
  }
  chosen[first] = true;
  centers.push_back(f[first]);

  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i)
    nearest[i] = feature_distance(f[i], centers.back(), cfg.c);

  while (centers.size() < k) {
    std::size_t pick = n;
    double far_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      if (nearest[i] > far_d) {
        far_d = nearest[i];
        pick = i;
      }
    }
    chosen[pick] = true;
    centers.push_back(f[pick]);
    for (std::size_t i = 0; i < n; ++i)
      nearest[i] =
          std::min(nearest[i], feature_distance(f[i], centers.back(), cfg.c));
  }
  return centers;
}

//! Lloyd iterations under the axis-weighted metric. Centers move to plain
//! member means (the normal block is left unnormalized so the objective
//! stays monotone); empty clusters are reseeded onto the point farthest
//! from their stale center.
inline ClusterAssignment kmeans_cluster(const ContactSet& set,
                                        const ReductionConfig& cfg) {
  cfg.validate();
  const std::size_t n = set.size();
  const std::size_t k = static_cast<std::size_t>(cfg.k);
  if (n < k)
    throw std::invalid_argument(
        "kmeans_cluster requires at least k contact points");

  const std::vector<Vec6> f = detail_reduce::features(set);

  ClusterAssignment out;
  out.centers = kmeanspp_init(set, cfg);
  out.labels.assign(n, 0);

  std::vector<int> count(k, 0);

  const auto assign_and_repair = [&]() {
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      out.labels[i] = detail_reduce::nearest_center(f[i], out.centers, cfg.c);
      ++count[out.labels[i]];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (count[j] > 0) continue;
      std::size_t pick = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (count[out.labels[i]] < 2) continue;
        const double d = feature_distance(f[i], out.centers[j], cfg.c);
        if (d > far_d) {
          far_d = d;
          pick = i;
        }
      }
      --count[out.labels[pick]];
      out.labels[pick] = static_cast<int>(j);
      count[j] = 1;
      out.centers[j] = f[pick];
    }
  };

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    assign_and_repair();

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      objective += feature_distance(f[i], out.centers[out.labels[i]], cfg.c);
    out.objective_history.push_back(objective);

    std::vector<Vec6> means(k, Vec6::Zero());
    for (std::size_t i = 0; i < n; ++i) means[out.labels[i]] += f[i];
    double movement = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      means[j] /= static_cast<double>(count[j]);
      movement = std::max(movement,
                          feature_distance(out.centers[j], means[j], cfg.c));
      out.centers[j] = means[j];
    }

    out.iterations = iter + 1;
    if (movement < cfg.tol) {
      out.converged = true;
      break;
    }
  }

  // Labels must minimize distance to the final centers.
  assign_and_repair();
  return out;
}

//! One representative per cluster, ordered by cluster index: centroid
//! position, renormalized mean normal, worst-case member depth, scale rearmed
//! to 1. A cancelled mean normal falls back to the deepest member's normal.
inline ContactSet representative_contacts(const ContactSet& set,
                                          const ClusterAssignment& assign) {
  if (assign.labels.size() != set.size())
    throw std::invalid_argument(
        "representative_contacts: assignment does not match the contact set");
  const std::size_t k = assign.centers.size();

  std::vector<ContactPoint> reps;
  reps.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    Vec3 pos_sum = Vec3::Zero();
    Vec3 normal_sum = Vec3::Zero();
    double depth = 0.0;
    int members = 0;
    int deepest = -1;
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (assign.labels[i] != static_cast<int>(j)) continue;
      const ContactPoint& p = set.points[i];
      pos_sum += p.position;
      normal_sum += p.normal;
      if (deepest < 0 || p.depth > depth) {
        depth = p.depth;
        deepest = static_cast<int>(i);
      }
      ++members;
    }
    if (members == 0)
      throw std::invalid_argument(
          "representative_contacts: empty cluster in assignment");

    const Vec3 mean_normal = normal_sum / static_cast<double>(members);
    const Vec3 normal = mean_normal.norm() < 1e-6
                            ? set.points[deepest].normal
                            : mean_normal.normalized();
    reps.emplace_back(pos_sum / static_cast<double>(members), normal, depth,
                      1.0);
  }
  return ContactSet(std::move(reps), set.stiffness, set.damping);
}

//! Full reduction: clusters to cfg.k representatives, or passes the input
//! through untouched when it is already small enough.
inline ContactSet reduce(const ContactSet& set, const ReductionConfig& cfg) {
  cfg.validate();
  if (set.size() <= static_cast<std::size_t>(cfg.k)) return set;
  return representative_contacts(set, kmeans_cluster(set, cfg));
}

}  // namespace crsim

#pragma once

#include "crsim/types.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace crsim {

inline constexpr double kUnitNormalTol = 1e-9;

//! One generated contact: world position, unit outward normal, penetration
//! depth and a stiffness scale factor in [0, 1] (1 means unscaled).
struct ContactPoint {
  Vec3 position = Vec3::Zero();   // m
  Vec3 normal = Vec3::UnitZ();    // unit, points away from the environment
  double depth = 0.0;             // m, >= 0
  double scale = 1.0;             // dimensionless, in [0, 1]

  ContactPoint() = default;

  ContactPoint(const Vec3& p, const Vec3& n, double d, double s = 1.0)
      : position(p), normal(n), depth(d), scale(s) {
    if (std::abs(normal.norm() - 1.0) > kUnitNormalTol)
      throw std::invalid_argument("contact normal must be a unit vector");
    if (!(depth >= 0.0))
      throw std::invalid_argument("contact depth must be >= 0");
    if (!(scale >= 0.0 && scale <= 1.0))
      throw std::invalid_argument("contact scale must lie in [0, 1]");
  }
};

//! Ordered collection of contacts sharing one material (spring stiffness K
//! and damping b). Point order is part of the value and survives
//! serialization unchanged.
struct ContactSet {
  std::vector<ContactPoint> points;
  double stiffness = 1.0;  // K, N/m, > 0
  double damping = 0.0;    // b, N*s/m, >= 0

  ContactSet() = default;

  ContactSet(std::vector<ContactPoint> pts, double k, double b = 0.0)
      : points(std::move(pts)), stiffness(k), damping(b) {
    if (!(stiffness > 0.0))
      throw std::invalid_argument("contact stiffness must be > 0");
    if (!(damping >= 0.0))
      throw std::invalid_argument("contact damping must be >= 0");
  }

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

//! Symmetric positive semi-definite 3x3 net-stiffness matrix (N/m).
class StiffnessMatrix {
 public:
  StiffnessMatrix() : m_(Mat3::Zero()) {}

  explicit StiffnessMatrix(const Mat3& m) : m_(0.5 * (m + m.transpose())) {
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("stiffness matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9)
      throw std::invalid_argument(
          "stiffness matrix must be positive semi-definite");
  }

  const Mat3& matrix() const { return m_; }
  Vec3 diagonal() const { return m_.diagonal(); }

 private:
  Mat3 m_;
};

//! Axis-weighted squared distance between two contacts:
//! ||n_b - n_a||^2 + c * ||p_b - p_a||^2, with c >= 0 in 1/m^2.
inline double axis_distance(const ContactPoint& a, const ContactPoint& b,
                            double c) {
  if (!(c >= 0.0))
    throw std::invalid_argument("axis_distance weight c must be >= 0");
  return (b.normal - a.normal).squaredNorm() +
         c * (b.position - a.position).squaredNorm();
}

//! Contact feature vector [n, p] used by the clustering metric.
inline Vec6 contact_feature(const ContactPoint& p) {
  Vec6 f;
  f.head<3>() = p.normal;
  f.tail<3>() = p.position;
  return f;
}

//! Same metric on raw 6-vector features (normal part first).
inline double feature_distance(const Vec6& a, const Vec6& b, double c) {
  if (!(c >= 0.0))
    throw std::invalid_argument("feature_distance weight c must be >= 0");
  return (b.head<3>() - a.head<3>()).squaredNorm() +
         c * (b.tail<3>() - a.tail<3>()).squaredNorm();
}

//! Net environment stiffness K * sum_i s_i * n_i n_i^T felt across the
//! contact set. Empty sets give the zero matrix.
inline StiffnessMatrix equivalent_stiffness(const ContactSet& set) {
  Mat3 acc = Mat3::Zero();
  for (const ContactPoint& p : set.points)
    acc.noalias() += p.scale * (p.normal * p.normal.transpose());
  return StiffnessMatrix(set.stiffness * acc);
}

//! Per-axis stiffness fractions contributed by one contact:
//! diag(n n^T) = (n_x^2, n_y^2, n_z^2). Components sum to 1.
inline Vec3 axis_stiffness_vector(const ContactPoint& p) {
  return p.normal.cwiseProduct(p.normal);
}

}  // namespace crsim

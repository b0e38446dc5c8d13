#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Quat = Eigen::Quaterniond;

//! Error raised when a configuration document violates the schema.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string key, const std::string& message)
      : std::runtime_error("config key '" + key + "': " + message),
        key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

//! Error raised when an integration step produces a non-finite state.
class SimulationDiverged : public std::runtime_error {
 public:
  explicit SimulationDiverged(std::size_t step)
      : std::runtime_error("simulation diverged at step " +
                           std::to_string(step)),
        step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace crsim

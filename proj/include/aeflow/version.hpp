#pragma once

#include <Eigen/Core>

#include <string>

namespace aeflow {

inline constexpr const char* k_version = "0.1.0";

inline std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
         "." + std::to_string(EIGEN_MINOR_VERSION);
}

}  // namespace aeflow

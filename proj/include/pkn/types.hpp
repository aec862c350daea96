#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pkn {

template <typename T>
using ArrayX_t = Eigen::Array<T, Eigen::Dynamic, 1>;

using Real = double;
using NodalArray = ArrayX_t<Real>;
using Index = Eigen::Index;

/// Invalid user-supplied parameters (mesh sizes, tolerances, scales, ...).
class config_error : public std::invalid_argument {
 public:
  explicit config_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Iterative process failed to converge or produced unusable iterates.
class solver_error : public std::runtime_error {
 public:
  explicit solver_error(const std::string& msg, long time_index = -1)
      : std::runtime_error(msg), time_index(time_index) {}
  long time_index;  // failing time-step index for transient runs, -1 otherwise
};


}  // namespace pkn

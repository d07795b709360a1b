#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace pathspace {

// Small fixed-capacity linear algebra. Every object in the built-in models
// fits in 9 (ambient dimension of the rotation group), so these never touch
// the heap.
inline constexpr int kMaxDim = 9;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

enum class ErrorCode {
  ok = 0,
  invalid_argument = 1,
  constraint_violation = 2,
  not_tangent = 3,
  numerical_failure = 4,
  divergence = 5,
  unknown_check = 6,
  io_failure = 7,
  config = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace pathspace

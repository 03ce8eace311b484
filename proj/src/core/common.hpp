#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace plateau {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown when an input violates an operation's contract (dimensions,
// ranges, unparsable specs).
class invalid_argument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a requested closed form or conversion does not exist for
// the given inputs (e.g. non-zero-mean Gaussian closed form).
class unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an iterate or estimate leaves the representable range.
class numeric_failure : public std::runtime_error {
 public:
  explicit numeric_failure(const std::string& what, std::int64_t iteration = -1)
      : std::runtime_error(what), iteration_(iteration) {}
  std::int64_t iteration() const { return iteration_; }

 private:
  std::int64_t iteration_;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPiSq = 2.0 * kPi * kPi;   // 2*pi^2
inline constexpr double kFourPiSq = 4.0 * kPi * kPi;  // 4*pi^2

}  // namespace plateau

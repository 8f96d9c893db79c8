#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace longmem {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Bad input: a violated precondition that the caller can fix.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A well-formed request that failed while running (solver, I/O, degenerate data).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct BasicTimeSeries {
  Vector<Scalar> values;
  std::string label;

  Eigen::Index n() const { return values.size(); }
};

using TimeSeries = BasicTimeSeries<double>;

template <typename Scalar>
constexpr Scalar kPi = std::numbers::pi_v<Scalar>;

/// Fourier frequency 2*pi*k/n.
template <typename Scalar>
Scalar fourier_frequency(Eigen::Index k, Eigen::Index n) {
  return Scalar(2) * kPi<Scalar> * Scalar(k) / Scalar(n);
}

}  // namespace longmem

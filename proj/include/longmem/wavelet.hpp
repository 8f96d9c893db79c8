#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include "longmem/core.hpp"

namespace longmem {

enum class Boundary { periodic };

struct WaveletSpec {
  std::string name = "haar";
  int nu = 1;  // vanishing moments
  Boundary boundary = Boundary::periodic;
};

/// Detail coefficients w_{jq}, q = 0..2^j - 1, at a single scale.
template <typename Scalar>
struct WaveletCoefficients {
  int scale_j = 0;
  Vector<Scalar> coeffs;
  Eigen::Index source_n = 0;
  WaveletSpec spec;

  Eigen::Index size() const { return coeffs.size(); }
};

/// J with n = 2^J. Non-powers of two are rejected with the neighbouring valid lengths.
inline int max_scale(Eigen::Index n) {
  if (n < 1) throw ValidationError("series length must be positive, got " + std::to_string(n));
  const auto u = static_cast<std::uint64_t>(n);
  if (!std::has_single_bit(u)) {
    const std::uint64_t below = std::bit_floor(u);
    throw ValidationError("series length " + std::to_string(n) +
                          " is not a power of two; nearest valid lengths are " +
                          std::to_string(below) + " and " + std::to_string(below * 2));
  }
  return std::countr_zero(u);
}

/// Haar detail coefficients at the finest scale J:
///   w_{Jq} = 2^{J/2} (y_q - y_{q+1}),  q = 0..n-1,  y_n := y_0.
/// The periodic wrap keeps all 2^J coefficients and the MA(1) structure of
/// the transformed noise.
template <typename Derived>
WaveletCoefficients<typename Derived::Scalar> haar_dwt_finest(const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = y.size();
  const int J = max_scale(n);
  const Scalar norm = std::pow(Scalar(2), Scalar(J) / Scalar(2));

  WaveletCoefficients<Scalar> out;
  out.scale_j = J;
  out.source_n = n;
  out.coeffs.resize(n);
  for (Eigen::Index q = 0; q + 1 < n; ++q) out.coeffs(q) = norm * (y(q) - y(q + 1));
  out.coeffs(n - 1) = norm * (y(n - 1) - y(0));
  return out;
}

template <typename Scalar>
WaveletCoefficients<Scalar> haar_dwt_finest(const BasicTimeSeries<Scalar>& y) {
  return haar_dwt_finest(y.values);
}

/// |psi_hat(lambda)| = (|lambda| / 4) sin^2(lambda/4) / (lambda/4)^2, with the limit 0 at the origin.
template <typename Scalar>
Scalar haar_ft_magnitude(Scalar lambda) {
  if (lambda == Scalar(0)) return Scalar(0);
  const Scalar x = lambda / Scalar(4);
  const Scalar sinc = std::sin(x) / x;
  return std::abs(lambda) / Scalar(4) * sinc * sinc;
}

}  // namespace longmem

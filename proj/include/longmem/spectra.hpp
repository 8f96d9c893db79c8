#pragma once

#include <complex>
#include <string>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "longmem/lad.hpp"
#include "longmem/wavelet.hpp"

namespace longmem {

enum class PeriodogramKind { ordinary, wavelet_ols, nkk_lad };

inline std::string to_string(PeriodogramKind kind) {
  switch (kind) {
    case PeriodogramKind::ordinary: return "ordinary";
    case PeriodogramKind::wavelet_ols: return "wavelet-ols";
    case PeriodogramKind::nkk_lad: return "nkk";
  }
  return "unknown";
}

/// Ordinates at the Fourier frequencies lambda_k = 2 pi k / n, k = 1..m.
template <typename Scalar>
struct Periodogram {
  Vector<Scalar> freqs;
  Vector<Scalar> ordinates;
  /// False where the underlying fit did not certify convergence.
  Eigen::Array<bool, Eigen::Dynamic, 1> converged;
  PeriodogramKind kind = PeriodogramKind::ordinary;
  Eigen::Index n = 0;

  Eigen::Index m() const { return ordinates.size(); }

  /// Keeps k = 1..m_new.
  Periodogram head(Eigen::Index m_new) const {
    return {freqs.head(m_new), ordinates.head(m_new), converged.head(m_new), kind, n};
  }
};

template <typename Scalar>
using HarmonicFit = LadResult<Scalar>;

/// Largest admissible bandwidth, floor((n - 1) / 2).
inline Eigen::Index max_bandwidth(Eigen::Index n) { return (n - 1) / 2; }

inline void check_bandwidth(Eigen::Index n, Eigen::Index m) {
  if (m < 1 || m > max_bandwidth(n))
    throw ValidationError("bandwidth m = " + std::to_string(m) + " outside 1.." +
                          std::to_string(max_bandwidth(n)) + " for n = " + std::to_string(n));
}

inline void check_harmonic_index(Eigen::Index n, Eigen::Index k) {
  if (k < 1 || 2 * k >= n)
    throw ValidationError("frequency index k = " + std::to_string(k) + " must satisfy 1 <= k < n/2 (n = " +
                          std::to_string(n) + "); the sine regressor degenerates at k = 0 and k = n/2");
}

/// Harmonic regressors h_q(lambda_k) = [cos(lambda_k q), sin(lambda_k q)] on
/// q = 0..n-1, read from one table of the n-th roots of unity so the
/// argument lambda_k q is reduced exactly as (k q mod n).
template <typename Scalar>
class HarmonicBasis {
 public:
  explicit HarmonicBasis(Eigen::Index n) : n_(n), cos_(n), sin_(n) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Scalar angle = fourier_frequency<Scalar>(j, n);
      cos_(j) = std::cos(angle);
      sin_(j) = std::sin(angle);
    }
  }

  Eigen::Index n() const { return n_; }

  Design2<Scalar> design(Eigen::Index k) const {
    check_harmonic_index(n_, k);
    Design2<Scalar> X(n_, 2);
    Eigen::Index idx = 0;
    for (Eigen::Index q = 0; q < n_; ++q) {
      X(q, 0) = cos_(idx);
      X(q, 1) = sin_(idx);
      idx += k;
      if (idx >= n_) idx -= n_;
    }
    return X;
  }

 private:
  Eigen::Index n_;
  Vector<Scalar> cos_;
  Vector<Scalar> sin_;
};

/// Least squares fit of w on the harmonic pair at lambda_k. At Fourier
/// frequencies off 0 and pi the regressors are orthogonal with squared norm
/// n/2, so beta = (2/n) sum_q w_q h_q.
template <typename Scalar>
HarmonicFit<Scalar> ols_harmonic_fit(const Vector<Scalar>& w, Eigen::Index k, const HarmonicBasis<Scalar>& basis) {
  const Design2<Scalar> X = basis.design(k);
  HarmonicFit<Scalar> fit;
  fit.beta = (Scalar(2) / Scalar(w.size())) * (X.transpose() * w);
  fit.objective = (w - X * fit.beta).squaredNorm();
  fit.converged = true;
  return fit;
}

template <typename Scalar>
HarmonicFit<Scalar> ols_harmonic_fit(const WaveletCoefficients<Scalar>& w, Eigen::Index k) {
  return ols_harmonic_fit(w.coeffs, k, HarmonicBasis<Scalar>(w.size()));
}

template <typename Scalar>
HarmonicFit<Scalar> lad_harmonic_fit(const Vector<Scalar>& w, Eigen::Index k, const HarmonicBasis<Scalar>& basis,
                                     const LadOptions& opt = {}) {
  return lad_regression<Scalar>(basis.design(k), w, opt);
}

template <typename Scalar>
HarmonicFit<Scalar> lad_harmonic_fit(const WaveletCoefficients<Scalar>& w, Eigen::Index k, double tol) {
  LadOptions opt;
  opt.tol = tol;
  return lad_harmonic_fit(w.coeffs, k, HarmonicBasis<Scalar>(w.size()), opt);
}

/// I(lambda_k) = |sum_t x_t e^{i t lambda_k}|^2 / (2 pi n) via FFT.
template <typename Derived>
Periodogram<typename Derived::Scalar> ordinary_periodogram(const Eigen::MatrixBase<Derived>& x, Eigen::Index m,
                                                           bool demean = false) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  check_bandwidth(n, m);
  std::vector<Scalar> in(static_cast<std::size_t>(n));
  Eigen::Map<Vector<Scalar>>(in.data(), n) = x;
  if (demean) {
    const Scalar mean = x.mean();
    for (auto& v : in) v -= mean;
  }
  std::vector<std::complex<Scalar>> spectrum;
  Eigen::FFT<Scalar> fft;
  fft.fwd(spectrum, in);

  Periodogram<Scalar> p;
  p.kind = PeriodogramKind::ordinary;
  p.n = n;
  p.freqs.resize(m);
  p.ordinates.resize(m);
  p.converged.setConstant(m, true);
  const Scalar denom = Scalar(2) * kPi<Scalar> * Scalar(n);
  for (Eigen::Index k = 1; k <= m; ++k) {
    p.freqs(k - 1) = fourier_frequency<Scalar>(k, n);
    p.ordinates(k - 1) = std::norm(spectrum[std::size_t(k)]) / denom;
  }
  return p;
}

template <typename Scalar>
Periodogram<Scalar> ordinary_periodogram(const BasicTimeSeries<Scalar>& x, Eigen::Index m, bool demean = false) {
  return ordinary_periodogram(x.values, m, demean);
}

namespace detail {

template <typename Scalar, typename Fit>
Periodogram<Scalar> harmonic_periodogram(const WaveletCoefficients<Scalar>& w, Eigen::Index m, PeriodogramKind kind,
                                         Fit&& fit) {
  const Eigen::Index n = w.size();
  check_bandwidth(n, m);
  const HarmonicBasis<Scalar> basis(n);
  const Scalar scale = Scalar(n) / (Scalar(8) * kPi<Scalar>);
  Periodogram<Scalar> p;
  p.kind = kind;
  p.n = n;
  p.freqs.resize(m);
  p.ordinates.resize(m);
  p.converged.resize(m);
  for (Eigen::Index k = 1; k <= m; ++k) {
    const HarmonicFit<Scalar> f = fit(basis, k);
    p.freqs(k - 1) = fourier_frequency<Scalar>(k, n);
    p.ordinates(k - 1) = scale * f.beta.squaredNorm();
    p.converged(k - 1) = f.converged;
  }
  return p;
}

}  // namespace detail

/// Wavelet periodogram I_k = (n / 8 pi) ||beta_OLS(lambda_k)||^2.
template <typename Scalar>
Periodogram<Scalar> wavelet_ols_periodogram(const WaveletCoefficients<Scalar>& w, Eigen::Index m) {
  return detail::harmonic_periodogram(w, m, PeriodogramKind::wavelet_ols,
                                      [&](const HarmonicBasis<Scalar>& basis, Eigen::Index k) {
                                        return ols_harmonic_fit(w.coeffs, k, basis);
                                      });
}

/// NKK periodogram N_k = (n / 8 pi) ||beta_LAD(lambda_k)||^2. Non-converged
/// fits keep their best iterate and are flagged in `converged`.
template <typename Scalar>
Periodogram<Scalar> nkk_periodogram(const WaveletCoefficients<Scalar>& w, Eigen::Index m, const LadOptions& opt) {
  return detail::harmonic_periodogram(w, m, PeriodogramKind::nkk_lad,
                                      [&](const HarmonicBasis<Scalar>& basis, Eigen::Index k) {
                                        return lad_harmonic_fit(w.coeffs, k, basis, opt);
                                      });
}

template <typename Scalar>
Periodogram<Scalar> nkk_periodogram(const WaveletCoefficients<Scalar>& w, Eigen::Index m, double tol = 1e-9) {
  LadOptions opt;
  opt.tol = tol;
  return nkk_periodogram(w, m, opt);
}

}  // namespace longmem

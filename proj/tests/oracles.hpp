#pragma once

// Reference computations used only by the tests. Each one takes a different
// route from the library code it checks: direct O(n^2) sums instead of FFTs,
// vertex enumeration instead of descent, multiprecision products instead of
// recurrences.

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// |sum_{t=1}^{n} x_t e^{i t lambda_k}|^2 / (2 pi n) by direct summation in long double.
inline double periodogram_direct(const Eigen::VectorXd& x, long k) {
  const long n = long(x.size());
  const long double pi = std::numbers::pi_v<long double>;
  long double re = 0, im = 0;
  for (long t = 1; t <= n; ++t) {
    const long double angle = 2 * pi * (long double)((k * t) % n) / n;
    re += x(t - 1) * std::cos(angle);
    im += x(t - 1) * std::sin(angle);
  }
  return double((re * re + im * im) / (2 * pi * n));
}

/// (d)_k / k! as a 50-digit product of k factors (d + i) / (i + 1).
inline double pochhammer_mp(double d, long k) {
  using boost::multiprecision::cpp_dec_float_50;
  cpp_dec_float_50 acc = 1;
  for (long i = 0; i < k; ++i) acc *= (cpp_dec_float_50(d) + i) / (i + 1);
  return acc.convert_to<double>();
}

struct LadOptimum {
  double objective = std::numeric_limits<double>::infinity();
  Eigen::Vector2d beta = Eigen::Vector2d::Zero();
};

/// Exact L1 regression by enumerating every basic solution: some minimizer
/// interpolates two rows with independent regressors, so the best pair wins.
inline LadOptimum lad_by_vertex_enumeration(const Eigen::MatrixX2d& X, const Eigen::VectorXd& w) {
  LadOptimum best;
  const long n = long(X.rows());
  for (long i = 0; i < n; ++i) {
    for (long j = i + 1; j < n; ++j) {
      Eigen::Matrix2d A;
      A.row(0) = X.row(i);
      A.row(1) = X.row(j);
      if (std::abs(A.determinant()) < 1e-12) continue;
      const Eigen::Vector2d b = A.fullPivLu().solve(Eigen::Vector2d(w(i), w(j)));
      long double obj = 0;
      for (long q = 0; q < n; ++q) obj += std::abs((long double)w(q) - (long double)X.row(q).dot(b));
      if (double(obj) < best.objective) {
        best.objective = double(obj);
        best.beta = b;
      }
    }
  }
  return best;
}

/// Harmonic design at Fourier index k, computed from scratch.
inline Eigen::MatrixX2d harmonic_design(long n, long k) {
  Eigen::MatrixX2d X(n, 2);
  for (long q = 0; q < n; ++q) {
    const double angle = 2.0 * std::numbers::pi * double(k) * double(q) / double(n);
    X(q, 0) = std::cos(angle);
    X(q, 1) = std::sin(angle);
  }
  return X;
}

/// Two-pass textbook OLS slope.
inline double ols_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double mx = x.mean(), my = y.mean();
  double sxy = 0, sxx = 0;
  for (long i = 0; i < x.size(); ++i) {
    sxy += (x(i) - mx) * (y(i) - my);
    sxx += (x(i) - mx) * (x(i) - mx);
  }
  return sxy / sxx;
}

/// Spearman rank correlation (no ties expected).
inline double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  auto ranks = [](const Eigen::VectorXd& v) {
    std::vector<long> idx(std::size_t(v.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = long(i);
    std::sort(idx.begin(), idx.end(), [&](long i, long j) { return v(i) < v(j); });
    Eigen::VectorXd r(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r(idx[i]) = double(i);
    return r;
  };
  const Eigen::VectorXd ra = ranks(a), rb = ranks(b);
  const double ma = ra.mean(), mb = rb.mean();
  return ((ra.array() - ma) * (rb.array() - mb)).sum() /
         std::sqrt((ra.array() - ma).square().sum() * (rb.array() - mb).square().sum());
}

/// Spectral density of the log-squared LMSV series: ARFIMA(1,d,0) latent part
/// plus the flat floor of log e^2, whose variance is pi^2/2 for Gaussian e.
inline double lmsv_log_spectrum(double lambda, double d, double phi, double sigma_eps2) {
  const double pi = std::numbers::pi;
  const std::complex<double> ar = 1.0 - phi * std::polar(1.0, lambda);
  const double latent = sigma_eps2 / (2 * pi) / std::norm(ar) * std::pow(2 * std::sin(lambda / 2), -2 * d);
  return latent + (pi * pi / 2) / (2 * pi);
}

/// Value the wavelet log-periodogram regression converges to when fed the
/// exact spectrum of the Haar coefficients, 4 sin^2(lambda/2) f_Y(lambda),
/// instead of periodogram ordinates.
inline double wavelet_pseudo_true_d(long n, long m, double d, double phi, double sigma_eps2) {
  Eigen::VectorXd x(m), y(m);
  for (long k = 1; k <= m; ++k) {
    const double lam = 2 * std::numbers::pi * double(k) / double(n);
    x(k - 1) = -2 * std::log(lam);
    y(k - 1) = std::log(4 * std::pow(std::sin(lam / 2), 2) * lmsv_log_spectrum(lam, d, phi, sigma_eps2));
  }
  return ols_slope(x, y) + 1;
}

inline double lag_autocorrelation(const Eigen::VectorXd& x, long lag) {
  const double m = x.mean();
  double num = 0, den = 0;
  for (long t = 0; t < x.size(); ++t) {
    den += (x(t) - m) * (x(t) - m);
    if (t + lag < x.size()) num += (x(t) - m) * (x(t + lag) - m);
  }
  return num / den;
}

inline double kurtosis(const Eigen::VectorXd& x) {
  const double m = x.mean();
  const double m2 = (x.array() - m).square().mean();
  const double m4 = (x.array() - m).pow(4).mean();
  return m4 / (m2 * m2);
}

}  // namespace oracle

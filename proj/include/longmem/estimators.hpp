#pragma once

#include <string>
#include <utility>
#include <vector>

#include "longmem/spectra.hpp"

namespace longmem {

enum class Method { gph, wblp, nkk };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::gph: return "gph";
    case Method::wblp: return "wblp";
    case Method::nkk: return "nkk";
  }
  return "unknown";
}

inline Method parse_method(const std::string& s) {
  if (s == "gph") return Method::gph;
  if (s == "wblp") return Method::wblp;
  if (s == "nkk") return Method::nkk;
  throw ValidationError("unknown method '" + s + "', expected one of gph, wblp, nkk");
}

enum class RegressorKind { gph_R, wavelet_X };

template <typename Scalar>
struct RegressorSet {
  RegressorKind kind = RegressorKind::gph_R;
  Vector<Scalar> values;
  Scalar mean = 0;
};

struct MemoryEstimate {
  double d_hat = 0;
  Method method = Method::gph;
  Eigen::Index m = 0;
  double intercept = 0;
  double se_asymptotic = 0;
  Eigen::Index skipped_k = 0;
  /// NKK has no variance constant of its own; it reuses the WBLP one.
  bool se_borrowed = false;
};

/// s(0) and s''(0) of the short-memory factor s = f_u h.
struct SpectralCurvature {
  double s0 = 1;
  double s2 = 1;
};

template <typename Scalar>
Scalar gph_regressor(Scalar lambda) {
  const Scalar s = std::sin(lambda / Scalar(2));
  return -std::log(Scalar(4) * s * s);
}

/// R_k = -log[4 sin^2(lambda_k / 2)], k = 1..m.
template <typename Scalar = double>
RegressorSet<Scalar> gph_regressors(Eigen::Index n, Eigen::Index m) {
  check_bandwidth(n, m);
  RegressorSet<Scalar> r;
  r.kind = RegressorKind::gph_R;
  r.values.resize(m);
  for (Eigen::Index k = 1; k <= m; ++k) r.values(k - 1) = gph_regressor(fourier_frequency<Scalar>(k, n));
  r.mean = r.values.mean();
  return r;
}

/// X_k = -2 log(lambda_k) on the given frequencies.
template <typename Scalar>
RegressorSet<Scalar> wavelet_regressors(const Vector<Scalar>& freqs) {
  RegressorSet<Scalar> r;
  r.kind = RegressorKind::wavelet_X;
  r.values = Scalar(-2) * freqs.array().log().matrix();
  r.mean = r.values.size() ? r.values.mean() : Scalar(0);
  return r;
}

template <typename Scalar = double>
RegressorSet<Scalar> wavelet_regressors(Eigen::Index n, Eigen::Index m) {
  check_bandwidth(n, m);
  Vector<Scalar> freqs(m);
  for (Eigen::Index k = 1; k <= m; ++k) freqs(k - 1) = fourier_frequency<Scalar>(k, n);
  return wavelet_regressors<Scalar>(freqs);
}

/// sum (x_k - xbar)(y_k - ybar)
template <typename Scalar>
Scalar centered_cross(const Vector<Scalar>& x, const Vector<Scalar>& y) {
  return ((x.array() - x.mean()) * (y.array() - y.mean())).sum();
}

/// sum y_k (x_k - xbar); equal to centered_cross because the deviations of x sum to zero.
template <typename Scalar>
Scalar half_centered_cross(const Vector<Scalar>& x, const Vector<Scalar>& y) {
  return ((x.array() - x.mean()) * y.array()).sum();
}

template <typename Scalar>
struct LogRegression {
  Scalar slope = 0;
  Scalar intercept = 0;
  /// sum (x_k - xbar)^2 over the frequencies used
  Scalar sxx = 0;
  Eigen::Index used = 0;
  Eigen::Index skipped = 0;
};

/// OLS of log(ordinate_k) on regressor_k. Frequencies whose ordinate is not
/// positive and finite, or whose fit did not converge, are dropped and counted.
template <typename Scalar>
LogRegression<Scalar> log_periodogram_slope(const Periodogram<Scalar>& p, const RegressorSet<Scalar>& reg) {
  if (p.m() != reg.values.size())
    throw ValidationError("periodogram has " + std::to_string(p.m()) + " ordinates but " +
                          std::to_string(reg.values.size()) + " regressors");
  std::vector<Eigen::Index> keep;
  keep.reserve(std::size_t(p.m()));
  for (Eigen::Index k = 0; k < p.m(); ++k) {
    const Scalar v = p.ordinates(k);
    const bool ok = (p.converged.size() == 0 || p.converged(k)) && v > Scalar(0) && std::isfinite(v);
    if (ok) keep.push_back(k);
  }
  LogRegression<Scalar> out;
  out.used = Eigen::Index(keep.size());
  out.skipped = p.m() - out.used;
  if (out.used < 2)
    throw RuntimeError("log-periodogram regression needs at least 2 usable ordinates, got " +
                       std::to_string(out.used) + " of " + std::to_string(p.m()));

  Vector<Scalar> x(out.used), y(out.used);
  for (Eigen::Index i = 0; i < out.used; ++i) {
    x(i) = reg.values(keep[std::size_t(i)]);
    y(i) = std::log(p.ordinates(keep[std::size_t(i)]));
  }
  const Scalar xbar = x.mean();
  out.sxx = (x.array() - xbar).square().sum();
  if (!(out.sxx > Scalar(0))) throw RuntimeError("regressors have zero spread");
  out.slope = half_centered_cross(x, y) / out.sxx;
  out.intercept = y.mean() - out.slope * xbar;
  return out;
}

/// GPH estimate from an ordinary periodogram: slope of log I on R_k.
template <typename Scalar>
MemoryEstimate gph_from_periodogram(const Periodogram<Scalar>& p) {
  const auto reg = log_periodogram_slope(p, gph_regressors<Scalar>(p.n, p.m()));
  MemoryEstimate e;
  e.method = Method::gph;
  e.m = p.m();
  e.d_hat = double(reg.slope);
  e.intercept = double(reg.intercept);
  e.se_asymptotic = std::sqrt(double(kPi<Scalar> * kPi<Scalar> / Scalar(6) / reg.sxx));
  e.skipped_k = reg.skipped;
  return e;
}

/// Fraction of frequencies NKK may drop before the estimate is refused.
inline constexpr double kMaxSkippedFraction = 0.2;

/// Shared WBLP / NKK regression: d = slope(log P_k on -2 log lambda_k) + 1.
template <typename Scalar>
MemoryEstimate wavelet_log_regression(const Periodogram<Scalar>& p, Method method) {
  const auto reg = log_periodogram_slope(p, wavelet_regressors<Scalar>(p.freqs));
  if (method == Method::nkk && double(reg.skipped) > kMaxSkippedFraction * double(p.m()))
    throw RuntimeError("NKK estimate untrustworthy: " + std::to_string(reg.skipped) + " of " +
                       std::to_string(p.m()) + " frequencies skipped");
  MemoryEstimate e;
  e.method = method;
  e.m = p.m();
  e.d_hat = double(reg.slope) + 1.0;
  e.intercept = double(reg.intercept);
  e.se_asymptotic = std::sqrt(double(kPi<Scalar> * kPi<Scalar>) / (24.0 * double(p.m())));
  e.skipped_k = reg.skipped;
  e.se_borrowed = method == Method::nkk;
  return e;
}

template <typename Scalar>
MemoryEstimate estimate_gph(const BasicTimeSeries<Scalar>& x, Eigen::Index m, bool demean = false) {
  if (m < 2) throw ValidationError("bandwidth m must be at least 2 for a regression");
  return gph_from_periodogram(ordinary_periodogram(x, m, demean));
}

template <typename Scalar>
MemoryEstimate estimate_wblp(const BasicTimeSeries<Scalar>& y, Eigen::Index m) {
  if (m < 2) throw ValidationError("bandwidth m must be at least 2 for a regression");
  return wavelet_log_regression(wavelet_ols_periodogram(haar_dwt_finest(y), m), Method::wblp);
}

template <typename Scalar>
MemoryEstimate estimate_nkk(const BasicTimeSeries<Scalar>& y, Eigen::Index m, const LadOptions& opt) {
  if (m < 2) throw ValidationError("bandwidth m must be at least 2 for a regression");
  return wavelet_log_regression(nkk_periodogram(haar_dwt_finest(y), m, opt), Method::nkk);
}

template <typename Scalar>
MemoryEstimate estimate_nkk(const BasicTimeSeries<Scalar>& y, Eigen::Index m, double tol = 1e-9) {
  LadOptions opt;
  opt.tol = tol;
  return estimate_nkk(y, m, opt);
}

/// Integer part of x; values within 1e-9 below an integer count as that
/// integer so that exact powers such as 1024^0.3 = 8 survive rounding in pow.
inline Eigen::Index integer_part(double x) { return Eigen::Index(std::floor(x + 1e-9)); }

/// m* = [0.4634 (s(0) / s''(0))^{2/5} n^{4/5}]. The ratio enters squared, so
/// its sign does not matter.
Eigen::Index optimal_bandwidth(const SpectralCurvature& curv, Eigen::Index n);

/// ([n^lo_exp], [n^hi_exp]) before any clipping.
std::pair<Eigen::Index, Eigen::Index> bandwidth_range(Eigen::Index n, double lo_exp, double hi_exp);

/// Every integer m from [n^lo_exp] to [n^hi_exp], clipped to 2..floor((n-1)/2).
std::vector<Eigen::Index> bandwidth_grid(Eigen::Index n, double lo_exp, double hi_exp);

}  // namespace longmem

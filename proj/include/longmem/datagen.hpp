#pragma once

#include <cstdint>
#include <random>

#include "longmem/core.hpp"

namespace longmem {

/// Independent random streams drawn from one seed. Each (seed, replication,
/// stream) triple keys its own engine, so draws never depend on the order in
/// which replications or streams are consumed.
enum class Stream : std::uint32_t {
  latent = 1,       // u_t feeding the fractional series
  observation = 2,  // e_t multiplying the volatility
  auxiliary = 3,    // diagnostics and tests
};

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t replication, Stream stream);

enum class NoiseKind { gaussian, student_t };

struct GenConfig {
  Eigen::Index n = 1024;
  double d = 0.2;
  double phi = 0.0;
  double sigma_eps2 = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  /// Samples generated and discarded ahead of the returned window.
  Eigen::Index burn_in = 0;
  NoiseKind noise = NoiseKind::gaussian;
  double student_df = 5.0;

  /// Throws ValidationError on n < 2, |phi| >= 1, sigma_eps2 <= 0 or sigma <= 0.
  void validate() const;
  /// Adds the LMSV range check 0 <= d < 0.5.
  void validate_lmsv() const;
};

/// (d)_k / k!, by the recurrence c_k = c_{k-1} (d + k - 1) / k.
double pochhammer_weight(double d, Eigen::Index k);

/// The first `count` weights c_0..c_{count-1}.
Vector<double> pochhammer_weights(double d, Eigen::Index count);

/// Z_t = sum_{k=0}^{t-1} c_k u_{t-k}, the truncated fractional-integration
/// series. Sample t only sees innovations up to t.
Vector<double> fractional_filter(double d, const Vector<double>& innovations);

/// x_t = phi x_{t-1} + v_t started from x_{-1} = 0.
Vector<double> ar1_filter(double phi, const Vector<double>& v);

TimeSeries fractional_noise(double d, Eigen::Index n, std::uint64_t seed);

/// ARFIMA(1,d,0) driven by explicit innovations (already scaled).
Vector<double> arfima_from_innovations(double d, double phi, const Vector<double>& innovations);

/// (1 - phi L)(1 - L)^d Z_t = eps_t with Var(eps) = sigma_eps2, latent stream only.
TimeSeries arfima_1_d_0(const GenConfig& cfg);

/// X_t = sigma exp(Z_t / 2) e_t.
Vector<double> lmsv_from_latent(double sigma, const Vector<double>& latent, const Vector<double>& noise);

/// LMSV series with Z from arfima_1_d_0(cfg) and e_t from the observation stream.
TimeSeries lmsv_series(const GenConfig& cfg);

/// Y_t = log(X_t^2). Throws ValidationError naming the first zero sample.
TimeSeries log_squared(const TimeSeries& x);

}  // namespace longmem

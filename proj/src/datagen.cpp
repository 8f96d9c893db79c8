#include "longmem/datagen.hpp"

#include <array>
#include <sstream>

namespace longmem {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t replication, Stream stream) {
  const std::array<std::uint32_t, 6> key = {
      static_cast<std::uint32_t>(seed),
      static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(replication),
      static_cast<std::uint32_t>(replication >> 32),
      static_cast<std::uint32_t>(stream),
      0x6c6d656du,  // "lmem"
  };
  std::seed_seq seq(key.begin(), key.end());
  return std::mt19937_64(seq);
}

void GenConfig::validate() const {
  if (n < 2) throw ValidationError("n must be at least 2, got " + std::to_string(n));
  if (!(std::abs(phi) < 1.0))
    throw ValidationError("|phi| must be < 1 for a stationary AR factor, got phi = " + std::to_string(phi));
  if (!(sigma_eps2 > 0.0)) throw ValidationError("sigma_eps2 must be positive");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (!std::isfinite(d)) throw ValidationError("d must be finite");
  if (burn_in < 0) throw ValidationError("burn_in must be non-negative");
  if (noise == NoiseKind::student_t && !(student_df > 0.0))
    throw ValidationError("student-t degrees of freedom must be positive");
}

void GenConfig::validate_lmsv() const {
  validate();
  if (!(d >= 0.0 && d < 0.5))
    throw ValidationError("LMSV requires d in [0, 0.5), got d = " + std::to_string(d));
}

double pochhammer_weight(double d, Eigen::Index k) {
  if (k < 0) throw ValidationError("pochhammer index must be non-negative, got " + std::to_string(k));
  double c = 1.0;
  for (Eigen::Index i = 1; i <= k; ++i) c *= (d + double(i - 1)) / double(i);
  return c;
}

Vector<double> pochhammer_weights(double d, Eigen::Index count) {
  Vector<double> c(count);
  if (count == 0) return c;
  c(0) = 1.0;
  for (Eigen::Index k = 1; k < count; ++k) c(k) = c(k - 1) * (d + double(k - 1)) / double(k);
  return c;
}

Vector<double> fractional_filter(double d, const Vector<double>& innovations) {
  const Eigen::Index n = innovations.size();
  const Vector<double> c = pochhammer_weights(d, n);
  Vector<double> z(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    // c_0..c_t against u_t..u_0
    z(t) = c.head(t + 1).dot(innovations.head(t + 1).reverse());
  }
  return z;
}

Vector<double> ar1_filter(double phi, const Vector<double>& v) {
  Vector<double> x(v.size());
  double prev = 0.0;
  for (Eigen::Index t = 0; t < v.size(); ++t) {
    prev = phi * prev + v(t);
    x(t) = prev;
  }
  return x;
}

namespace {

Vector<double> gaussian_draws(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<double> u(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = normal(rng);
  return u;
}

Vector<double> observation_draws(const GenConfig& cfg, Eigen::Index n) {
  auto rng = substream(cfg.seed, cfg.replication, Stream::observation);
  if (cfg.noise == NoiseKind::gaussian) return gaussian_draws(rng, n);
  std::student_t_distribution<double> t(cfg.student_df);
  Vector<double> e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = t(rng);
  return e;
}

}  // namespace

TimeSeries fractional_noise(double d, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("n must be positive");
  auto rng = substream(seed, 0, Stream::latent);
  std::ostringstream label;
  label << "fractional(d=" << d << ",seed=" << seed << ")";
  return {fractional_filter(d, gaussian_draws(rng, n)), label.str()};
}

Vector<double> arfima_from_innovations(double d, double phi, const Vector<double>& innovations) {
  return ar1_filter(phi, fractional_filter(d, innovations));
}

TimeSeries arfima_1_d_0(const GenConfig& cfg) {
  cfg.validate();
  const Eigen::Index total = cfg.n + cfg.burn_in;
  auto rng = substream(cfg.seed, cfg.replication, Stream::latent);
  const Vector<double> eps = std::sqrt(cfg.sigma_eps2) * gaussian_draws(rng, total);
  const Vector<double> z = arfima_from_innovations(cfg.d, cfg.phi, eps);
  std::ostringstream label;
  label << "arfima(d=" << cfg.d << ",phi=" << cfg.phi << ",sigma_eps2=" << cfg.sigma_eps2
        << ",seed=" << cfg.seed << ",rep=" << cfg.replication << ")";
  return {z.tail(cfg.n), label.str()};
}

Vector<double> lmsv_from_latent(double sigma, const Vector<double>& latent, const Vector<double>& noise) {
  if (latent.size() != noise.size()) throw ValidationError("latent and noise lengths differ");
  return sigma * ((0.5 * latent.array()).exp() * noise.array()).matrix();
}

TimeSeries lmsv_series(const GenConfig& cfg) {
  cfg.validate_lmsv();
  const TimeSeries z = arfima_1_d_0(cfg);
  const Vector<double> e = observation_draws(cfg, cfg.n + cfg.burn_in).tail(cfg.n);
  std::ostringstream label;
  label << "lmsv(d=" << cfg.d << ",phi=" << cfg.phi << ",sigma_eps2=" << cfg.sigma_eps2
        << ",sigma=" << cfg.sigma << ",seed=" << cfg.seed << ",rep=" << cfg.replication << ")";
  return {lmsv_from_latent(cfg.sigma, z.values, e), label.str()};
}

TimeSeries log_squared(const TimeSeries& x) {
  for (Eigen::Index t = 0; t < x.n(); ++t) {
    if (x.values(t) == 0.0)
      throw ValidationError("log_squared: sample at index " + std::to_string(t) +
                            " is zero, log(0) is undefined");
  }
  return {x.values.array().square().log().matrix(), "logsq(" + x.label + ")"};
}

}  // namespace longmem

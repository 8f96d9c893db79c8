#include <doctest.h>

#include <cmath>
#include <numbers>

#include "longmem/datagen.hpp"
#include "oracles.hpp"

using namespace longmem;

TEST_CASE("pochhammer weights") {
  CHECK(pochhammer_weight(0.3, 0) == 1.0);
  CHECK(pochhammer_weight(0.2, 2) == doctest::Approx(0.12).epsilon(1e-15));
  const double mp = oracle::pochhammer_mp(0.45, 50);
  CHECK(std::abs(pochhammer_weight(0.45, 50) - mp) <= 1e-13 * mp);

  const Vector<double> c = pochhammer_weights(0.3, 4);
  CHECK(c(0) == 1.0);
  CHECK(c(1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(c(2) == doctest::Approx(0.195).epsilon(1e-15));
  CHECK(c(3) == doctest::Approx(0.1495).epsilon(1e-15));
  CHECK_THROWS_AS(pochhammer_weight(0.3, -1), ValidationError);
}

TEST_CASE("weights are positive and shrinking for d in (0,1)") {
  for (double d : {0.01, 0.2, 0.45, 0.7, 0.99}) {
    const Vector<double> c = pochhammer_weights(d, 400);
    for (Eigen::Index k = 1; k < c.size(); ++k) {
      CHECK(c(k) > 0.0);
      CHECK(c(k) / c(k - 1) < 1.0);
    }
  }
}

TEST_CASE("fractional filter impulse response") {
  Vector<double> u(4);
  u << 1, 0, 0, 0;
  const Vector<double> z = fractional_filter(0.3, u);
  const double expect[] = {1, 0.3, 0.195, 0.1495};
  for (int t = 0; t < 4; ++t) CHECK(z(t) == doctest::Approx(expect[t]).epsilon(1e-14));
}

TEST_CASE("d = 0 leaves the innovations untouched") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Vector<double> u(257);
  for (auto& v : u) v = g(rng);
  CHECK(fractional_filter(0.0, u) == u);

  const TimeSeries z = fractional_noise(0.0, 128, 11);
  auto s = substream(11, 0, Stream::latent);
  std::normal_distribution<double> g2;
  Vector<double> draws(128);
  for (auto& v : draws) v = g2(s);
  CHECK(z.values == draws);
}

TEST_CASE("AR(1) impulse response") {
  Vector<double> e(3);
  e << 1, 0, 0;
  const Vector<double> z = arfima_from_innovations(0.0, 0.5, e);
  CHECK(z(0) == 1.0);
  CHECK(z(1) == 0.5);
  CHECK(z(2) == 0.25);
  CHECK(ar1_filter(0.5, e) == z);
}

TEST_CASE("arfima with phi = 0 and unit variance is fractional noise") {
  GenConfig cfg;
  cfg.n = 300;
  cfg.d = 0.3;
  cfg.seed = 42;
  CHECK(arfima_1_d_0(cfg).values == fractional_noise(0.3, 300, 42).values);
}

TEST_CASE("fractional noise is centred") {
  // 100 independent series; the grand mean of their sample means is compared
  // with the spread of those means.
  const int seeds = 100;
  Eigen::VectorXd means(seeds);
  for (int s = 0; s < seeds; ++s) means(s) = fractional_noise(0.3, 1024, std::uint64_t(1000 + s)).values.mean();
  const double grand = means.mean();
  const double sd = std::sqrt((means.array() - grand).square().sum() / (seeds - 1));
  CHECK(std::abs(grand) < 4 * sd / std::sqrt(double(seeds)));
}

TEST_CASE("AR factor raises lag-1 autocorrelation") {
  double with_ar = 0, without = 0;
  for (int s = 0; s < 100; ++s) {
    GenConfig cfg;
    cfg.n = 1024;
    cfg.d = 0.3;
    cfg.seed = std::uint64_t(s);
    cfg.phi = 0.4;
    with_ar += oracle::lag_autocorrelation(arfima_1_d_0(cfg).values, 1);
    cfg.phi = 0.0;
    without += oracle::lag_autocorrelation(arfima_1_d_0(cfg).values, 1);
  }
  CHECK(with_ar > 0);
  CHECK(with_ar > without);
}

TEST_CASE("lmsv scaling") {
  Vector<double> z = Vector<double>::Zero(2), e(2);
  e << 1, -1;
  CHECK(lmsv_from_latent(1.0, z, e) == e);
  const Vector<double> x = lmsv_from_latent(2.0, z, e);
  CHECK(x(0) == 2.0);
  CHECK(x(1) == -2.0);
}

TEST_CASE("lmsv returns are leptokurtic") {
  double k = 0;
  for (int s = 0; s < 100; ++s) {
    GenConfig cfg;
    cfg.d = 0.2;
    cfg.phi = 0.4;
    cfg.seed = std::uint64_t(s);
    k += oracle::kurtosis(lmsv_series(cfg).values);
  }
  CHECK(k / 100 > 3.0);
}

TEST_CASE("log_squared") {
  TimeSeries x;
  x.values.resize(3);
  x.values << 1, std::numbers::e, -std::numbers::e;
  const TimeSeries y = log_squared(x);
  CHECK(y.values(0) == 0.0);
  CHECK(y.values(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(y.values(2) == doctest::Approx(2.0).epsilon(1e-15));

  TimeSeries bad;
  bad.values.resize(2);
  bad.values << 0, 1;
  CHECK_THROWS_WITH_AS(log_squared(bad), doctest::Contains("index 0"), ValidationError);

  GenConfig cfg;
  cfg.n = 512;
  cfg.d = 0.3;
  cfg.seed = 9;
  CHECK(log_squared(lmsv_series(cfg)).values.allFinite());
}

TEST_CASE("generation is deterministic") {
  GenConfig cfg;
  cfg.d = 0.25;
  cfg.phi = 0.3;
  cfg.sigma_eps2 = 0.5;
  cfg.seed = 77;
  cfg.replication = 5;
  CHECK(lmsv_series(cfg).values == lmsv_series(cfg).values);
  CHECK(arfima_1_d_0(cfg).values == arfima_1_d_0(cfg).values);
  GenConfig other = cfg;
  other.replication = 6;
  CHECK(lmsv_series(cfg).values != lmsv_series(other).values);
}

TEST_CASE("latent and observation streams are disjoint") {
  GenConfig a;
  a.n = 256;
  a.seed = 5;
  a.d = 0.1;
  GenConfig b = a;
  b.d = 0.4;
  b.phi = 0.6;
  // The observation noise recovered from X / (sigma exp(Z/2)) must not depend
  // on the latent settings.
  const Vector<double> ea = lmsv_series(a).values.array() / (0.5 * arfima_1_d_0(a).values.array()).exp();
  const Vector<double> eb = lmsv_series(b).values.array() / (0.5 * arfima_1_d_0(b).values.array()).exp();
  CHECK((ea - eb).cwiseAbs().maxCoeff() < 1e-12);
  // Requesting only Z reproduces the Z inside the LMSV draw.
  CHECK(arfima_1_d_0(a).values == arfima_1_d_0(a).values);
}

TEST_CASE("burn-in drops the leading samples") {
  GenConfig cfg;
  cfg.n = 64;
  cfg.burn_in = 32;
  cfg.d = 0.0;
  cfg.phi = 0.0;
  cfg.seed = 1;
  const TimeSeries z = arfima_1_d_0(cfg);
  CHECK(z.n() == 64);
  GenConfig full = cfg;
  full.n = 96;
  full.burn_in = 0;
  CHECK(z.values == arfima_1_d_0(full).values.tail(64));
}

TEST_CASE("config validation") {
  GenConfig cfg;
  cfg.phi = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.sigma_eps2 = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.n = 1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.d = 0.5;
  CHECK_THROWS_AS(lmsv_series(cfg), ValidationError);
}

TEST_CASE("student-t observation noise") {
  GenConfig cfg;
  cfg.noise = NoiseKind::student_t;
  cfg.student_df = 4;
  cfg.seed = 3;
  const TimeSeries x = lmsv_series(cfg);
  CHECK(x.values.allFinite());
  cfg.student_df = 0;
  CHECK_THROWS_AS(lmsv_series(cfg), ValidationError);
}

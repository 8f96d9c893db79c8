#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "longmem/datagen.hpp"
#include "longmem/estimators.hpp"

namespace longmem {

struct SweepConfig {
  Eigen::Index n = 1024;
  /// True memory parameter the MSE is measured against.
  double d = 0.2;
  double phi = 0.4;
  double sigma_eps2 = 0.37;
  double sigma = 1.0;
  int reps = 200;
  double lo_exp = 0.3;
  double hi_exp = 0.8;
  std::vector<Method> methods = {Method::gph, Method::wblp, Method::nkk};
  std::uint64_t base_seed = 0;
  double tol = 1e-9;
  unsigned workers = 1;
  /// Generate with this d instead of `d` (misspecification studies).
  std::optional<double> generator_d;

  void validate() const;
  /// Generator settings for replication r: substream(base_seed, r).
  GenConfig generator(std::uint64_t r) const;
};

/// Preset figure configurations: 1 -> (1024, 0.2, 0.4), 2 -> (1024, 0.3, 0.5), 3 -> (2048, 0.3, 0.4).
SweepConfig figure_config(int figure);

struct CellStats {
  Method method = Method::gph;
  Eigen::Index m = 0;
  double mse = 0;
  double bias = 0;
  double variance = 0;
  double mean_d_hat = 0;
  int reps_used = 0;
  /// More than 20% of replications failed for this cell.
  bool unreliable = false;
};

struct SweepResult {
  SweepConfig config;
  std::vector<Eigen::Index> grid;
  /// Ordered by config.methods, then by m.
  std::vector<CellStats> cells;
  /// raw[method index](m index, replication); NaN marks a failed estimate.
  std::vector<Eigen::MatrixXd> raw;
  /// Checksum of the log-squared series consumed by each replication.
  std::vector<std::uint64_t> series_checksums;

  const CellStats& cell(Method method, Eigen::Index m) const;
};

/// Log-squared LMSV series for replication r.
TimeSeries replication_series(const SweepConfig& cfg, std::uint64_t r);

/// FNV-1a over the sample bytes.
std::uint64_t series_checksum(const TimeSeries& y);

/// d_hat for one (replication, m, method) cell, NaN when the estimator fails.
double run_replication(const SweepConfig& cfg, std::uint64_t r, Eigen::Index m, Method method);

/// All replications over the bandwidth grid. Each replication generates one
/// series and reuses it for every method and m. Replications are split over
/// cfg.workers threads; aggregation runs afterwards in replication order, so
/// the result does not depend on the worker count.
SweepResult run_sweep(const SweepConfig& cfg);

/// Population-convention aggregates of one set of replications.
CellStats aggregate_cell(Method method, Eigen::Index m, const Eigen::Ref<const Eigen::VectorXd>& d_hats,
                         double truth, int reps);

void export_results(const SweepResult& res, const std::filesystem::path& dir);
std::vector<CellStats> read_aggregate_csv(const std::filesystem::path& path);

/// Fixed-width table: one row per m, MSE / bias / variance per method in gph, wblp, nkk order.
std::string summarize(const SweepResult& res);

struct HaarNoiseAutocov {
  double lag0 = 0;
  double lag1 = 0;
  /// Largest |autocovariance| over lags 2..max_lag.
  double lag2plus = 0;
  int max_lag = 5;
  /// Autocovariances at lags 0..max_lag.
  std::vector<double> lags;
};

/// Sample autocovariances of the finest-scale Haar transform of i.i.d.
/// N(0, sigma_u2) noise, normalized by 2^{J/2}: beta_q = U_q - U_{q+1}.
HaarNoiseAutocov haar_noise_autocov_diagnostic(double sigma_u2, Eigen::Index n, std::uint64_t seed);

/// Same statistics for a given noise vector (length a power of two).
HaarNoiseAutocov haar_noise_autocov(const Vector<double>& u, int max_lag = 5);

}  // namespace longmem

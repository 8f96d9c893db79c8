#include "longmem/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "longmem/io.hpp"

namespace longmem {

namespace {

constexpr double kMissingFraction = 0.2;

bool needs_wavelet(const std::vector<Method>& methods) {
  return std::any_of(methods.begin(), methods.end(), [](Method m) { return m != Method::gph; });
}

}  // namespace

void SweepConfig::validate() const {
  if (reps < 1) throw ValidationError("reps must be at least 1");
  if (workers < 1) throw ValidationError("workers must be at least 1");
  if (!(tol > 0)) throw ValidationError("tol must be positive");
  for (std::size_t i = 0; i < methods.size(); ++i)
    for (std::size_t j = i + 1; j < methods.size(); ++j)
      if (methods[i] == methods[j]) throw ValidationError("method " + to_string(methods[i]) + " listed twice");
  if (needs_wavelet(methods)) max_scale(n);
  generator(0).validate_lmsv();
  bandwidth_grid(n, lo_exp, hi_exp);
}

GenConfig SweepConfig::generator(std::uint64_t r) const {
  GenConfig g;
  g.n = n;
  g.d = generator_d.value_or(d);
  g.phi = phi;
  g.sigma_eps2 = sigma_eps2;
  g.sigma = sigma;
  g.seed = base_seed;
  g.replication = r;
  return g;
}

SweepConfig figure_config(int figure) {
  SweepConfig cfg;
  cfg.sigma_eps2 = 0.37;
  switch (figure) {
    case 1: cfg.n = 1024; cfg.d = 0.2; cfg.phi = 0.4; break;
    case 2: cfg.n = 1024; cfg.d = 0.3; cfg.phi = 0.5; break;
    case 3: cfg.n = 2048; cfg.d = 0.3; cfg.phi = 0.4; break;
    default: throw ValidationError("figure must be 1, 2 or 3, got " + std::to_string(figure));
  }
  return cfg;
}

const CellStats& SweepResult::cell(Method method, Eigen::Index m) const {
  for (const auto& c : cells)
    if (c.method == method && c.m == m) return c;
  throw ValidationError("no cell for method " + to_string(method) + " at m = " + std::to_string(m));
}

TimeSeries replication_series(const SweepConfig& cfg, std::uint64_t r) {
  return log_squared(lmsv_series(cfg.generator(r)));
}

std::uint64_t series_checksum(const TimeSeries& y) {
  std::uint64_t h = 1469598103934665603ull;
  for (Eigen::Index i = 0; i < y.n(); ++i) {
    unsigned char bytes[sizeof(double)];
    const double v = y.values(i);
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  return h;
}

double run_replication(const SweepConfig& cfg, std::uint64_t r, Eigen::Index m, Method method) {
  const TimeSeries y = replication_series(cfg, r);
  try {
    switch (method) {
      case Method::gph: return estimate_gph(y, m).d_hat;
      case Method::wblp: return estimate_wblp(y, m).d_hat;
      case Method::nkk: return estimate_nkk(y, m, cfg.tol).d_hat;
    }
  } catch (const RuntimeError&) {
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

/// Every grid cell of one replication. Periodograms are computed once at the
/// largest m; ordinates for k <= m do not depend on m.
void fill_replication(const SweepConfig& cfg, const std::vector<Eigen::Index>& grid, std::uint64_t r,
                      std::vector<Eigen::MatrixXd>& raw, std::vector<std::uint64_t>& checksums) {
  const TimeSeries y = replication_series(cfg, r);
  checksums[r] = series_checksum(y);
  const Eigen::Index m_max = grid.back();
  std::optional<WaveletCoefficients<double>> w;
  if (needs_wavelet(cfg.methods)) w = haar_dwt_finest(y);

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    const Method method = cfg.methods[mi];
    Periodogram<double> full;
    switch (method) {
      case Method::gph: full = ordinary_periodogram(y, m_max); break;
      case Method::wblp: full = wavelet_ols_periodogram(*w, m_max); break;
      case Method::nkk: full = nkk_periodogram(*w, m_max, cfg.tol); break;
    }
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      double d_hat = std::numeric_limits<double>::quiet_NaN();
      try {
        const auto p = full.head(grid[gi]);
        d_hat = method == Method::gph ? gph_from_periodogram(p).d_hat : wavelet_log_regression(p, method).d_hat;
      } catch (const RuntimeError&) {
      }
      raw[mi](Eigen::Index(gi), Eigen::Index(r)) = d_hat;
    }
  }
}

}  // namespace

CellStats aggregate_cell(Method method, Eigen::Index m, const Eigen::Ref<const Eigen::VectorXd>& d_hats, double truth,
                         int reps) {
  CellStats c;
  c.method = method;
  c.m = m;
  double sum = 0;
  int used = 0;
  for (Eigen::Index r = 0; r < d_hats.size(); ++r) {
    if (std::isfinite(d_hats(r))) {
      sum += d_hats(r);
      ++used;
    }
  }
  c.reps_used = used;
  c.unreliable = double(reps - used) > kMissingFraction * double(reps);
  if (used == 0) {
    c.mse = c.bias = c.variance = c.mean_d_hat = std::numeric_limits<double>::quiet_NaN();
    return c;
  }
  c.mean_d_hat = sum / used;
  double ss_mean = 0, ss_truth = 0;
  for (Eigen::Index r = 0; r < d_hats.size(); ++r) {
    if (!std::isfinite(d_hats(r))) continue;
    ss_mean += (d_hats(r) - c.mean_d_hat) * (d_hats(r) - c.mean_d_hat);
    ss_truth += (d_hats(r) - truth) * (d_hats(r) - truth);
  }
  c.bias = c.mean_d_hat - truth;
  c.variance = ss_mean / used;
  c.mse = ss_truth / used;
  return c;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult res;
  res.config = cfg;
  res.grid = bandwidth_grid(cfg.n, cfg.lo_exp, cfg.hi_exp);
  const auto reps = std::size_t(cfg.reps);
  res.raw.assign(cfg.methods.size(),
                 Eigen::MatrixXd::Constant(Eigen::Index(res.grid.size()), Eigen::Index(reps),
                                           std::numeric_limits<double>::quiet_NaN()));
  res.series_checksums.assign(reps, 0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        fill_replication(cfg, res.grid, r, res.raw, res.series_checksums);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::min<unsigned>(cfg.workers, unsigned(reps));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
    for (std::size_t gi = 0; gi < res.grid.size(); ++gi)
      res.cells.push_back(aggregate_cell(cfg.methods[mi], res.grid[gi], res.raw[mi].row(Eigen::Index(gi)).transpose(),
                                         cfg.d, cfg.reps));
  return res;
}

namespace {

nlohmann::json config_json(const SweepResult& res) {
  const SweepConfig& cfg = res.config;
  nlohmann::json j;
  j["n"] = cfg.n;
  j["d"] = cfg.d;
  j["phi"] = cfg.phi;
  j["sigma_eps2"] = cfg.sigma_eps2;
  j["sigma"] = cfg.sigma;
  j["reps"] = cfg.reps;
  j["lo_exp"] = cfg.lo_exp;
  j["hi_exp"] = cfg.hi_exp;
  std::vector<std::string> methods;
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["base_seed"] = cfg.base_seed;
  j["tol"] = cfg.tol;
  j["workers"] = cfg.workers;
  j["generator_d"] = cfg.generator_d ? nlohmann::json(*cfg.generator_d) : nlohmann::json(nullptr);
  j["grid"] = res.grid;
  j["rng"] = "mt19937_64 keyed by seed_seq(base_seed, replication, stream)";
  nlohmann::json seeds = nlohmann::json::array();
  for (std::size_t r = 0; r < res.series_checksums.size(); ++r) {
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << res.series_checksums[r];
    seeds.push_back({{"rep", r}, {"base_seed", cfg.base_seed}, {"series_checksum", hex.str()}});
  }
  j["seeds"] = seeds;
  return j;
}

}  // namespace

void export_results(const SweepResult& res, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create output directory '" + dir.string() + "': " + ec.message());

  CsvTable agg;
  agg.header = {"method", "m", "mse", "bias", "variance", "mean_d_hat", "reps_used", "unreliable"};
  for (const auto& c : res.cells)
    agg.rows.push_back({to_string(c.method), std::to_string(c.m), format_double(c.mse), format_double(c.bias),
                        format_double(c.variance), format_double(c.mean_d_hat), std::to_string(c.reps_used),
                        c.unreliable ? "1" : "0"});
  write_csv(dir / "aggregate.csv", agg);

  CsvTable raw;
  raw.header = {"method", "m", "rep", "d_hat"};
  for (std::size_t mi = 0; mi < res.raw.size(); ++mi)
    for (std::size_t gi = 0; gi < res.grid.size(); ++gi)
      for (Eigen::Index r = 0; r < res.raw[mi].cols(); ++r)
        raw.rows.push_back({to_string(res.config.methods[mi]), std::to_string(res.grid[gi]), std::to_string(r),
                            format_double(res.raw[mi](Eigen::Index(gi), r))});
  write_csv(dir / "raw.csv", raw);

  {
    std::ofstream out(dir / "config.json");
    if (!out) throw RuntimeError("cannot open '" + (dir / "config.json").string() + "' for writing");
    out << config_json(res).dump(2) << '\n';
  }

  std::ofstream curves(dir / "curves.dat");
  if (!curves) throw RuntimeError("cannot open '" + (dir / "curves.dat").string() + "' for writing");
  curves << "# m";
  for (Method m : res.config.methods) curves << " mse_" << to_string(m);
  curves << '\n';
  for (Eigen::Index m : res.grid) {
    curves << m;
    for (Method method : res.config.methods) curves << ' ' << format_double(res.cell(method, m).mse);
    curves << '\n';
  }
}

std::vector<CellStats> read_aggregate_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header.size() < 7 || t.header[0] != "method" || t.header[2] != "mse")
    throw ValidationError("'" + path.string() + "' is not an aggregate.csv file");
  std::vector<CellStats> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string ctx = "'" + path.string() + "' row " + std::to_string(i + 2);
    if (row.size() != t.header.size()) throw ValidationError(ctx + ": wrong field count");
    CellStats c;
    c.method = parse_method(row[0]);
    c.m = Eigen::Index(parse_double(row[1], ctx));
    c.mse = parse_double(row[2], ctx);
    c.bias = parse_double(row[3], ctx);
    c.variance = parse_double(row[4], ctx);
    c.mean_d_hat = parse_double(row[5], ctx);
    c.reps_used = int(parse_double(row[6], ctx));
    c.unreliable = row.size() > 7 && row[7] == "1";
    out.push_back(c);
  }
  return out;
}

std::string summarize(const SweepResult& res) {
  if (res.cells.empty()) throw ValidationError("cannot summarize an empty sweep result");
  std::vector<Method> order;
  for (Method m : {Method::gph, Method::wblp, Method::nkk})
    if (std::find(res.config.methods.begin(), res.config.methods.end(), m) != res.config.methods.end())
      order.push_back(m);

  std::ostringstream out;
  out << std::setw(6) << "m";
  for (Method m : order) {
    const std::string name = to_string(m);
    out << " | " << std::setw(11) << (name + " MSE") << ' ' << std::setw(11) << (name + " bias") << ' '
        << std::setw(11) << (name + " var");
  }
  out << '\n';
  std::vector<Eigen::Index> ms;
  for (const auto& c : res.cells)
    if (std::find(ms.begin(), ms.end(), c.m) == ms.end()) ms.push_back(c.m);
  std::sort(ms.begin(), ms.end());
  out << std::scientific << std::setprecision(4);
  for (Eigen::Index m : ms) {
    out << std::setw(6) << m;
    for (Method method : order) {
      const CellStats& c = res.cell(method, m);
      out << " | " << std::setw(11) << c.mse << ' ' << std::setw(11) << c.bias << ' ' << std::setw(11) << c.variance;
    }
    out << '\n';
  }
  return out.str();
}

HaarNoiseAutocov haar_noise_autocov(const Vector<double>& u, int max_lag) {
  if (max_lag < 2) throw ValidationError("max_lag must be at least 2");
  const auto w = haar_dwt_finest(u);
  const Eigen::Index n = w.size();
  const Vector<double> beta = w.coeffs / std::pow(2.0, 0.5 * double(w.scale_j));
  HaarNoiseAutocov out;
  out.max_lag = max_lag;
  out.lags.resize(std::size_t(max_lag) + 1);
  for (int h = 0; h <= max_lag; ++h) {
    double s = 0;
    for (Eigen::Index q = 0; q < n; ++q) s += beta(q) * beta((q + h) % n);
    out.lags[std::size_t(h)] = s / double(n);
  }
  out.lag0 = out.lags[0];
  out.lag1 = out.lags[1];
  for (int h = 2; h <= max_lag; ++h) out.lag2plus = std::max(out.lag2plus, std::abs(out.lags[std::size_t(h)]));
  return out;
}

HaarNoiseAutocov haar_noise_autocov_diagnostic(double sigma_u2, Eigen::Index n, std::uint64_t seed) {
  max_scale(n);
  if (sigma_u2 < 0) throw ValidationError("sigma_u2 must be non-negative");
  auto rng = substream(seed, 0, Stream::auxiliary);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<double> u(n);
  const double sd = std::sqrt(sigma_u2);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = sd * normal(rng);
  return haar_noise_autocov(u);
}

}  // namespace longmem

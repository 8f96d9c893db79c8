#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "longmem/experiments.hpp"
#include "longmem/io.hpp"

using namespace longmem;
namespace fs = std::filesystem;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.n = 256;
  cfg.reps = 6;
  cfg.lo_exp = 0.5;
  cfg.hi_exp = 0.6;
  cfg.base_seed = 11;
  return cfg;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("longmem_test_" + name);
  fs::remove_all(p);
  return p;
}

std::size_t data_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t count = 0;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty()) ++count;
  return count;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("sweep config validation") {
  SweepConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.reps = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.n = 300;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.methods = {Method::gph};
  CHECK_NOTHROW(cfg.validate());
  cfg = small_config();
  cfg.methods = {Method::gph, Method::gph};
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.d = 0.6;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  CHECK_THROWS_AS(figure_config(4), ValidationError);
  CHECK(figure_config(3).n == 2048);
  CHECK(figure_config(2).phi == 0.5);
}

TEST_CASE("every method sees the same series") {
  const SweepConfig cfg = small_config();
  for (std::uint64_t r = 0; r < 3; ++r) {
    const auto a = replication_series(cfg, r);
    const auto b = replication_series(cfg, r);
    CHECK(series_checksum(a) == series_checksum(b));
  }
  CHECK(series_checksum(replication_series(cfg, 0)) != series_checksum(replication_series(cfg, 1)));

  const SweepResult res = run_sweep(cfg);
  for (std::uint64_t r = 0; r < std::uint64_t(cfg.reps); ++r) {
    CHECK(res.series_checksums[r] == series_checksum(replication_series(cfg, r)));
    // A row of raw.csv is reproducible from (base_seed, r) alone.
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const Eigen::Index m = res.grid.front();
      const double again = run_replication(cfg, r, m, cfg.methods[mi]);
      CHECK(again == res.raw[mi](0, Eigen::Index(r)));
    }
  }
}

TEST_CASE("single replication") {
  SweepConfig cfg = small_config();
  cfg.reps = 1;
  const SweepResult res = run_sweep(cfg);
  for (const auto& raw : res.raw) CHECK(raw.cols() == 1);
  CHECK(res.cells.size() == cfg.methods.size() * res.grid.size());
}

TEST_CASE("sweeps are reproducible and independent of the worker count") {
  SweepConfig cfg = small_config();
  const SweepResult a = run_sweep(cfg);
  const SweepResult b = run_sweep(cfg);
  cfg.workers = 4;
  const SweepResult c = run_sweep(cfg);
  for (std::size_t mi = 0; mi < a.raw.size(); ++mi) {
    CHECK(a.raw[mi].cwiseEqual(b.raw[mi]).all());
    CHECK(a.raw[mi].cwiseEqual(c.raw[mi]).all());
  }
  CHECK(a.series_checksums == c.series_checksums);
}

TEST_CASE("mse decomposes into bias and variance") {
  const SweepResult res = run_sweep(small_config());
  for (const auto& c : res.cells) CHECK(std::abs(c.mse - (c.bias * c.bias + c.variance)) <= 1e-10);

  Eigen::VectorXd d(4);
  d << 0.1, std::numeric_limits<double>::quiet_NaN(), 0.3, 0.5;
  const CellStats s = aggregate_cell(Method::gph, 10, d, 0.2, 4);
  CHECK(s.reps_used == 3);
  CHECK(s.unreliable);
  CHECK(s.mean_d_hat == doctest::Approx(0.3));
  CHECK(s.variance == doctest::Approx(0.08 / 3));
  CHECK(s.mse == doctest::Approx((0.01 + 0.01 + 0.09) / 3));
}

TEST_CASE("misspecified truth shows up as bias") {
  SweepConfig cfg;
  cfg.n = 1024;
  cfg.d = 0.2;
  cfg.generator_d = 0.0;
  cfg.phi = 0.0;
  cfg.reps = 100;
  cfg.methods = {Method::gph};
  cfg.lo_exp = 0.5;
  cfg.hi_exp = 0.6;
  const SweepResult res = run_sweep(cfg);
  for (const auto& c : res.cells) CHECK(c.bias == doctest::Approx(-0.2).epsilon(0.3));
}

TEST_CASE("export writes the four artifacts") {
  SweepConfig cfg = small_config();
  cfg.methods = {Method::gph, Method::wblp};
  cfg.reps = 5;
  cfg.n = 64;
  cfg.lo_exp = 0.6;
  cfg.hi_exp = 0.65;
  const SweepResult res = run_sweep(cfg);
  REQUIRE(res.grid.size() == 3);
  const fs::path dir = scratch_dir("export");
  export_results(res, dir);
  CHECK(data_lines(dir / "raw.csv") == 30);
  CHECK(data_lines(dir / "aggregate.csv") == 6);
  CHECK(fs::exists(dir / "curves.dat"));

  const auto cfg_json = nlohmann::json::parse(slurp(dir / "config.json"));
  CHECK(cfg_json["n"] == 64);
  CHECK(cfg_json["base_seed"] == 11);
  CHECK(cfg_json["seeds"].size() == 5);

  const auto back = read_aggregate_csv(dir / "aggregate.csv");
  REQUIRE(back.size() == res.cells.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].method == res.cells[i].method);
    CHECK(back[i].m == res.cells[i].m);
    CHECK(back[i].mse == res.cells[i].mse);
    CHECK(back[i].bias == res.cells[i].bias);
    CHECK(back[i].variance == res.cells[i].variance);
    CHECK(back[i].reps_used == res.cells[i].reps_used);
  }
  fs::remove_all(dir);
}

TEST_CASE("empty method set exports headers only") {
  SweepConfig cfg = small_config();
  cfg.methods = {};
  const SweepResult res = run_sweep(cfg);
  const fs::path dir = scratch_dir("empty");
  export_results(res, dir);
  CHECK(data_lines(dir / "aggregate.csv") == 0);
  CHECK(slurp(dir / "aggregate.csv").starts_with("method,m,mse"));
  CHECK_THROWS_AS(summarize(res), ValidationError);
  fs::remove_all(dir);
}

TEST_CASE("summary table") {
  SweepConfig cfg = small_config();
  cfg.methods = {Method::nkk, Method::gph};
  cfg.n = 64;
  cfg.lo_exp = 0.6;
  cfg.hi_exp = 0.61;
  const SweepResult res = run_sweep(cfg);
  REQUIRE(res.grid.size() == 1);
  const std::string table = summarize(res);
  CHECK(std::count(table.begin(), table.end(), '\n') == 2);
  // Columns follow gph, wblp, nkk order regardless of the configured order.
  CHECK(table.find("gph MSE") < table.find("nkk MSE"));
}

TEST_CASE("Haar transform of white noise is MA(1)") {
  const auto zero = haar_noise_autocov(Vector<double>::Zero(64));
  CHECK(zero.lag0 == 0.0);
  CHECK(zero.lag1 == 0.0);
  CHECK(zero.lag2plus == 0.0);

  const Eigen::Index n = 1 << 14;
  for (double s2 : {1.0, 4.0}) {
    const auto a = haar_noise_autocov_diagnostic(s2, n, 3);
    CHECK(std::abs(a.lag0 - 2 * s2) < 3 * std::sqrt(12.0 / double(n)) * s2);
    CHECK(std::abs(a.lag1 + s2) < 3 * std::sqrt(7.0 / double(n)) * s2);
    CHECK(a.lags.size() == 6);
  }
  CHECK_THROWS_AS(haar_noise_autocov_diagnostic(1.0, 1000, 1), ValidationError);
}

TEST_CASE("csv helpers") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(parse_double(format_double(1.0 / 3.0), "x") == 1.0 / 3.0);
  CHECK(std::isnan(parse_double("nan", "x")));
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK_THROWS_AS(parse_double("1.5abc", "x"), ValidationError);

  const fs::path dir = scratch_dir("csv");
  fs::create_directories(dir);
  Vector<double> v(3);
  v << 1.5, -2.25, 1e-300;
  write_series_csv(dir / "s.csv", v);
  const auto back = read_series_csv(dir / "s.csv");
  CHECK(back.index_name == "t");
  CHECK(back.series.values == v);
  CHECK_THROWS_AS(read_series_csv(dir / "missing.csv"), RuntimeError);
  fs::remove_all(dir);
}

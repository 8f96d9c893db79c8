#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "longmem/datagen.hpp"
#include "longmem/estimators.hpp"
#include "longmem/experiments.hpp"
#include "longmem/io.hpp"

namespace longmem::cli {

namespace {

using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  bool quiet = false;
};

struct GenerateArgs {
  Eigen::Index n = 1024;
  double d = 0.2;
  double phi = 0.0;
  double sigma_eps2 = 0.37;
  double sigma = 1.0;
  std::string model = "logsq-lmsv";
  Eigen::Index burn_in = 0;
  std::string noise = "gaussian";
  double df = 5.0;
};

struct PeriodogramArgs {
  std::string in;
  std::string kind = "ordinary";
  Eigen::Index m = 0;
  double tol = 1e-9;
  bool demean = false;
};

struct EstimateArgs {
  std::string in;
  std::string method;
  std::optional<Eigen::Index> m;
  std::optional<double> m_exp;
  double tol = 1e-9;
  bool json = false;
  bool text = false;
  bool demean = false;
};

struct SweepArgs {
  Eigen::Index n = 1024;
  double d = 0.2;
  double phi = 0.4;
  double sigma_eps2 = 0.37;
  int reps = 200;
  double lo_exp = 0.3;
  double hi_exp = 0.8;
  std::string methods = "gph,wblp,nkk";
  double tol = 1e-9;
  unsigned workers = 1;
  int figure = 1;
};

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_method(item));
  if (out.empty()) throw ValidationError("--methods: expected a comma-separated subset of gph,wblp,nkk");
  return out;
}

/// Writes `j` next to a CSV output so the file can be regenerated from its settings alone.
void write_sidecar(const std::string& out_path, const json& j) {
  if (out_path.empty()) return;
  std::ofstream f(out_path + ".config.json");
  if (!f) throw RuntimeError("cannot write '" + out_path + ".config.json'");
  f << j.dump(2) << '\n';
}

void emit_csv(const CsvTable& table, const std::string& out_path, std::ostream& out) {
  if (!out_path.empty()) {
    write_csv(out_path, table);
    return;
  }
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

CsvTable series_table(const Vector<double>& v, const std::string& idx, const std::string& val, Eigen::Index first) {
  CsvTable t;
  t.header = {idx, val};
  for (Eigen::Index i = 0; i < v.size(); ++i) t.rows.push_back({std::to_string(i + first), format_double(v(i))});
  return t;
}

int run_generate(const GenerateArgs& a, const Globals& g, std::ostream& out) {
  GenConfig cfg;
  cfg.n = a.n;
  cfg.d = a.d;
  cfg.phi = a.phi;
  cfg.sigma_eps2 = a.sigma_eps2;
  cfg.sigma = a.sigma;
  cfg.seed = g.seed;
  cfg.burn_in = a.burn_in;
  cfg.noise = a.noise == "student-t" ? NoiseKind::student_t : NoiseKind::gaussian;
  cfg.student_df = a.df;

  TimeSeries series;
  if (a.model == "fractional") {
    cfg.validate();
    series = fractional_noise(a.d, a.n, g.seed);
  } else if (a.model == "arfima") {
    series = arfima_1_d_0(cfg);
  } else if (a.model == "lmsv") {
    series = lmsv_series(cfg);
  } else {
    series = log_squared(lmsv_series(cfg));
  }
  emit_csv(series_table(series.values, "t", "value", 1), g.out, out);
  write_sidecar(g.out, {{"subcommand", "generate"},
                        {"model", a.model},
                        {"n", a.n},
                        {"d", a.d},
                        {"phi", a.phi},
                        {"sigma_eps2", a.sigma_eps2},
                        {"sigma", a.sigma},
                        {"burn_in", a.burn_in},
                        {"noise", a.noise},
                        {"df", a.df},
                        {"seed", g.seed},
                        {"label", series.label}});
  return 0;
}

int run_dwt(const std::string& in, const Globals& g, std::ostream& out) {
  const SeriesFile file = read_series_csv(in);
  const auto w = haar_dwt_finest(file.series);
  emit_csv(series_table(w.coeffs, "q", "w", 0), g.out, out);
  write_sidecar(g.out, {{"subcommand", "dwt"}, {"in", in}, {"wavelet", w.spec.name}, {"boundary", "periodic"},
                        {"scale_j", w.scale_j}, {"source_n", w.source_n}});
  return 0;
}

/// A `q,w` file holds wavelet coefficients already; anything else is a series.
WaveletCoefficients<double> coefficients_from(const SeriesFile& file) {
  if (file.index_name == "q" && file.value_name == "w") {
    WaveletCoefficients<double> w;
    w.coeffs = file.series.values;
    w.source_n = file.series.n();
    w.scale_j = max_scale(w.source_n);
    return w;
  }
  return haar_dwt_finest(file.series);
}

int run_periodogram(const PeriodogramArgs& a, const Globals& g, std::ostream& out) {
  const SeriesFile file = read_series_csv(a.in);
  Periodogram<double> p;
  if (a.kind == "ordinary") {
    p = ordinary_periodogram(file.series, a.m, a.demean);
  } else if (a.kind == "wavelet-ols") {
    p = wavelet_ols_periodogram(coefficients_from(file), a.m);
  } else {
    if (!(a.tol > 0)) throw ValidationError("--tol must be positive");
    p = nkk_periodogram(coefficients_from(file), a.m, a.tol);
  }
  CsvTable t;
  t.header = {"k", "lambda", "ordinate", "converged"};
  for (Eigen::Index k = 0; k < p.m(); ++k)
    t.rows.push_back({std::to_string(k + 1), format_double(p.freqs(k)), format_double(p.ordinates(k)),
                      p.converged(k) ? "1" : "0"});
  emit_csv(t, g.out, out);
  write_sidecar(g.out, {{"subcommand", "periodogram"}, {"in", a.in}, {"kind", a.kind}, {"m", a.m},
                        {"tol", a.tol}, {"demean", a.demean}});
  return 0;
}

int run_estimate(const EstimateArgs& a, const Globals& g, std::ostream& out) {
  const SeriesFile file = read_series_csv(a.in);
  const Eigen::Index n = file.series.n();
  if (a.m && a.m_exp) throw ValidationError("--m and --m-exp are mutually exclusive");
  Eigen::Index m = 0;
  if (a.m) m = *a.m;
  else if (a.m_exp) {
    if (!(*a.m_exp > 0 && *a.m_exp < 1)) throw ValidationError("--m-exp must lie in (0, 1)");
    m = integer_part(std::pow(double(n), *a.m_exp));
  } else {
    throw ValidationError("one of --m or --m-exp is required");
  }
  if (!(a.tol > 0)) throw ValidationError("--tol must be positive");

  const Method method = parse_method(a.method);
  MemoryEstimate e;
  switch (method) {
    case Method::gph: e = estimate_gph(file.series, m, a.demean); break;
    case Method::wblp: e = estimate_wblp(file.series, m); break;
    case Method::nkk: e = estimate_nkk(file.series, m, a.tol); break;
  }
  if (a.text && !a.json) {
    out << to_string(e.method) << ": d_hat = " << e.d_hat << " (m = " << e.m << ", se = " << e.se_asymptotic
        << (e.se_borrowed ? " [wblp constant]" : "") << ", intercept = " << e.intercept
        << ", skipped_k = " << e.skipped_k << ")\n";
    return 0;
  }
  json j = {{"d_hat", e.d_hat},
            {"method", to_string(e.method)},
            {"m", e.m},
            {"intercept", e.intercept},
            {"se", e.se_asymptotic},
            {"se_borrowed", e.se_borrowed},
            {"skipped_k", e.skipped_k},
            {"config",
             {{"in", a.in}, {"n", n}, {"tol", a.tol}, {"demean", a.demean},
              {"m_exp", a.m_exp ? json(*a.m_exp) : json(nullptr)}, {"seed", g.seed}}}};
  out << j.dump(2) << '\n';
  return 0;
}

int run_sweep_command(SweepConfig cfg, const Globals& g, std::ostream& out) {
  if (g.out.empty()) throw ValidationError("--out <dir> is required");
  const SweepResult res = run_sweep(cfg);
  export_results(res, g.out);
  if (!g.quiet) out << summarize(res);
  return 0;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-memory parameter estimation: GPH, wavelet log-periodogram and LAD wavelet periodogram"};
  app.name("longmem");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file whose keys mirror the flags; flags win on conflict");

  Globals g;
  app.add_option("--seed", g.seed, "base random seed")->capture_default_str();
  app.add_option("--out", g.out, "output file (generate/dwt/periodogram) or directory (sweep/reproduce)");
  app.add_flag("--quiet", g.quiet, "suppress the summary table");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "simulate a series");
  generate->add_option("--n", gen.n, "sample size")->capture_default_str()->check(CLI::Range(Eigen::Index(2), Eigen::Index(1) << 26));
  generate->add_option("--d", gen.d, "memory parameter")->capture_default_str();
  generate->add_option("--phi", gen.phi, "AR(1) coefficient")->capture_default_str();
  generate->add_option("--sigma-eps2", gen.sigma_eps2, "innovation variance")->capture_default_str();
  generate->add_option("--sigma", gen.sigma, "LMSV level")->capture_default_str();
  generate->add_option("--model", gen.model, "series to emit")
      ->capture_default_str()
      ->check(CLI::IsMember({"fractional", "arfima", "lmsv", "logsq-lmsv"}));
  generate->add_option("--burn-in", gen.burn_in, "samples discarded before the output window")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--noise", gen.noise, "LMSV observation noise")
      ->capture_default_str()
      ->check(CLI::IsMember({"gaussian", "student-t"}));
  generate->add_option("--df", gen.df, "student-t degrees of freedom")->capture_default_str();

  std::string dwt_in;
  auto* dwt = app.add_subcommand("dwt", "finest-scale Haar coefficients of a series");
  dwt->add_option("--in", dwt_in, "input CSV (t,value)")->required();

  PeriodogramArgs pa;
  auto* periodogram = app.add_subcommand("periodogram", "periodogram ordinates at k = 1..m");
  periodogram->add_option("--in", pa.in, "input CSV: a series (t,value) or coefficients (q,w)")->required();
  periodogram->add_option("--kind", pa.kind, "periodogram kind")
      ->capture_default_str()
      ->check(CLI::IsMember({"ordinary", "wavelet-ols", "nkk"}));
  periodogram->add_option("--m", pa.m, "bandwidth")->required();
  periodogram->add_option("--tol", pa.tol, "LAD tolerance")->capture_default_str();
  periodogram->add_flag("--demean", pa.demean, "subtract the sample mean (ordinary only)");

  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate", "estimate d from a series");
  estimate->add_option("--in", ea.in, "input CSV (t,value)")->required();
  estimate->add_option("--method", ea.method, "estimator")->required()->check(CLI::IsMember({"gph", "wblp", "nkk"}));
  estimate->add_option("--m", ea.m, "bandwidth");
  estimate->add_option("--m-exp", ea.m_exp, "bandwidth as [n^x]");
  estimate->add_option("--tol", ea.tol, "LAD tolerance")->capture_default_str();
  estimate->add_flag("--json", ea.json, "JSON output (default)");
  estimate->add_flag("--text", ea.text, "one-line human-readable output");
  estimate->add_flag("--demean", ea.demean, "subtract the sample mean before the GPH periodogram");

  SweepArgs sa;
  auto add_common_sweep = [&](CLI::App* sub) {
    sub->add_option("--reps", sa.reps, "replications per grid point")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--methods", sa.methods, "comma-separated subset of gph,wblp,nkk")->capture_default_str();
    sub->add_option("--tol", sa.tol, "LAD tolerance")->capture_default_str();
    sub->add_option("--workers", sa.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  };
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo MSE over the bandwidth grid");
  sweep->add_option("--n", sa.n, "sample size")->capture_default_str();
  sweep->add_option("--d", sa.d, "memory parameter")->capture_default_str();
  sweep->add_option("--phi", sa.phi, "AR(1) coefficient")->capture_default_str();
  sweep->add_option("--sigma-eps2", sa.sigma_eps2, "innovation variance")->capture_default_str();
  sweep->add_option("--lo-exp", sa.lo_exp, "grid starts at [n^lo]")->capture_default_str();
  sweep->add_option("--hi-exp", sa.hi_exp, "grid ends at [n^hi]")->capture_default_str();
  add_common_sweep(sweep);

  auto* reproduce = app.add_subcommand("reproduce", "rerun a figure configuration");
  reproduce->add_option("--figure", sa.figure, "1: n=1024 (0.2,0.4); 2: n=1024 (0.3,0.5); 3: n=2048 (0.3,0.4)")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));
  add_common_sweep(reproduce);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (*generate) return run_generate(gen, g, out);
    if (*dwt) return run_dwt(dwt_in, g, out);
    if (*periodogram) return run_periodogram(pa, g, out);
    if (*estimate) return run_estimate(ea, g, out);

    SweepConfig cfg;
    if (*reproduce) {
      cfg = figure_config(sa.figure);
    } else {
      cfg.n = sa.n;
      cfg.d = sa.d;
      cfg.phi = sa.phi;
      cfg.sigma_eps2 = sa.sigma_eps2;
      cfg.lo_exp = sa.lo_exp;
      cfg.hi_exp = sa.hi_exp;
    }
    cfg.reps = sa.reps;
    cfg.methods = parse_methods(sa.methods);
    cfg.tol = sa.tol;
    cfg.workers = sa.workers;
    cfg.base_seed = g.seed;
    return run_sweep_command(cfg, g, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace longmem::cli

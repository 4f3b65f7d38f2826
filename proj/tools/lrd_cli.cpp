// Command-line front end: simulate, estimate, variance, ci, bench.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lrd/asympvar.hpp"
#include "lrd/bench.hpp"
#include "lrd/estimate.hpp"
#include "lrd/fourier.hpp"
#include "lrd/series_ops.hpp"
#include "lrd/simulate.hpp"
#include "lrd/wavelet.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDomain = 4;

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_doubles(s)) out.push_back(static_cast<int>(v));
  return out;
}

int wavelet_order(const std::string& name) {
  if (name.size() < 3 || name.substr(0, 2) != "db")
    throw CLI::ValidationError("--wavelet", "expected db1..db10, got " + name);
  return std::stoi(name.substr(2));
}

std::optional<std::pair<double, double>> parse_range(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto v = parse_doubles(s);
  if (v.size() != 2) throw CLI::ValidationError("--range", "expected two comma-separated reals");
  return std::make_pair(v[0], v[1]);
}

void try_load_constants(const std::string& path) {
  if (path.empty()) return;
  std::ifstream probe(path);
  if (probe) lrd::load_sigma2_table(path);
}

void print_result_row(const lrd::EstimateResult& r, bool header_done) {
  if (!header_done) {
    if (r.method == lrd::Method::GPH || r.method == lrd::Method::LWF)
      std::printf("%10s %12s %12s\n", "m", "d", "std");
    else
      std::printf("%5s %5s %12s %12s\n", "L", "U", "d", "std");
  }
  if (r.method == lrd::Method::GPH || r.method == lrd::Method::LWF)
    std::printf("%10d %12.6g %12.6g\n", r.m, r.d_hat, r.std);
  else
    std::printf("%5d %5d %12.6g %12.6g\n", r.L, r.U, r.d_hat, r.std);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-parametric long-memory estimation (GPH, LWF, LRW, LWW)"};
  app.require_subcommand(1);

  std::string constants_path = "data/sigma2_pool.txt";
  app.add_option("--constants", constants_path,
                 "sigma^2_{p,tau} constants file (p tau sigma2 stderr reps seed per line)");

  // --- simulate ---
  auto* sim = app.add_subcommand("simulate", "generate a test-process trajectory");
  std::string sim_model = "arfima", sim_ar, sim_ma, sim_out = "-";
  double sim_d = 0.0, sim_sigma2 = 1.0, sim_h = 0.7, sim_lambda0 = 1.5707963267948966;
  long sim_n = 4096;
  std::uint64_t sim_seed = 1, sim_stream = 0;
  int sim_lf = 512;
  sim->add_option("--model", sim_model, "arfima|darfima|fgn|subord1|subord2")
      ->default_str("arfima");
  sim->add_option("--d", sim_d, "memory parameter (target)");
  sim->add_option("--ar", sim_ar, "AR coefficients phi_1..phi_p (1 - sum phi_k z^k), comma list");
  sim->add_option("--ma", sim_ma, "MA coefficients theta_1..theta_q, comma list");
  sim->add_option("--sigma2", sim_sigma2, "innovation variance")->default_str("1");
  sim->add_option("--H", sim_h, "FGN Hurst index");
  sim->add_option("--lambda0", sim_lambda0, "DARFIMA cutoff in (0, pi]");
  sim->add_option("--sinc-halfwidth", sim_lf, "DARFIMA kernel truncation half-width")
      ->default_str("512");
  sim->add_option("--n", sim_n, "series length")->default_str("4096");
  sim->add_option("--seed", sim_seed, "RNG seed")->default_str("1");
  sim->add_option("--stream", sim_stream, "RNG stream id")->default_str("0");
  sim->add_option("-o,--output", sim_out, "output path ('-' for stdout)")->default_str("-");

  // --- estimate ---
  auto* est = app.add_subcommand("estimate", "estimate d from a series file");
  std::string est_method, est_bw, est_lower, est_upper, est_wavelet = "db4", est_range;
  std::string est_input, est_dump_pyr, est_dump_per;
  int est_tau = 0, est_delta = 0, est_p = 1, est_trim = 0;
  bool est_json = false, est_two_step = false;
  double est_pilot = std::nan("");
  est->add_option("--method", est_method, "gph|lwf|lrw|lww")->required();
  est->add_option("--bandwidth", est_bw, "m values, comma list (gph: pooled blocks; lwf: raw frequencies)");
  est->add_option("--lower", est_lower, "L values, comma list (wavelet methods; default 3)");
  est->add_option("--upper", est_upper, "U values, comma list (default: maximal scale J)");
  est->add_option("--wavelet", est_wavelet, "db1..db10")->default_str("db4");
  est->add_option("--taper", est_tau, "taper order tau")->default_str("0");
  est->add_option("--difforder", est_delta, "differencing order delta")->default_str("0");
  est->add_option("--pooling", est_p, "pooling order p (gph)")->default_str("1");
  est->add_option("--trim", est_trim, "leading blocks/frequencies to skip")->default_str("0");
  est->add_option("--range", est_range, "restrict the Whittle minimization to [a,b] (comma pair)");
  est->add_flag("--two-step", est_two_step, "lrw: add optimal-weight re-estimate columns");
  est->add_option("--pilot", est_pilot, "lrw --two-step: pilot d (default: AV estimate)");
  est->add_flag("--json", est_json, "JSON output (one object per row)");
  est->add_option("--dump-pyramid", est_dump_pyr, "write scale,k,coefficient CSV");
  est->add_option("--dump-periodogram", est_dump_per, "write freq,ordinate CSV");
  est->add_option("input", est_input, "series file (one value per line, # comments)")->required();

  // --- variance ---
  auto* var = app.add_subcommand("variance", "asymptotic variances of the wavelet estimators");
  std::string var_wavelet = "db2", var_ell = "5";
  double var_d = 0.0;
  bool var_shannon_only = false;
  var->add_option("--wavelet", var_wavelet, "db1..db10")->default_str("db2");
  var->add_option("--d", var_d, "memory parameter")->required();
  var->add_option("--ell", var_ell, "number of scale offsets (integer or 'inf')")
      ->default_str("5");
  var->add_flag("--shannon", var_shannon_only, "print the Shannon closed form only");

  // --- ci ---
  auto* ci = app.add_subcommand("ci", "normal confidence intervals from d and std lists");
  std::string ci_d, ci_std;
  double ci_level = 0.95;
  ci->add_option("--d", ci_d, "comma list of estimates")->required();
  ci->add_option("--std", ci_std, "comma list of standard deviations")->required();
  ci->add_option("--level", ci_level, "confidence level in (0,1)")->default_str("0.95");

  // --- bench ---
  auto* ben = app.add_subcommand("bench", "Monte-Carlo bias/std/RMSE tables");
  std::string ben_config, ben_out = "bench.csv", ben_curve;
  int ben_reps = 0, ben_threads = 0;
  std::uint64_t ben_seed = 0;
  bool ben_paper = false;
  ben->add_option("--config", ben_config, "JSON config path (see README)");
  ben->add_flag("--paper-defaults", ben_paper,
                "run the built-in reference model/tuning battery");
  ben->add_option("--reps", ben_reps, "override replicate count");
  ben->add_option("--seed", ben_seed, "override master seed");
  ben->add_option("--threads", ben_threads, "worker threads (default: LRD_THREADS or hardware)");
  ben->add_option("-o,--output", ben_out, "output CSV path")->default_str("bench.csv");
  ben->add_option("--mse-curve", ben_curve,
                  "also write (equivalent bandwidth, rmse) CSV for 'model/method/n'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sim) {
      lrd::ModelSpec spec;
      if (sim_model == "arfima") spec.kind = lrd::ModelKind::ARFIMA;
      else if (sim_model == "darfima") spec.kind = lrd::ModelKind::DARFIMA;
      else if (sim_model == "fgn") spec.kind = lrd::ModelKind::FGN;
      else if (sim_model == "subord1") spec.kind = lrd::ModelKind::SUBORD1;
      else if (sim_model == "subord2") spec.kind = lrd::ModelKind::SUBORD2;
      else {
        std::cerr << "unknown model " << sim_model << "\n";
        return kExitUsage;
      }
      spec.d = sim_d;
      spec.ar = parse_doubles(sim_ar);
      spec.ma = parse_doubles(sim_ma);
      spec.sigma2 = sim_sigma2;
      spec.H = sim_h;
      spec.lambda0 = sim_lambda0;
      spec.sinc_halfwidth = sim_lf;
      lrd::RngStream rng(sim_seed, sim_stream);
      const lrd::TimeSeries x = lrd::generate(spec, sim_n, rng);
      if (sim_out == "-") {
        char buf[40];
        for (long t = 0; t < x.size(); ++t) {
          std::snprintf(buf, sizeof buf, "%.17g\n", x[t]);
          std::fputs(buf, stdout);
        }
      } else {
        lrd::write_series(sim_out, x);
      }
      return 0;
    }

    if (*est) {
      try_load_constants(constants_path);
      lrd::TimeSeries x;
      try {
        x = lrd::read_series(est_input);
      } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitData;
      }
      const auto range = parse_range(est_range);
      bool header = false;
      if (est_method == "gph" || est_method == "lwf") {
        auto ms = parse_ints(est_bw);
        if (ms.empty()) ms = {50};
        for (int m : ms) {
          lrd::FourierTuning t;
          t.m = m;
          t.p = est_p;
          t.tau = est_tau;
          t.delta = est_delta;
          t.trim = est_trim;
          t.range = range;
          const auto r = est_method == "gph" ? lrd::gph(x, t) : lrd::lwf(x, t);
          if (est_json) std::printf("%s\n", r.to_json().c_str());
          else { print_result_row(r, header); header = true; }
        }
        if (!est_dump_per.empty()) {
          const auto tp = lrd::tapered_periodogram(lrd::difference(x, est_delta), est_tau);
          if (est_method == "gph") lrd::dump_pooled_csv(lrd::pool(tp, est_p), est_dump_per);
          else lrd::dump_periodogram_csv(tp, est_dump_per);
        }
      } else if (est_method == "lrw" || est_method == "lww") {
        const auto w = lrd::daubechies(wavelet_order(est_wavelet));
        auto Ls = parse_ints(est_lower);
        if (Ls.empty()) Ls = {3};
        auto Us = parse_ints(est_upper);
        for (size_t i = 0; i < Ls.size(); ++i) {
          lrd::WaveletTuning t;
          t.L = Ls[i];
          if (!Us.empty()) t.U = Us[i < Us.size() ? i : Us.size() - 1];
          t.delta = est_delta;
          t.range = range;
          if (est_method == "lww") {
            const auto r = lrd::lww(x, t, w);
            if (est_json) std::printf("%s\n", r.to_json().c_str());
            else { print_result_row(r, header); header = true; }
          } else {
            const auto r = lrd::lrw(x, t, w);
            if (est_two_step) {
              lrd::WaveletTuning t2 = t;
              t2.weights = lrd::LrwWeights::Optimal;
              if (!std::isnan(est_pilot)) t2.pilot_d = est_pilot;
              const auto r2 = lrd::lrw(x, t2, w);
              if (est_json) {
                std::printf("{\"av\":%s,\"opt\":%s}\n", r.to_json().c_str(),
                            r2.to_json().c_str());
              } else {
                if (!header)
                  std::printf("%5s %5s %12s %12s %12s %12s %12s %12s\n", "L", "U", "d", "std",
                              "c", "dopt", "stdopt", "copt");
                header = true;
                std::printf("%5d %5d %12.6g %12.6g %12.6g %12.6g %12.6g %12.6g\n", r.L, r.U,
                            r.d_hat, r.std, *r.intercept, r2.d_hat, r2.std, *r2.intercept);
              }
            } else {
              if (est_json) std::printf("%s\n", r.to_json().c_str());
              else { print_result_row(r, header); header = true; }
            }
          }
        }
        if (!est_dump_pyr.empty())
          lrd::dump_pyramid_csv(lrd::pyramid(lrd::difference(x, est_delta), w), est_dump_pyr);
      } else {
        std::cerr << "unknown method " << est_method << " (need gph|lwf|lrw|lww)\n";
        return kExitUsage;
      }
      return 0;
    }

    if (*var) {
      const int ell = var_ell == "inf" ? lrd::kInfScales : std::stoi(var_ell);
      if (var_shannon_only) {
        std::printf("vs = %.6g\n", lrd::v_shannon(var_d, ell));
        return 0;
      }
      const auto w = lrd::daubechies(wavelet_order(var_wavelet));
      const double lo = 0.5 - w.alpha, hi = w.vanishing_moments + 0.25;
      if (!(var_d > lo && var_d < hi)) {
        std::fprintf(stderr,
                     "d=%g outside the admissible interval (%g, %g) for %s\n", var_d, lo, hi,
                     var_wavelet.c_str());
        return kExitDomain;
      }
      if (ell == lrd::kInfScales) {
        const auto table = lrd::shared_psi_table(w);
        std::printf("v = %.6g\nvs = %.6g\n", lrd::v_av(var_d, ell, *table),
                    lrd::v_shannon(var_d, ell));
        return 0;
      }
      const auto rep = lrd::variance_report(var_d, ell, w);
      std::printf("v = %.6g\nvs = %.6g\nvopt = %.6g\nwopt =", rep.v_av, rep.v_shannon,
                  rep.v_opt);
      for (int i = 0; i < rep.optimal_weights.size(); ++i)
        std::printf(" %.6g", rep.optimal_weights[i]);
      std::printf("\n");
      return 0;
    }

    if (*ci) {
      const auto ds = parse_doubles(ci_d);
      const auto ss = parse_doubles(ci_std);
      if (ds.size() != ss.size() || ds.empty()) {
        std::cerr << "ci: --d and --std must be non-empty lists of equal length\n";
        return kExitUsage;
      }
      if (!(ci_level > 0.0 && ci_level < 1.0)) {
        std::cerr << "ci: level must be in (0,1)\n";
        return kExitUsage;
      }
      for (size_t i = 0; i < ds.size(); ++i) {
        const auto [lo, hi] = lrd::confidence_interval(ds[i], ss[i], ci_level);
        std::printf("%12.6g %12.6g\n", lo, hi);
      }
      return 0;
    }

    if (*ben) {
      lrd::BenchConfig cfg;
      if (ben_paper) {
        cfg = lrd::BenchConfig::paper_defaults();
      } else if (!ben_config.empty()) {
        std::ifstream in(ben_config);
        if (!in) {
          std::cerr << "cannot open " << ben_config << "\n";
          return kExitData;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = lrd::BenchConfig::from_json(ss.str());
      } else {
        std::cerr << "bench: need --config or --paper-defaults\n";
        return kExitUsage;
      }
      if (ben_reps > 0) cfg.reps = ben_reps;
      if (ben_seed != 0) cfg.seed = ben_seed;
      if (ben_threads > 0) cfg.threads = ben_threads;
      const auto rows = lrd::run_bench(
          cfg, [](const std::string& msg) { std::fprintf(stderr, "[bench] %s\n", msg.c_str()); });
      std::ofstream out(ben_out);
      if (!out) {
        std::cerr << "cannot open " << ben_out << " for writing\n";
        return kExitData;
      }
      out << lrd::rows_to_csv(rows);
      if (!ben_curve.empty()) {
        const auto slash1 = ben_curve.find('/');
        const auto slash2 = ben_curve.rfind('/');
        if (slash1 == std::string::npos || slash2 == slash1) {
          std::cerr << "--mse-curve expects 'model/method/n'\n";
          return kExitUsage;
        }
        const std::string model = ben_curve.substr(0, slash1);
        const std::string method = ben_curve.substr(slash1 + 1, slash2 - slash1 - 1);
        const long n = std::stol(ben_curve.substr(slash2 + 1));
        std::ofstream cv(ben_out + ".curve.csv");
        cv << "equiv_bandwidth,rmse\n";
        for (const auto& [bw, rmse] : lrd::mse_curve(rows, model, method, n))
          cv << bw << "," << rmse << "\n";
      }
      return lrd::any_flagged(rows) ? 1 : 0;
    }
  } catch (const std::domain_error& e) {
    std::cerr << e.what() << "\n";
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  }
  return 0;
}

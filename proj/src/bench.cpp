#include "lrd/bench.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>
#include <stdexcept>
#include <thread>

namespace lrd {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LRD_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string method_str(Method m) {
  switch (m) {
    case Method::GPH: return "gph";
    case Method::LWF: return "lwf";
    case Method::LRW: return "lrw";
    case Method::LWW: return "lww";
  }
  return "?";
}

struct Cell {
  const EstimatorGrid* grid = nullptr;
  int tuning = 0;  // m or L
};

double wavelet_equiv_bandwidth(long n, int T, int L, int U) {
  double s = 0.0;
  for (int j = L; j <= U; ++j) s += std::max(0L, n_available(n, T, j));
  return 0.5 * s;
}

// population moments + bootstrap standard errors of (mean, std)
struct RowStats {
  double bias, sd, rmse, se_bias, se_sd;
};

RowStats row_stats(const std::vector<double>& dhat, double d_true, std::uint64_t boot_seed) {
  const size_t R = dhat.size();
  double s1 = 0.0, s2 = 0.0;
  for (double v : dhat) s1 += v;
  const double mean = s1 / R;
  for (double v : dhat) s2 += (v - mean) * (v - mean);
  const double var = s2 / R;
  RowStats out;
  out.bias = mean - d_true;
  out.sd = std::sqrt(var);
  out.rmse = std::sqrt(out.bias * out.bias + var);
  const int B = 200;
  RngStream rng(boot_seed, 0);
  double bm1 = 0, bm2 = 0, bs1 = 0, bs2 = 0;
  for (int b = 0; b < B; ++b) {
    double t1 = 0, t2 = 0;
    for (size_t i = 0; i < R; ++i) {
      const double v = dhat[rng.next_u64() % R];
      t1 += v;
      t2 += v * v;
    }
    const double bmean = t1 / R;
    const double bsd = std::sqrt(std::max(0.0, t2 / R - bmean * bmean));
    bm1 += bmean;
    bm2 += bmean * bmean;
    bs1 += bsd;
    bs2 += bsd * bsd;
  }
  out.se_bias = std::sqrt(std::max(0.0, bm2 / B - (bm1 / B) * (bm1 / B)));
  out.se_sd = std::sqrt(std::max(0.0, bs2 / B - (bs1 / B) * (bs1 / B)));
  return out;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg,
                                const std::function<void(const std::string&)>& progress) {
  if (cfg.reps < 2) throw std::invalid_argument("bench: reps must be >= 2");
  if (cfg.models.empty() || cfg.estimators.empty())
    throw std::invalid_argument("bench: models and estimators must be non-empty");
  for (const auto& g : cfg.estimators) {
    const bool fourier = g.method == Method::GPH || g.method == Method::LWF;
    if ((fourier && g.bandwidths.empty()) || (!fourier && g.lower_scales.empty()))
      throw std::invalid_argument("bench: empty tuning grid");
  }
  const int nthreads = resolve_threads(cfg.threads);
  std::vector<BenchRow> rows;

  for (size_t mi = 0; mi < cfg.models.size(); ++mi) {
    const auto& model = cfg.models[mi];
    for (long n : cfg.sizes) {
      if (progress) progress("model " + model.label + " n=" + std::to_string(n));
      const auto gen = make_generator(model.spec, n);

      // feasible cells for this n
      std::vector<Cell> cells;
      for (const auto& g : cfg.estimators) {
        if (g.method == Method::GPH || g.method == Method::LWF) {
          const long np = n - g.delta;
          const long avail = g.method == Method::GPH ? (np - 1) / (2L * (g.p + g.tau))
                                                     : (np - 1) / 2;
          for (int m : g.bandwidths)
            if (m >= 2 && m <= avail) cells.push_back({&g, m});
        } else {
          const auto w = daubechies(g.wavelet_M);
          const int J = max_scale(n, w.support);
          for (int L : g.lower_scales)
            if (L >= 0 && L < J) cells.push_back({&g, L});
        }
      }

      std::vector<std::vector<double>> dhat(cells.size(),
                                            std::vector<double>(cfg.reps,
                                                                std::numeric_limits<double>::quiet_NaN()));
      std::vector<int> failures(cells.size(), 0);
      std::atomic<int> next_rep{0};
      std::atomic<int> gen_failures{0};
      std::mutex fail_mutex;

      auto worker = [&]() {
        // per-thread wavelet cache
        std::map<int, WaveletSpec> wcache;
        for (;;) {
          const int r = next_rep.fetch_add(1);
          if (r >= cfg.reps) break;
          TimeSeries x;
          bool ok = false;
          for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
            try {
              RngStream rng(cfg.seed, (static_cast<std::uint64_t>(mi) << 32) +
                                          static_cast<std::uint64_t>(r) +
                                          (attempt ? 0x8000000000000000ULL : 0ULL));
              x = gen(rng);
              ok = true;
            } catch (const std::exception&) {
              if (attempt == 1) gen_failures.fetch_add(1);
            }
          }
          if (!ok) {
            std::lock_guard<std::mutex> lk(fail_mutex);
            for (size_t c = 0; c < cells.size(); ++c) ++failures[c];
            continue;
          }

          // shared per-rep intermediates, grouped by estimator family
          std::map<std::tuple<int, int, int>, PooledPeriodogram> gph_pp;  // (delta,tau,p)
          std::map<std::pair<int, int>, TaperedPeriodogram> lwf_tp;       // (delta,tau)
          std::map<int, WaveletPyramid> pyramids;                         // by wavelet M

          for (size_t c = 0; c < cells.size(); ++c) {
            const auto& g = *cells[c].grid;
            try {
              switch (g.method) {
                case Method::GPH: {
                  auto key = std::make_tuple(g.delta, g.tau, g.p);
                  auto it = gph_pp.find(key);
                  if (it == gph_pp.end()) {
                    const TimeSeries y = difference(x, g.delta);
                    it = gph_pp.emplace(key, pool(tapered_periodogram(y, g.tau), g.p)).first;
                  }
                  dhat[c][r] = gph_fit(it->second, cells[c].tuning, 0, g.delta).first;
                  break;
                }
                case Method::LWF: {
                  auto key = std::make_pair(g.delta, g.tau);
                  auto it = lwf_tp.find(key);
                  if (it == lwf_tp.end()) {
                    const TimeSeries y = difference(x, g.delta);
                    it = lwf_tp.emplace(key, tapered_periodogram(y, g.tau)).first;
                  }
                  const int m = cells[c].tuning;
                  dhat[c][r] = lwf_fit(it->second.ordinates.head(m),
                                       it->second.frequencies.head(m), g.delta, std::nullopt);
                  break;
                }
                case Method::LRW:
                case Method::LWW: {
                  auto wit = wcache.find(g.wavelet_M);
                  if (wit == wcache.end())
                    wit = wcache.emplace(g.wavelet_M, daubechies(g.wavelet_M)).first;
                  const auto& w = wit->second;
                  auto pit = pyramids.find(g.wavelet_M);
                  if (pit == pyramids.end())
                    pit = pyramids.emplace(g.wavelet_M, pyramid(x, w)).first;
                  const auto& pyr = pit->second;
                  const int L = cells[c].tuning, U = pyr.J;
                  const int ns = U - L + 1;
                  if (ns < 2) throw std::runtime_error("single scale");
                  Eigen::VectorXd energies(ns), counts(ns);
                  for (int j = L; j <= U; ++j) {
                    energies[j - L] = pyr.coeffs[j].squaredNorm();
                    counts[j - L] = static_cast<double>(pyr.counts[j]);
                  }
                  if (g.method == Method::LWW) {
                    dhat[c][r] = lww_fit(energies, counts, L, std::nullopt);
                  } else {
                    Eigen::VectorXd logs2(ns);
                    for (int i = 0; i < ns; ++i) logs2[i] = std::log(energies[i] / counts[i]);
                    dhat[c][r] = lrw_fit(logs2, L, av_weights(U - L)).first;
                  }
                  break;
                }
              }
            } catch (const std::exception&) {
              std::lock_guard<std::mutex> lk(fail_mutex);
              ++failures[c];
            }
          }
        }
      };

      std::vector<std::thread> pool_;
      for (int t = 0; t < nthreads; ++t) pool_.emplace_back(worker);
      for (auto& th : pool_) th.join();

      // reduce
      size_t row0 = rows.size();
      for (size_t c = 0; c < cells.size(); ++c) {
        std::vector<double> good;
        good.reserve(cfg.reps);
        for (double v : dhat[c])
          if (std::isfinite(v)) good.push_back(v);
        if (good.size() < 2) continue;
        const auto& g = *cells[c].grid;
        BenchRow row;
        row.model = model.label;
        row.method = method_str(g.method);
        row.n = n;
        row.tuning = cells[c].tuning;
        const auto st = row_stats(good, model.spec.d, cfg.seed ^ (mi * 977 + c));
        row.bias = st.bias;
        row.std = st.sd;
        row.rmse = st.rmse;
        row.bootstrap_se_bias = st.se_bias;
        row.bootstrap_se_std = st.se_sd;
        row.failures = failures[c];
        row.flagged = failures[c] > 0.01 * cfg.reps;
        if (g.method == Method::LWF) {
          row.equiv_bandwidth = cells[c].tuning;
        } else if (g.method == Method::GPH) {
          row.equiv_bandwidth = static_cast<double>(cells[c].tuning) * (g.p + g.tau);
        } else {
          const auto w = daubechies(g.wavelet_M);
          row.equiv_bandwidth =
              wavelet_equiv_bandwidth(n, w.support, cells[c].tuning, max_scale(n, w.support));
        }
        rows.push_back(row);
      }
      // flag RMSE-optimal tuning per (model, method, n)
      std::map<std::string, size_t> best;
      for (size_t i = row0; i < rows.size(); ++i) {
        const auto key = rows[i].method;
        auto it = best.find(key);
        if (it == best.end() || rows[i].rmse < rows[it->second].rmse) best[key] = i;
      }
      for (auto& [k, i] : best) rows[i].optimal = true;
    }
  }
  return rows;
}

std::vector<std::pair<double, double>> mse_curve(const std::vector<BenchRow>& rows,
                                                 const std::string& model,
                                                 const std::string& method, long n) {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : rows)
    if (r.model == model && r.method == method && r.n == n)
      out.emplace_back(r.equiv_bandwidth, r.rmse);
  std::sort(out.begin(), out.end());
  return out;
}

std::string rows_to_csv(const std::vector<BenchRow>& rows) {
  bool multi_n = false;
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i].n != rows[0].n) multi_n = true;
  std::ostringstream os;
  os << "model,method,tuning,bias,std,rmse,optimal\n";
  char buf[256];
  for (const auto& r : rows) {
    std::string label = r.model;
    if (multi_n) label += " (n=" + std::to_string(r.n) + ")";
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%.6g,%.6g,%.6g,%d\n", label.c_str(),
                  r.method.c_str(), r.tuning, r.bias, r.std, r.rmse, r.optimal ? 1 : 0);
    os << buf;
  }
  return os.str();
}

bool any_flagged(const std::vector<BenchRow>& rows) {
  for (const auto& r : rows)
    if (r.flagged) return true;
  return false;
}

BenchConfig BenchConfig::paper_defaults() {
  BenchConfig cfg;
  cfg.sizes = {512, 4096};
  cfg.reps = 1000;
  // The reference experiments' lag-1 AR coefficient 0.8 corresponds to the
  // polynomial 1 + 0.8 B, i.e. phi_1 = -0.8 in the 1 - sum phi_k z^k convention.
  const std::vector<double> ar1 = {-0.8};
  for (double d : {-1.2, 0.0, 0.3, 1.5, 2.5, 3.5}) {
    for (int p : {0, 1}) {
      ModelSpec s;
      s.kind = ModelKind::ARFIMA;
      s.d = d;
      if (p) s.ar = ar1;
      cfg.models.push_back({s.label(), s});
    }
  }
  for (double d : {0.0, 0.3}) {
    for (int p : {0, 1}) {
      ModelSpec s;
      s.kind = ModelKind::DARFIMA;
      s.d = d;
      s.lambda0 = 1.5707963267948966;
      if (p) s.ar = ar1;
      cfg.models.push_back({s.label(), s});
    }
  }
  for (auto kind : {ModelKind::SUBORD1, ModelKind::SUBORD2}) {
    for (double d : {0.0, 0.3}) {
      for (int p : {0, 1}) {
        ModelSpec s;
        s.kind = kind;
        s.d = d;
        if (p) s.ar = ar1;
        cfg.models.push_back({s.label(), s});
      }
    }
  }
  EstimatorGrid gph;
  gph.method = Method::GPH;
  gph.bandwidths = {5, 8, 12, 17, 26, 37, 54, 78, 110, 155, 224};
  EstimatorGrid lwf;
  lwf.method = Method::LWF;
  lwf.bandwidths = {45, 72, 108, 153, 234, 486, 990, 2016};
  EstimatorGrid lrw;
  lrw.method = Method::LRW;
  lrw.lower_scales = {1, 2, 3, 4, 5};
  EstimatorGrid lww;
  lww.method = Method::LWW;
  lww.lower_scales = {1, 2, 3, 4, 5};
  cfg.estimators = {gph, lwf, lrw, lww};
  return cfg;
}

BenchConfig BenchConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  BenchConfig cfg;
  if (j.contains("reps")) cfg.reps = j["reps"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  if (j.contains("sizes")) cfg.sizes = j["sizes"].get<std::vector<long>>();
  if (!j.contains("models") || !j.contains("estimators"))
    throw std::invalid_argument("bench config: need 'models' and 'estimators'");
  for (const auto& jm : j["models"]) {
    ModelSpec s;
    const std::string kind = jm.value("kind", "arfima");
    if (kind == "arfima") s.kind = ModelKind::ARFIMA;
    else if (kind == "darfima") s.kind = ModelKind::DARFIMA;
    else if (kind == "fgn") s.kind = ModelKind::FGN;
    else if (kind == "subord1") s.kind = ModelKind::SUBORD1;
    else if (kind == "subord2") s.kind = ModelKind::SUBORD2;
    else throw std::invalid_argument("bench config: unknown model kind " + kind);
    s.d = jm.value("d", 0.0);
    if (jm.contains("ar")) s.ar = jm["ar"].get<std::vector<double>>();
    if (jm.contains("ma")) s.ma = jm["ma"].get<std::vector<double>>();
    s.sigma2 = jm.value("sigma2", 1.0);
    s.lambda0 = jm.value("lambda0", 1.5707963267948966);
    s.H = jm.value("H", 0.7);
    s.sinc_halfwidth = jm.value("sinc_halfwidth", 512);
    cfg.models.push_back({jm.value("label", s.label()), s});
  }
  for (const auto& je : j["estimators"]) {
    EstimatorGrid g;
    const std::string m = je.at("method").get<std::string>();
    if (m == "gph") g.method = Method::GPH;
    else if (m == "lwf") g.method = Method::LWF;
    else if (m == "lrw") g.method = Method::LRW;
    else if (m == "lww") g.method = Method::LWW;
    else throw std::invalid_argument("bench config: unknown method " + m);
    if (je.contains("m")) g.bandwidths = je["m"].get<std::vector<int>>();
    if (je.contains("L")) g.lower_scales = je["L"].get<std::vector<int>>();
    g.p = je.value("p", 4);
    g.tau = je.value("tau", 5);
    g.delta = je.value("delta", 4);
    g.wavelet_M = je.value("wavelet_M", 4);
    cfg.estimators.push_back(g);
  }
  return cfg;
}

}  // namespace lrd

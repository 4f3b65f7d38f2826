#ifndef LRD_BENCH_HPP
#define LRD_BENCH_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lrd/estimate.hpp"
#include "lrd/simulate.hpp"

namespace lrd {

struct EstimatorGrid {
  Method method = Method::LWW;
  std::vector<int> bandwidths;   // m grid (GPH/LWF)
  std::vector<int> lower_scales; // L grid (LRW/LWW); U = J_n
  int p = 4;
  int tau = 5;
  int delta = 4;
  int wavelet_M = 4;
  LrwWeights weights = LrwWeights::AbryVeitch;
};

struct BenchModel {
  std::string label;
  ModelSpec spec;
};

struct BenchConfig {
  std::vector<BenchModel> models;
  std::vector<long> sizes = {512, 4096};
  int reps = 1000;
  std::uint64_t seed = 20240901;
  std::vector<EstimatorGrid> estimators;
  int threads = 0;  // 0: hardware default (or LRD_THREADS)

  static BenchConfig from_json(const std::string& text);
  static BenchConfig paper_defaults();  // section-9 models and tuning grids
};

struct BenchRow {
  std::string model;
  std::string method;
  long n = 0;
  int tuning = 0;       // m or L
  double bias = 0.0;
  double std = 0.0;
  double rmse = 0.0;
  bool optimal = false;
  int failures = 0;
  bool flagged = false;          // > 1% failed replicates
  double bootstrap_se_bias = 0.0;
  double bootstrap_se_std = 0.0;
  double equiv_bandwidth = 0.0;  // m (LWF), m(p+tau) (GPH), half coefficient count (wavelets)
};

// Deterministic in (config, seed) regardless of worker count: replicate r of
// model i draws from RngStream(seed, i * 2^32 + r).
std::vector<BenchRow> run_bench(const BenchConfig& cfg,
                                const std::function<void(const std::string&)>& progress = {});

// (equivalent bandwidth, rmse) pairs for one model+method, Figure-6 style.
std::vector<std::pair<double, double>> mse_curve(const std::vector<BenchRow>& rows,
                                                 const std::string& model,
                                                 const std::string& method, long n);

std::string rows_to_csv(const std::vector<BenchRow>& rows);
bool any_flagged(const std::vector<BenchRow>& rows);

}  // namespace lrd

#endif

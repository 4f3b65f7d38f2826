#ifndef LRD_SIMULATE_HPP
#define LRD_SIMULATE_HPP

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "lrd/rng.hpp"
#include "lrd/series_ops.hpp"

namespace lrd {

enum class ModelKind { ARFIMA, DARFIMA, FGN, SUBORD1, SUBORD2 };

struct ModelSpec {
  ModelKind kind = ModelKind::ARFIMA;
  double d = 0.0;                 // target memory parameter
  std::vector<double> ar;         // phi_1..phi_p, AR polynomial 1 - sum phi_k z^k
  std::vector<double> ma;         // theta_1..theta_q
  double sigma2 = 1.0;            // innovation variance
  double lambda0 = 1.5707963267948966;  // DARFIMA cutoff
  double H = 0.7;                 // FGN Hurst index
  int sinc_halfwidth = 512;       // DARFIMA kernel truncation Lf

  void validate() const;
  std::string label() const;
};

// Exact stationary Gaussian sampling by circulant embedding of a Toeplitz
// autocovariance. Construction may escalate the embedding size; sampling is
// const and thread-safe given independent streams.
class CirculantSampler {
 public:
  // gamma must provide lags 0..m with m >= n-1
  CirculantSampler(const Eigen::VectorXd& gamma, long n, int max_doublings = 3);
  TimeSeries sample(RngStream& rng) const;
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  long size() const { return n_; }

 private:
  long n_ = 0;
  Eigen::VectorXd lambda_;  // circulant eigenvalues (clipped at 0)
};

// Autocovariance of the stationary ARFIMA(p, ds, q), ds in [-1/2, 1/2), at
// lags 0..nlags, by FFT quadrature of the spectral density with an analytic
// treatment of the |lambda|^{-2 ds} endpoint.
Eigen::VectorXd arfima_autocovariance(double ds, const std::vector<double>& ar,
                                      const std::vector<double>& ma, double sigma2,
                                      long nlags);

// FGN autocovariance, gamma(h) = (|h+1|^{2H} + |h-1|^{2H} - 2|h|^{2H})/2.
Eigen::VectorXd fgn_autocovariance(double H, long nlags);

// Memory decomposition d = k + ds with k = floor(d + 1/2), ds in [-1/2, 1/2).
std::pair<int, double> split_memory(double d);

// Exact ARFIMA(p,d,q) for any real d: stationary part by circulant embedding,
// then k-fold integration (k < 0 differences).
TimeSeries gen_arfima(const ModelSpec& spec, long n, RngStream& rng);

TimeSeries gen_fgn(double H, long n, RngStream& rng);

// ARFIMA low-pass filtered by a truncated sinc kernel with cutoff lambda0.
TimeSeries gen_darfima(const ModelSpec& spec, long n, RngStream& rng);

// X_t = G(Y_t) with G = exp (rank 1) or H_2 (rank 2); Y is a unit-variance
// Gaussian ARFIMA path with d_Y solving the Hermite-rank memory map.
TimeSeries gen_subord(ModelKind kind, double d_target, const ModelSpec& base, long n,
                      RngStream& rng);

// Dispatch on spec.kind.
TimeSeries generate(const ModelSpec& spec, long n, RngStream& rng);

// One-time setup (autocovariance quadrature, embedding) hoisted out of the
// sampling path; the returned closure is const-callable and thread-safe with
// independent streams. Used by the Monte-Carlo bench.
std::function<TimeSeries(RngStream&)> make_generator(const ModelSpec& spec, long n);

}  // namespace lrd

#endif

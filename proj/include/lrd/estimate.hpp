#ifndef LRD_ESTIMATE_HPP
#define LRD_ESTIMATE_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>

#include "lrd/asympvar.hpp"
#include "lrd/fourier.hpp"
#include "lrd/series_ops.hpp"
#include "lrd/wavelet.hpp"

namespace lrd {

struct FourierTuning {
  int m = 50;        // bandwidth: pooled-block count (GPH) / raw-frequency count (LWF)
  int p = 1;         // pooling order (GPH only)
  int tau = 0;       // taper order
  int delta = 0;     // differencing order
  int trim = 0;      // leading blocks/frequencies to skip
  std::optional<std::pair<double, double>> range;  // minimization interval for LWF
};

enum class LrwWeights { AbryVeitch, Optimal, Explicit };

struct WaveletTuning {
  int L = 3;                     // lower scale
  std::optional<int> U;          // upper scale; default J_n
  int delta = 0;                 // optional pre-differencing
  LrwWeights weights = LrwWeights::AbryVeitch;
  std::optional<double> pilot_d;            // pilot for Optimal (default: AV estimate)
  std::optional<Eigen::VectorXd> explicit_weights;
  std::optional<std::pair<double, double>> range;  // minimization interval for LWW
};

enum class Method { GPH, LWF, LRW, LWW };

struct EstimateResult {
  Method method = Method::GPH;
  double d_hat = 0.0;
  double std = 0.0;
  std::optional<double> std_asymptotic;   // GPH: sigma^2_{p,tau}/(4m) form
  std::optional<double> intercept;        // LRW: multiplicative constant c
  std::optional<Eigen::VectorXd> weights_used;
  // tuning snapshot
  int m = 0, p = 0, tau = 0, delta = 0, trim = 0;
  int L = 0, U = 0;
  bool minimizer_interior = true;
  std::string to_json() const;
};

// Weights of length ell+1 with sum w = 0 and 2 log2 sum i w_i = 1.
Eigen::VectorXd av_weights(int ell);

// Sigma^{-1}-weighted generalized least squares weights at pilot d.
Eigen::VectorXd optimal_weights(double d, int ell, const WaveletSpec& w);

// Log-periodogram regression on the pooled tapered periodogram.
EstimateResult gph(const Eigen::Ref<const TimeSeries>& x, const FourierTuning& t);

// Local Whittle on the raw tapered periodogram (pooling irrelevant).
EstimateResult lwf(const Eigen::Ref<const TimeSeries>& x, const FourierTuning& t);

// Log-regression of the wavelet scale spectrum.
EstimateResult lrw(const Eigen::Ref<const TimeSeries>& x, const WaveletTuning& t,
                   const WaveletSpec& w);

// Local Whittle wavelet contrast.
EstimateResult lww(const Eigen::Ref<const TimeSeries>& x, const WaveletTuning& t,
                   const WaveletSpec& w);

// d +- z_{(1+level)/2} * std.
std::pair<double, double> confidence_interval(double d, double std, double level);

// --- fit cores (no asymptotic-variance attachment); used by bench and tests ---

// returns (d_hat, S = sum (g - gbar)^2)
std::pair<double, double> gph_fit(const PooledPeriodogram& pp, int m, int trim, int delta);

// profile-likelihood minimizer on given ordinates; returns d_hat (already + delta)
double lwf_fit(const Eigen::Ref<const Eigen::ArrayXd>& ordinates,
               const Eigen::Ref<const Eigen::ArrayXd>& freqs, int delta,
               std::optional<std::pair<double, double>> range, bool* interior = nullptr);

// weighted log-regression over scales L..U given per-scale log variances;
// returns (d_hat, log_intercept)
std::pair<double, double> lrw_fit(const Eigen::Ref<const Eigen::VectorXd>& log_sig2, int L,
                                  const Eigen::Ref<const Eigen::VectorXd>& weights);

// LWW contrast minimizer from per-scale energies and counts
double lww_fit(const Eigen::Ref<const Eigen::VectorXd>& energies,
               const Eigen::Ref<const Eigen::VectorXd>& counts, int L,
               std::optional<std::pair<double, double>> range, bool* interior = nullptr);

}  // namespace lrd

#endif

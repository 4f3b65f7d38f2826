#ifndef LRD_FOURIER_HPP
#define LRD_FOURIER_HPP

#include <Eigen/Core>
#include <complex>
#include <string>

#include "lrd/series_ops.hpp"

namespace lrd {

// D(lambda_j) = (2 pi n)^{-1/2} sum_t x_t e^{i t lambda_j} at lambda_j = 2 pi j / n,
// j = 1..floor((n-1)/2).
Eigen::VectorXcd dft(const Eigen::Ref<const TimeSeries>& x);

// Full-grid DFT (j = 0..n-1), used by the Parseval sanity test.
Eigen::VectorXcd dft_full(const Eigen::Ref<const TimeSeries>& x);

struct TaperedPeriodogram {
  int tau = 0;
  double a_tau = 1.0;             // n^{-1} sum |h_t|^{2 tau}
  Eigen::ArrayXd ordinates;       // I_tau(lambda_j), j = 1..ntilde
  Eigen::ArrayXd frequencies;     // lambda_j
  long n = 0;
};

// Complex Hurvich-Chen taper h_t = 1 - e^{2 i pi t / n} raised to tau.
// The sample mean is subtracted first only for tau = 0 (tau >= 1 is exactly
// shift-invariant at the retained frequencies).
TaperedPeriodogram tapered_periodogram(const Eigen::Ref<const TimeSeries>& x, int tau);

struct PooledPeriodogram {
  int p = 1;
  int tau = 0;
  long K = 0;                     // floor((n-1) / (2(p+tau)))
  Eigen::ArrayXd ordinates;       // Ibar_{p,tau}(lambda~_k), k = 1..K
  Eigen::ArrayXd central_freqs;   // (2(p+tau)(k-1) + p + tau + 1) pi / n
};

// Block k sums ordinates j = (p+tau)(k-1)+1 .. (p+tau)(k-1)+p; the tau
// ordinates at the end of each block are skipped.
PooledPeriodogram pool(const TaperedPeriodogram& tp, int p);

void dump_periodogram_csv(const TaperedPeriodogram& tp, const std::string& path);
void dump_pooled_csv(const PooledPeriodogram& pp, const std::string& path);

}  // namespace lrd

#endif

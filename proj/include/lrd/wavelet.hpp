#ifndef LRD_WAVELET_HPP
#define LRD_WAVELET_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "lrd/series_ops.hpp"

namespace lrd {

// Daubechies family descriptor: M vanishing moments, orthonormal filter pair
// of length T = 2M, Fourier decay exponent alpha of the wavelet.
struct WaveletSpec {
  int vanishing_moments = 0;    // M
  Eigen::VectorXd lowpass;      // sums to sqrt(2)
  Eigen::VectorXd highpass;     // quadrature mirror, sums to 0
  int support = 0;              // T = 2M
  double alpha = 0.0;           // decay exponent of psi_hat
};

// M in 1..10; alpha from the tabulated values for M in {2,4}, else the
// analytic lower bound (1 - log2(3)/2) M (conservative for admissible ranges).
WaveletSpec daubechies(int M);

// n_j = floor(2^-j (n - T + 1) - T + 1); may be <= 0 (caller filters).
long n_available(long n, int T, int j);

// Largest j with n_available(n,T,j) >= 1; throws if even scale 0 is empty.
int max_scale(long n, int T);

// Boundary-free coefficients W_{j,k}, 0 <= k < n_j, for j = 0..J.
struct WaveletPyramid {
  std::vector<Eigen::VectorXd> coeffs;  // coeffs[j] has n_available(n,T,j) entries
  std::vector<long> counts;
  int J = 0;
  long n = 0;
};

// Pyramidal transform. Scale 0 is the undecimated highpass output; scale j>=1
// is the detail of the j-th cascade stage (valid convolutions only, so every
// retained coefficient depends on x_1..x_n alone). The first n_j coefficients
// of each scale are retained; the scale-j coefficient k covers
// x_{2^j k + 1} .. x_{2^j k + (2^j-1)(T-1)+T} (offset 0 alignment).
WaveletPyramid pyramid(const Eigen::Ref<const TimeSeries>& x, const WaveletSpec& w,
                       std::optional<int> J = std::nullopt);

// Empirical second moment n_j^{-1} sum_k W_{j,k}^2 at scale j.
double scale_spectrum(const WaveletPyramid& p, int j);

// Equivalent filter of scale j (the pyramid applied to a unit impulse train),
// used by tests to check the transform against direct convolution+downsample.
Eigen::VectorXd equivalent_filter(const WaveletSpec& w, int j);

// Debug dump: CSV with columns scale,k,coefficient.
void dump_pyramid_csv(const WaveletPyramid& p, const std::string& path);

}  // namespace lrd

#endif

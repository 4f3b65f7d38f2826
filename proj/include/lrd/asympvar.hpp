#ifndef LRD_ASYMPVAR_HPP
#define LRD_ASYMPVAR_HPP

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lrd/wavelet.hpp"

namespace lrd {

// Sentinel for the ell -> infinity limits.
inline constexpr int kInfScales = -1;

// psi_hat sampled on a self-similar dyadic grid: octave e holds the nodes
// 2^e * t_i with t_i Gauss-Legendre nodes on [pi, 2pi), so psi_hat(2^-u xi)
// is an exact table lookup u octaves down. Built from the filter cascade
// psi_hat(xi) = m1(xi/2) prod_k m0(xi/2^k).
struct WaveletFourierTable {
  int M = 0;
  double alpha = 0.0;
  int nodes_per_octave = 0;
  int octave_min = 0;                 // lowest exponent e
  int octave_max = 0;                 // highest exponent e
  Eigen::ArrayXd base_nodes;          // t_i in [pi, 2pi)
  Eigen::ArrayXd base_weights;
  std::vector<Eigen::ArrayXcd> values;  // values[e - octave_min][i] = psi_hat(2^e t_i)
  double head_c0 = 0.0;               // |psi_hat|^2 ~ head_c0 * xi^{2M} as xi -> 0
  double tail_c2 = 0.0;               // |psi_hat|^2 ~ tail_c2 * xi^{-2 alpha} at the top
};

WaveletFourierTable psi_hat_table(const WaveletSpec& w, int depth = 40,
                                  int nodes_per_octave = 2048, int octave_min = -30,
                                  int octave_max = 6);

// Cached shared table per (M, nodes_per_octave); immutable after construction.
std::shared_ptr<const WaveletFourierTable> shared_psi_table(const WaveletSpec& w);

// K(psi, d) = int |xi|^{-2d} |psi_hat|^2 dxi, admissible for 1/2 - alpha < d < M + 1/2.
double K_psi(double d, const WaveletFourierTable& t);

// I_u(d) = (2 pi)^{-1} sum_tau Cov^2(W_{0,0}, W_{-u,tau}) of the generalized-FBM
// wavelet coefficients; series truncated when terms drop below 1e-10 of the sum.
double I_u(double d, int u, const WaveletFourierTable& t);

// Sigma(d,ell)[i][j] = 4 pi 2^{2d|i-j|} 2^{min(i,j)} / K^2 * I_{|i-j|}(d).
Eigen::MatrixXd sigma_matrix(double d, int ell, const WaveletFourierTable& t);

// Abry-Veitch-weight variance V(d, ell); ell = kInfScales gives the limit form.
double v_av(double d, int ell, const WaveletFourierTable& t);

// Optimal-weight variance b^T (B^T Sigma^{-1} B)^{-1} b.
double v_opt(double d, int ell, const WaveletFourierTable& t);

// Shannon-wavelet closed form; any real d; ell = kInfScales allowed.
double v_shannon(double d, int ell);

// Shannon reference quantities (closed forms used by tests).
double shannon_K(double d);
double shannon_I0(double d);
double g_band_integral(double x);  // int_pi^2pi lambda^x dlambda

// Phi(tau) = Gamma(4 tau + 1) Gamma^4(tau + 1) / Gamma^4(2 tau + 1).
double phi_tau(int tau);

struct Sigma2Pool {
  int p = 1;
  int tau = 0;
  double sigma2 = 0.0;
  double stderr_ = 0.0;
  long long ordinates = 0;
  std::uint64_t seed = 0;
};

// Var[log pooled tapered periodogram] of Gaussian white noise. tau = 0 is the
// exact trigamma(p); tau >= 1 runs a seeded Monte Carlo over white-noise
// series (>= min_ordinates pooled ordinates, band edges dropped). Results are
// cached in-process, seeded entries loadable from the constants file.
Sigma2Pool sigma2_pool(int p, int tau, long long min_ordinates = 1000000,
                       std::uint64_t seed = 20240901);

// Lines of "p tau sigma2 stderr ordinates seed"; '#' comments.
void load_sigma2_table(const std::string& path);
void save_sigma2_entry(const std::string& path, const Sigma2Pool& entry);

// Structural identity of Corollary 1: the LWW theorem variance and the
// LRW/Abry-Veitch quadratic form are the same formula; true when the two code
// paths agree to 1e-10 relative.
bool lww_lrw_av_equality_check(double d, int ell, const WaveletFourierTable& t);

struct VarianceReport {
  double d = 0.0;
  int ell = 0;
  double v_av = 0.0;
  double v_opt = 0.0;
  double v_shannon = 0.0;
  Eigen::VectorXd optimal_weights;
  Eigen::MatrixXd sigma;
};

VarianceReport variance_report(double d, int ell, const WaveletSpec& w);

}  // namespace lrd

#endif

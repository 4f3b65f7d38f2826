#include "lrd/fourier.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace lrd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sum_{t=1}^{n} y_t e^{+ i t lambda_j} for j = 0..n-1, with y stored 0-based
// (y[t-1] = y_t). Equals conj(FFT(y))_j * e^{... phase for the t-offset}.
Eigen::VectorXcd forward_sum(const Eigen::VectorXcd& y) {
  const long n = y.size();
  Eigen::FFT<double> fft;
  // FFT_j = sum_{s=0}^{n-1} c[s] e^{-2 pi i j s / n}; with c = conj(y),
  // S_j = sum_t y[t-1] e^{+2 pi i j t / n} = e^{2 pi i j / n} * conj(FFT(conj(y)))_j
  Eigen::VectorXcd yc = y.conjugate();
  Eigen::VectorXcd Yc(n);
  fft.fwd(Yc, yc);
  Eigen::VectorXcd out(n);
  for (long j = 0; j < n; ++j) {
    const double ph = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    out[j] = std::polar(1.0, ph) * std::conj(Yc[j]);
  }
  return out;
}

}  // namespace

Eigen::VectorXcd dft_full(const Eigen::Ref<const TimeSeries>& x) {
  const long n = x.size();
  Eigen::VectorXcd y = x.cast<std::complex<double>>();
  Eigen::VectorXcd S = forward_sum(y);
  return S / std::sqrt(kTwoPi * static_cast<double>(n));
}

Eigen::VectorXcd dft(const Eigen::Ref<const TimeSeries>& x) {
  const long n = x.size();
  if (n < 3) throw std::invalid_argument("dft: need n >= 3 for interior Fourier frequencies");
  Eigen::VectorXcd full = dft_full(x);
  const long ntilde = (n - 1) / 2;
  return full.segment(1, ntilde);
}

TaperedPeriodogram tapered_periodogram(const Eigen::Ref<const TimeSeries>& x, int tau) {
  const long n = x.size();
  if (tau < 0) throw std::invalid_argument("tapered_periodogram: tau must be >= 0");
  if (n < 2L * (tau + 1))
    throw std::invalid_argument("tapered_periodogram: n=" + std::to_string(n) +
                                " too small for taper order " + std::to_string(tau));
  TaperedPeriodogram out;
  out.tau = tau;
  out.n = n;

  Eigen::VectorXcd y(n);
  double a = 0.0;
  const double mean = tau == 0 ? x.mean() : 0.0;
  for (long t = 1; t <= n; ++t) {
    const std::complex<double> h =
        1.0 - std::polar(1.0, kTwoPi * static_cast<double>(t) / static_cast<double>(n));
    std::complex<double> ht = 1.0;
    for (int r = 0; r < tau; ++r) ht *= h;
    a += std::pow(std::abs(h), 2 * tau);
    y[t - 1] = ht * (x[t - 1] - mean);
  }
  out.a_tau = a / static_cast<double>(n);

  Eigen::VectorXcd S = forward_sum(y);
  const long ntilde = (n - 1) / 2;
  out.ordinates.resize(ntilde);
  out.frequencies.resize(ntilde);
  const double norm = 1.0 / (kTwoPi * static_cast<double>(n) * out.a_tau);
  for (long j = 1; j <= ntilde; ++j) {
    out.ordinates[j - 1] = std::norm(S[j]) * norm;
    out.frequencies[j - 1] = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
  }
  return out;
}

PooledPeriodogram pool(const TaperedPeriodogram& tp, int p) {
  if (p < 1) throw std::invalid_argument("pool: p must be >= 1");
  const long n = tp.n;
  const int tau = tp.tau;
  const long K = (n - 1) / (2L * (p + tau));
  if (K < 1)
    throw std::invalid_argument("pool: no complete block (n=" + std::to_string(n) +
                                ", p=" + std::to_string(p) + ", tau=" + std::to_string(tau) + ")");
  PooledPeriodogram out;
  out.p = p;
  out.tau = tau;
  out.K = K;
  out.ordinates.resize(K);
  out.central_freqs.resize(K);
  for (long k = 1; k <= K; ++k) {
    const long lo = (p + tau) * (k - 1) + 1;  // 1-based ordinate index
    out.ordinates[k - 1] = tp.ordinates.segment(lo - 1, p).sum();
    out.central_freqs[k - 1] = (2.0 * (p + tau) * (k - 1) + p + tau + 1) * std::numbers::pi /
                               static_cast<double>(n);
  }
  return out;
}

void dump_periodogram_csv(const TaperedPeriodogram& tp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "freq,ordinate\n";
  char buf[64];
  for (long j = 0; j < tp.ordinates.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", tp.frequencies[j], tp.ordinates[j]);
    out << buf;
  }
}

void dump_pooled_csv(const PooledPeriodogram& pp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "block,freq,ordinate\n";
  char buf[80];
  for (long k = 0; k < pp.K; ++k) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", k + 1, pp.central_freqs[k],
                  pp.ordinates[k]);
    out << buf;
  }
}

}  // namespace lrd

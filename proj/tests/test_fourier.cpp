#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "lrd/fourier.hpp"
#include "lrd/rng.hpp"
#include "lrd/simulate.hpp"

using lrd::TimeSeries;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXcd dft_direct(const TimeSeries& x) {
  const long n = x.size();
  const long ntilde = (n - 1) / 2;
  Eigen::VectorXcd out(ntilde);
  for (long j = 1; j <= ntilde; ++j) {
    std::complex<double> s(0, 0);
    for (long t = 1; t <= n; ++t)
      s += x[t - 1] * std::polar(1.0, kTwoPi * j * t / static_cast<double>(n));
    out[j - 1] = s / std::sqrt(kTwoPi * n);
  }
  return out;
}
}  // namespace

TEST_CASE("dft of a constant vanishes at interior frequencies") {
  TimeSeries x = TimeSeries::Constant(32, 4.2);
  const auto d = lrd::dft(x);
  CHECK(d.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dft concentrates a pure cosine") {
  const long n = 64;
  TimeSeries x(n);
  const double lam5 = kTwoPi * 5.0 / n;
  for (long t = 1; t <= n; ++t) x[t - 1] = std::cos(lam5 * t);
  const auto d = lrd::dft(x);
  long arg = 0;
  d.cwiseAbs().maxCoeff(&arg);
  CHECK(arg == 4);  // j = 5 is index 4
  const double peak = std::abs(d[4]);
  for (long j = 0; j < d.size(); ++j)
    if (j != 4) CHECK(std::abs(d[j]) < 1e-9 * peak);
}

TEST_CASE("fft path equals the direct sum") {
  lrd::RngStream rng(1, 1);
  for (long n : {8L, 13L, 64L}) {
    TimeSeries x(n);
    for (long i = 0; i < n; ++i) x[i] = rng.next_normal();
    const auto a = lrd::dft(x);
    const auto b = dft_direct(x);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(lrd::dft(TimeSeries::Ones(2)), std::invalid_argument);
}

TEST_CASE("full-grid parseval") {
  lrd::RngStream rng(2, 0);
  const long n = 257;
  TimeSeries x(n);
  for (long i = 0; i < n; ++i) x[i] = rng.next_normal();
  x.array() -= x.mean();
  const auto full = lrd::dft_full(x);
  const double lhs = kTwoPi / n * full.cwiseAbs2().sum();
  CHECK(lhs == doctest::Approx(x.squaredNorm() / n).epsilon(1e-9));
}

TEST_CASE("taper order zero reduces to the plain periodogram") {
  lrd::RngStream rng(3, 0);
  const long n = 100;
  TimeSeries x(n);
  for (long i = 0; i < n; ++i) x[i] = rng.next_normal() + 2.0;
  const auto tp = lrd::tapered_periodogram(x, 0);
  const auto d = lrd::dft(x);
  CHECK(tp.a_tau == doctest::Approx(1.0));
  for (long j = 0; j < d.size(); ++j)
    CHECK(tp.ordinates[j] == doctest::Approx(std::norm(d[j])).epsilon(1e-10));
}

TEST_CASE("tapered ordinates invariant to mean shift for tau >= 1") {
  lrd::RngStream rng(4, 0);
  const long n = 128;
  TimeSeries x(n);
  for (long i = 0; i < n; ++i) x[i] = rng.next_normal();
  for (int tau : {1, 2, 5}) {
    const auto a = lrd::tapered_periodogram(x, tau);
    const TimeSeries xs = x.array() + 17.5;
    const auto b = lrd::tapered_periodogram(xs, tau);
    const long keep = a.ordinates.size() - tau;
    for (long j = 0; j < keep; ++j)
      CHECK(b.ordinates[j] ==
            doctest::Approx(a.ordinates[j]).epsilon(1e-10).scale(a.ordinates[j] + 1e-300));
  }
  CHECK_THROWS_AS(lrd::tapered_periodogram(TimeSeries::Ones(5), 3), std::invalid_argument);
}

TEST_CASE("white-noise tapered periodogram averages to 1/(2 pi)") {
  const long n = 512;
  const int reps = 1000;
  double acc = 0.0;
  long cnt = 0;
  for (int r = 0; r < reps; ++r) {
    lrd::RngStream rng(77, r);
    TimeSeries x(n);
    for (long i = 0; i < n; ++i) x[i] = rng.next_normal();
    const auto tp = lrd::tapered_periodogram(x, 1);
    acc += tp.ordinates.sum();
    cnt += tp.ordinates.size();
  }
  CHECK(acc / cnt == doctest::Approx(1.0 / kTwoPi).epsilon(0.03));
}

TEST_CASE("pooling block structure") {
  lrd::RngStream rng(5, 0);
  const long n = 101;
  TimeSeries x(n);
  for (long i = 0; i < n; ++i) x[i] = rng.next_normal();
  const auto tp = lrd::tapered_periodogram(x, 5);
  const auto pp = lrd::pool(tp, 4);
  CHECK(pp.K == 5);  // floor(100/18)
  // conservation of summed mass over the used ordinates
  double used = 0.0;
  for (long k = 0; k < pp.K; ++k)
    for (int i = 0; i < 4; ++i) used += tp.ordinates[9 * k + i];
  CHECK(pp.ordinates.sum() == doctest::Approx(used).epsilon(1e-14));
  // central frequencies
  for (long k = 1; k <= pp.K; ++k)
    CHECK(pp.central_freqs[k - 1] ==
          doctest::Approx((2.0 * 9 * (k - 1) + 10) * std::numbers::pi / n));
}

TEST_CASE("degenerate pooling p=1 tau=0") {
  lrd::RngStream rng(6, 0);
  const long n = 64;
  TimeSeries x(n);
  for (long i = 0; i < n; ++i) x[i] = rng.next_normal();
  const auto tp = lrd::tapered_periodogram(x, 0);
  const auto pp = lrd::pool(tp, 1);
  CHECK(pp.K == (n - 1) / 2);
  for (long k = 0; k < pp.K; ++k) {
    CHECK(pp.ordinates[k] == doctest::Approx(tp.ordinates[k]));
    CHECK(pp.central_freqs[k] == doctest::Approx(tp.frequencies[k]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(lrd::pool(lrd::tapered_periodogram(TimeSeries::Ones(12).eval(), 2), 4),
                  std::invalid_argument);
}

TEST_CASE("higher taper order controls leakage on a steep spectrum" *
          doctest::timeout(600)) {
  // AR(1) with coefficient 0.8 against a white-noise calibration run; the
  // distributional constant of log I_tau cancels in the difference.
  const long n = 1 << 12;
  const int reps = 200;
  const int band = 16;
  lrd::ModelSpec ar;
  ar.kind = lrd::ModelKind::ARFIMA;
  ar.d = 0.0;
  ar.ar = {0.8};
  const auto gen = lrd::make_generator(ar, n);
  const auto fdens = [&](double lam) {
    const std::complex<double> den = 1.0 - 0.8 * std::polar(1.0, -lam);
    return 1.0 / (kTwoPi * std::norm(den));
  };
  double bias[3] = {0, 0, 0};
  for (int tau : {0, 1, 2}) {
    double ar_term = 0.0, wn_term = 0.0;
    long cnt = 0;
    for (int r = 0; r < reps; ++r) {
      lrd::RngStream rng(123, r);
      const TimeSeries x = gen(rng);
      const auto tp = lrd::tapered_periodogram(x, tau);
      lrd::RngStream rng2(456, r);
      TimeSeries z(n);
      for (long i = 0; i < n; ++i) z[i] = rng2.next_normal();
      const auto tz = lrd::tapered_periodogram(z, tau);
      for (int j = 0; j < band; ++j) {
        ar_term += std::log(tp.ordinates[j] / fdens(tp.frequencies[j]));
        wn_term += std::log(tz.ordinates[j] * kTwoPi);
        ++cnt;
      }
    }
    bias[tau] = (ar_term - wn_term) / cnt;
  }
  // qualitative: leakage bias magnitude near 0 non-increasing in tau (small slack)
  CHECK(std::abs(bias[1]) <= std::abs(bias[0]) + 0.02);
  CHECK(std::abs(bias[2]) <= std::abs(bias[1]) + 0.02);
}

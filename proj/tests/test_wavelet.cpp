#include <doctest.h>

#include <cmath>

#include "lrd/rng.hpp"
#include "lrd/wavelet.hpp"

using lrd::TimeSeries;

TEST_CASE("daubechies filter invariants") {
  for (int M = 1; M <= 10; ++M) {
    const auto w = lrd::daubechies(M);
    CHECK(w.support == 2 * M);
    CHECK(w.lowpass.size() == 2 * M);
    CHECK(w.lowpass.sum() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(w.highpass.sum()) < 1e-12);
    CHECK(w.lowpass.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    // M vanishing moments of the highpass; centered powers keep the
    // cancellation well-conditioned (equivalent statement by binomial expansion)
    const double c = (2.0 * M - 1.0) / 2.0;
    for (int m = 0; m < M; ++m) {
      double mom = 0.0;
      for (int l = 0; l < 2 * M; ++l) mom += std::pow(l - c, m) * w.highpass[l];
      CHECK(std::abs(mom) < 1e-8);
    }
    CHECK(w.alpha >= (1.0 - std::log2(3.0) / 2.0) * M - 1e-12);
  }
  CHECK_THROWS_AS(lrd::daubechies(0), std::invalid_argument);
  CHECK_THROWS_AS(lrd::daubechies(11), std::invalid_argument);
}

TEST_CASE("haar pair") {
  const auto w = lrd::daubechies(1);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(w.lowpass[0] == doctest::Approx(r).epsilon(1e-15));
  CHECK(w.lowpass[1] == doctest::Approx(r).epsilon(1e-15));
  CHECK(w.highpass[0] == doctest::Approx(r).epsilon(1e-15));
  CHECK(w.highpass[1] == doctest::Approx(-r).epsilon(1e-15));
}

TEST_CASE("tabulated alpha") {
  CHECK(lrd::daubechies(2).alpha == doctest::Approx(1.34));
  CHECK(lrd::daubechies(4).alpha == doctest::Approx(1.91));
  CHECK(lrd::daubechies(4).support == 8);
}

TEST_CASE("n_available formula") {
  CHECK(lrd::n_available(4096, 8, 1) == 2037);
  CHECK(lrd::n_available(8, 8, 0) == 2 - 8);
  CHECK(lrd::n_available(512, 8, 9) == -7);
  CHECK(lrd::n_available(101, 2, 0) == 99);
}

TEST_CASE("max_scale by brute scan") {
  const auto brute = [](long n, int T) {
    int j = 0;
    while (lrd::n_available(n, T, j + 1) >= 1) ++j;
    return j;
  };
  for (long n : {64L, 100L, 512L, 777L, 4096L}) {
    for (int T : {2, 4, 8, 12}) {
      if (lrd::n_available(n, T, 0) < 1) continue;
      CHECK(lrd::max_scale(n, T) == brute(n, T));
    }
  }
  CHECK(lrd::max_scale(4096, 8) == 8);
  CHECK(lrd::max_scale(4096, 4) == 9);   // matches the reference session's U = J = 9
  CHECK(lrd::max_scale(4096, 2) == 10);
  CHECK(lrd::max_scale(64, 8) == 2);
  CHECK_THROWS_AS(lrd::max_scale(8, 8), std::invalid_argument);
}

TEST_CASE("pyramid counts equal availability for all scales") {
  lrd::RngStream rng(3, 1);
  for (int M : {1, 2, 4}) {
    const auto w = lrd::daubechies(M);
    for (long n : {100L, 512L, 777L, 4096L}) {
      TimeSeries x(n);
      for (long i = 0; i < n; ++i) x[i] = rng.next_normal();
      const auto p = lrd::pyramid(x, w);
      CHECK(p.J == lrd::max_scale(n, w.support));
      for (int j = 0; j <= p.J; ++j) {
        CHECK(p.counts[j] == lrd::n_available(n, w.support, j));
        CHECK(p.counts[j] == p.coeffs[j].size());
        CHECK(p.counts[j] >= 1);
      }
      // dyadic count decay: n_{j+1} >= floor(n_j/2) - T
      for (int j = 0; j + 1 <= p.J; ++j)
        CHECK(p.counts[j + 1] >= p.counts[j] / 2 - w.support);
    }
  }
}

TEST_CASE("pyramid annihilates polynomials of degree M-1") {
  for (int M : {2, 4}) {
    const auto w = lrd::daubechies(M);
    const long n = 6 * w.support * 4;
    TimeSeries x(n);
    for (long t = 0; t < n; ++t) x[t] = std::pow(static_cast<double>(t) / n, M - 1);
    const auto p = lrd::pyramid(x, w);
    const double scale = x.cwiseAbs().maxCoeff();
    for (int j = 0; j <= p.J; ++j)
      CHECK(p.coeffs[j].cwiseAbs().maxCoeff() < 1e-8 * scale);
  }
}

TEST_CASE("polynomial trend shifts no retained coefficient") {
  const int M = 4;
  const auto w = lrd::daubechies(M);
  const long n = 2048;
  lrd::RngStream rng(9, 0);
  TimeSeries x(n), trend(n);
  for (long t = 0; t < n; ++t) {
    x[t] = rng.next_normal();
    const double u = static_cast<double>(t) / n;
    trend[t] = 5.0 - 3.0 * u + 2.0 * u * u - u * u * u;  // degree M-1
  }
  const auto p0 = lrd::pyramid(x, w);
  const TimeSeries xt = x + trend;
  const auto p1 = lrd::pyramid(xt, w);
  const double tmax = trend.cwiseAbs().maxCoeff();
  for (int j = 0; j <= p0.J; ++j)
    CHECK((p0.coeffs[j] - p1.coeffs[j]).cwiseAbs().maxCoeff() < 1e-8 * tmax);
}

TEST_CASE("haar level-0 hand values") {
  TimeSeries x(4);
  x << 1, 2, 3, 4;
  const auto p = lrd::pyramid(x, lrd::daubechies(1));
  REQUIRE(p.counts[0] == 2);
  const double r = 1.0 / std::sqrt(2.0);
  // (x_{2k+1} - x_{2k+2})/sqrt(2), matched up to sign convention
  CHECK(std::abs(p.coeffs[0][0]) == doctest::Approx(std::abs((1.0 - 2.0) * r)));
  CHECK(std::abs(p.coeffs[0][1]) == doctest::Approx(std::abs((3.0 - 4.0) * r)));
}

TEST_CASE("coefficients equal direct convolution with the equivalent filter") {
  lrd::RngStream rng(17, 2);
  for (int M : {1, 2, 4}) {
    const auto w = lrd::daubechies(M);
    const long n = 600;
    TimeSeries x(n);
    for (long i = 0; i < n; ++i) x[i] = rng.next_normal();
    const auto p = lrd::pyramid(x, w);
    for (int j = 0; j <= std::min(p.J, 4); ++j) {
      const Eigen::VectorXd e = lrd::equivalent_filter(w, j);
      const long step = 1L << j;
      for (long k = 0; k < p.counts[j]; ++k) {
        const double direct = e.dot(x.segment(k * step, e.size()));
        CHECK(p.coeffs[j][k] == doctest::Approx(direct).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("scale spectrum basics") {
  TimeSeries x = TimeSeries::Zero(64);
  const auto w = lrd::daubechies(1);
  const auto p = lrd::pyramid(x, w);
  CHECK(lrd::scale_spectrum(p, 0) == 0.0);
  CHECK_THROWS_AS(lrd::scale_spectrum(p, p.J + 1), std::out_of_range);
}

TEST_CASE("scale spectrum of white noise is one at scale 0 (haar)") {
  const long n = 1 << 16;
  lrd::RngStream rng(23, 0);
  TimeSeries x(n);
  for (long i = 0; i < n; ++i) x[i] = rng.next_normal();
  const auto p = lrd::pyramid(x, lrd::daubechies(1));
  CHECK(lrd::scale_spectrum(p, 0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("scale spectrum scales quadratically") {
  const long n = 512;
  lrd::RngStream rng(29, 0);
  TimeSeries x(n);
  for (long i = 0; i < n; ++i) x[i] = rng.next_normal();
  const auto w = lrd::daubechies(2);
  const auto p1 = lrd::pyramid(x, w);
  const TimeSeries cx = 3.0 * x;
  const auto p2 = lrd::pyramid(cx, w);
  for (int j = 0; j <= p1.J; ++j) {
    const double a = lrd::scale_spectrum(p1, j), b = lrd::scale_spectrum(p2, j);
    CHECK(b == doctest::Approx(9.0 * a).epsilon(1e-12));
  }
}

TEST_CASE("pyramid rejects short series and bad J") {
  const auto w = lrd::daubechies(4);
  TimeSeries x = TimeSeries::Ones(10);
  CHECK_THROWS_AS(lrd::pyramid(x, w), std::invalid_argument);
  TimeSeries y = TimeSeries::Ones(512);
  CHECK_THROWS_AS(lrd::pyramid(y, w, 20), std::invalid_argument);
}

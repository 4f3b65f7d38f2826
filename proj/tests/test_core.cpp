#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lrd/rng.hpp"
#include "lrd/series_ops.hpp"
#include "lrd/special.hpp"

using lrd::TimeSeries;

namespace {
TimeSeries make(std::initializer_list<double> v) {
  TimeSeries x(static_cast<long>(v.size()));
  long i = 0;
  for (double s : v) x[i++] = s;
  return x;
}
}  // namespace

TEST_CASE("difference annihilates constants") {
  const auto y = lrd::difference(make({3.0, 3.0, 3.0, 3.0}), 1);
  REQUIRE(y.size() == 3);
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("difference second order by hand") {
  const auto y = lrd::difference(make({1, 3, 6, 10}), 2);
  REQUIRE(y.size() == 2);
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(1.0));
}

TEST_CASE("difference order zero is identity") {
  const auto x = make({2.5, -1.0, 7.0});
  CHECK((lrd::difference(x, 0) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("difference rejects order >= length") {
  CHECK_THROWS_AS(lrd::difference(make({1, 2, 3}), 3), std::invalid_argument);
}

TEST_CASE("difference is linear") {
  lrd::RngStream rng(5, 0);
  TimeSeries x(200), y(200);
  for (int i = 0; i < 200; ++i) {
    x[i] = rng.next_normal();
    y[i] = rng.next_normal();
  }
  const double a = 1.7, b = -0.4;
  const TimeSeries z = a * x + b * y;
  const auto lhs = lrd::difference(z, 3);
  const TimeSeries rhs = a * lrd::difference(x, 3) + b * lrd::difference(y, 3);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * rhs.cwiseAbs().maxCoeff() + 1e-15);
}

TEST_CASE("difference annihilates polynomials of degree < order") {
  const long n = 10000;
  for (int delta : {1, 2, 3, 4}) {
    TimeSeries x(n);
    for (long t = 0; t < n; ++t) {
      const double u = static_cast<double>(t) / n;
      double v = 0.0;
      for (int d = 0; d < delta; ++d) v += 0.7 * std::pow(u, d);
      x[t] = v;
    }
    CHECK(lrd::difference(x, delta).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("integrate cumulative sum") {
  const auto y = lrd::integrate(make({1, 1, 1}), 1, 0.0);
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 2.0);
  CHECK(y[2] == 3.0);
  const auto x = make({4.0, 5.0});
  CHECK((lrd::integrate(x, 0) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("difference/integrate round trips") {
  lrd::RngStream rng(11, 3);
  TimeSeries x(10000);
  for (long i = 0; i < x.size(); ++i) x[i] = std::tanh(rng.next_normal());  // |x|<=1
  const auto back = lrd::difference(lrd::integrate(x, 2, 0.0), 2);
  CHECK((back - x).cwiseAbs().maxCoeff() < 1e-10);
  // the other direction (shortened by the differencing)
  const auto d1 = lrd::difference(x, 1);
  const TimeSeries i1 = lrd::integrate(d1, 1, x[0]);
  CHECK((i1 - x.tail(x.size() - 1)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("trigamma values") {
  CHECK(lrd::trigamma(1.0) ==
        doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-12));
  CHECK(3.0 * lrd::trigamma(3.0) == doctest::Approx(1.1848).epsilon(5e-5 / 1.1848));
  const double p100 = 100.0 * lrd::trigamma(100.0);
  CHECK(p100 > 1.004);
  CHECK(p100 < 1.006);
  CHECK_THROWS_AS(lrd::trigamma(0.0), std::invalid_argument);
  CHECK_THROWS_AS(lrd::trigamma(-2.0), std::invalid_argument);
}

TEST_CASE("trigamma recurrence consistency") {
  for (double z : {0.3, 1.7, 5.5, 12.0}) {
    CHECK(lrd::trigamma(z) ==
          doctest::Approx(lrd::trigamma(z + 1.0) + 1.0 / (z * z)).epsilon(1e-12));
  }
}

TEST_CASE("digamma known values") {
  CHECK(lrd::digamma(1.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-12));
  CHECK(lrd::digamma(2.0) == doctest::Approx(1.0 - 0.5772156649015329).epsilon(1e-12));
}

TEST_CASE("normal quantile") {
  CHECK(lrd::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(lrd::normal_quantile(0.5) == doctest::Approx(0.0));
  CHECK(lrd::normal_quantile(0.8413447460685429) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(lrd::normal_quantile(0.0), std::invalid_argument);
}

TEST_CASE("rng streams reproducible and independent") {
  lrd::RngStream a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  lrd::RngStream a2(42, 7);
  for (int i = 0; i < 100; ++i) differs |= a2.next_u64() != c.next_u64();
  CHECK(differs);
  lrd::RngStream g(1, 0);
  double s1 = 0, s2 = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double v = g.next_normal();
    s1 += v;
    s2 += v * v;
  }
  CHECK(std::abs(s1 / N) < 0.01);
  CHECK(s2 / N == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("series io round trip, comments, and rejection") {
  {
    std::istringstream in("# comment\n1.5\n\n-2.25 # inline\n3e-4\n");
    const auto x = lrd::read_series_stream(in, "mem");
    REQUIRE(x.size() == 3);
    CHECK(x[0] == 1.5);
    CHECK(x[1] == -2.25);
    CHECK(x[2] == 3e-4);
  }
  {
    std::istringstream in("1.0\nnan\n");
    CHECK_THROWS(lrd::read_series_stream(in, "mem"));
  }
  {
    std::istringstream in("1.0\ninf\n");
    CHECK_THROWS(lrd::read_series_stream(in, "mem"));
  }
  {
    std::istringstream in("1.0 2.0\n");
    CHECK_THROWS(lrd::read_series_stream(in, "mem"));
  }
  const auto tmp = std::string("/tmp/lrd_series_roundtrip.txt");
  TimeSeries x(5);
  x << 0.1, -2.0, 3.5, 1e-17, 12345.6789;
  lrd::write_series(tmp, x);
  const auto y = lrd::read_series(tmp);
  CHECK((x - y).cwiseAbs().maxCoeff() == 0.0);
}

#include "lrd/simulate.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lrd {

namespace {

constexpr double kPi = std::numbers::pi;

double arma_factor(double lambda, const std::vector<double>& ar,
                   const std::vector<double>& ma) {
  std::complex<double> num(1.0, 0.0), den(1.0, 0.0);
  for (size_t k = 0; k < ma.size(); ++k)
    num -= ma[k] * std::polar(1.0, -lambda * static_cast<double>(k + 1));
  for (size_t k = 0; k < ar.size(); ++k)
    den -= ar[k] * std::polar(1.0, -lambda * static_cast<double>(k + 1));
  return std::norm(num) / std::norm(den);
}

// smooth part of the spectral density: f(lambda) = lambda^{-2ds} * G(lambda)
double smooth_part(double lambda, double ds, const std::vector<double>& ar,
                   const std::vector<double>& ma, double sigma2) {
  const double ratio = lambda == 0.0 ? 1.0 : 2.0 * std::sin(lambda / 2.0) / lambda;
  return sigma2 / (2.0 * kPi) * std::pow(ratio, -2.0 * ds) * arma_factor(lambda, ar, ma);
}

double spectral_density(double lambda, double ds, const std::vector<double>& ar,
                        const std::vector<double>& ma, double sigma2) {
  return std::pow(lambda, -2.0 * ds) * smooth_part(lambda, ds, ar, ma, sigma2);
}

void gauss_legendre_16(double* x, double* w) {
  static const double xs[8] = {0.09501250983763744, 0.28160355077925891, 0.45801677765722739,
                               0.61787624440264375, 0.75540440835500303, 0.86563120238783174,
                               0.94457502307323258, 0.98940093499164993};
  static const double ws[8] = {0.18945061045506850, 0.18260341504492359, 0.16915651939500254,
                               0.14959598881657673, 0.12462897125553387, 0.09515851168249278,
                               0.06225352393864789, 0.02715245941175409};
  for (int i = 0; i < 8; ++i) {
    x[i] = -xs[7 - i];
    w[i] = ws[7 - i];
    x[8 + i] = xs[i];
    w[8 + i] = ws[i];
  }
}

}  // namespace

void ModelSpec::validate() const {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("model: sigma2 must be > 0");
  // AR polynomial must not vanish on the unit circle
  double mn = std::numeric_limits<double>::max();
  for (int i = 0; i <= 2048; ++i) {
    const double lam = kPi * i / 2048.0;
    std::complex<double> den(1.0, 0.0);
    for (size_t k = 0; k < ar.size(); ++k)
      den -= ar[k] * std::polar(1.0, -lam * static_cast<double>(k + 1));
    mn = std::min(mn, std::abs(den));
  }
  if (mn < 1e-4)
    throw std::invalid_argument("model: AR polynomial (nearly) vanishes on |z|=1");
  double th = 1.0;
  for (double t : ma) th -= t;
  if (std::abs(th) < 1e-12)
    throw std::invalid_argument("model: MA polynomial vanishes at z=1 (f*(0)=0)");
  if (kind == ModelKind::FGN && !(H > 0.0 && H < 1.0))
    throw std::invalid_argument("model: FGN needs H in (0,1)");
  if (kind == ModelKind::DARFIMA && !(lambda0 > 0.0 && lambda0 <= kPi))
    throw std::invalid_argument("model: DARFIMA needs lambda0 in (0, pi]");
  if (kind == ModelKind::DARFIMA && sinc_halfwidth < 1)
    throw std::invalid_argument("model: DARFIMA sinc half-width must be >= 1");
}

std::string ModelSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case ModelKind::ARFIMA: os << "ARFIMA("; break;
    case ModelKind::DARFIMA: os << "DARFIMA("; break;
    case ModelKind::FGN: os << "FGN(" << H << ")"; return os.str();
    case ModelKind::SUBORD1: os << "SUBORD1("; break;
    case ModelKind::SUBORD2: os << "SUBORD2("; break;
  }
  os << ar.size() << "," << d << "," << ma.size() << ")";
  return os.str();
}

std::pair<int, double> split_memory(double d) {
  const int k = static_cast<int>(std::floor(d + 0.5));
  return {k, d - k};  // ds in [-1/2, 1/2)
}

Eigen::VectorXd arfima_autocovariance(double ds, const std::vector<double>& ar,
                                      const std::vector<double>& ma, double sigma2,
                                      long nlags) {
  if (!(ds >= -0.5 && ds < 0.5))
    throw std::invalid_argument("arfima_autocovariance: ds must be in [-1/2, 1/2)");
  const long N = 1L << 20;  // midpoint cells on (0, pi)
  if (nlags >= 2 * N)
    throw std::invalid_argument("arfima_autocovariance: too many lags for the grid");
  const double dl = kPi / static_cast<double>(N);

  // base midpoint-rule pass, all lags at once via a zero-padded FFT
  Eigen::VectorXcd f(2 * N);
  for (long k = 0; k < N; ++k) {
    const double lam = (k + 0.5) * dl;
    f[k] = spectral_density(lam, ds, ar, ma, sigma2);
  }
  f.tail(N).setZero();
  Eigen::FFT<double> fft;
  Eigen::VectorXcd F(2 * N);
  fft.fwd(F, f);
  Eigen::VectorXd gamma(nlags + 1);
  for (long h = 0; h <= nlags; ++h) {
    // sum f_k cos(h (k+1/2) dl) = Re[e^{i h dl/2} conj(F_h)]
    const std::complex<double> ph = std::polar(1.0, 0.5 * h * dl);
    gamma[h] = 2.0 * dl * (ph * std::conj(F[h])).real();
  }

  // replace the first C cells by an accurate singular-panel integral
  const long C = 64;
  const double eps = C * dl;
  Eigen::VectorXd sub = Eigen::VectorXd::Zero(nlags + 1);
  for (long k = 0; k < C; ++k) {
    const double lam = (k + 0.5) * dl;
    const double fv = spectral_density(lam, ds, ar, ma, sigma2);
    for (long h = 0; h <= nlags; ++h) sub[h] += 2.0 * dl * fv * std::cos(h * lam);
  }

  double gx[16], gw[16];
  gauss_legendre_16(gx, gw);
  const double kap = 1.0 / (1.0 - 2.0 * ds);  // lambda = u^kap removes the endpoint power
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(nlags + 1);
  for (long h = 0; h <= nlags; ++h) {
    double s = 0.0;
    // non-oscillatory head [0, a], a = min(eps, 1/max(h,1)): u-substitution panels
    const double a = std::min(eps, 1.0 / std::max<double>(h, 1.0));
    const double ua = std::pow(a, 1.0 - 2.0 * ds);
    const int headp = 8;
    for (int pnl = 0; pnl < headp; ++pnl) {
      const double u0 = ua * pnl / headp, u1 = ua * (pnl + 1) / headp;
      for (int i = 0; i < 16; ++i) {
        const double u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * gx[i];
        if (u <= 0.0) continue;
        const double lam = std::pow(u, kap);
        s += 0.5 * (u1 - u0) * gw[i] * kap * smooth_part(lam, ds, ar, ma, sigma2) *
             std::cos(h * lam);
      }
    }
    // oscillatory remainder [a, eps]: plain panels with width <= pi/h
    if (a < eps) {
      const long nsplit = static_cast<long>(std::ceil(h * (eps - a) / kPi));
      for (long pnl = 0; pnl < nsplit; ++pnl) {
        const double l0 = a + (eps - a) * pnl / nsplit;
        const double l1 = a + (eps - a) * (pnl + 1) / nsplit;
        for (int i = 0; i < 16; ++i) {
          const double lam = 0.5 * (l0 + l1) + 0.5 * (l1 - l0) * gx[i];
          s += 0.5 * (l1 - l0) * gw[i] * spectral_density(lam, ds, ar, ma, sigma2) *
               std::cos(h * lam);
        }
      }
    }
    acc[h] = 2.0 * s;
  }
  return gamma - sub + acc;
}

Eigen::VectorXd fgn_autocovariance(double H, long nlags) {
  if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("fgn: H must be in (0,1)");
  Eigen::VectorXd g(nlags + 1);
  const double e = 2.0 * H;
  for (long h = 0; h <= nlags; ++h)
    g[h] = 0.5 * (std::pow(std::abs(h + 1.0), e) + std::pow(std::abs(h - 1.0), e) -
                  2.0 * std::pow(static_cast<double>(h), e));
  return g;
}

CirculantSampler::CirculantSampler(const Eigen::VectorXd& gamma, long n, int) : n_(n) {
  const long m = gamma.size() - 1;
  if (m < n - 1) throw std::invalid_argument("circulant: need gamma up to lag n-1");
  const long N = 2 * m;
  Eigen::VectorXcd c(N);
  for (long j = 0; j <= m; ++j) c[j] = gamma[j];
  for (long j = 1; j < m; ++j) c[N - j] = gamma[j];
  Eigen::FFT<double> fft;
  Eigen::VectorXcd ev(N);
  fft.fwd(ev, c);
  lambda_ = ev.real();
  const double mx = lambda_.maxCoeff();
  if (lambda_.minCoeff() < -1e-8 * mx)
    throw std::runtime_error("circulant embedding not nonnegative definite (min eig " +
                             std::to_string(lambda_.minCoeff()) + ")");
  lambda_ = lambda_.cwiseMax(0.0);
}

TimeSeries CirculantSampler::sample(RngStream& rng) const {
  const long N = lambda_.size();
  const long m = N / 2;
  Eigen::VectorXcd a(N);
  a[0] = std::sqrt(lambda_[0] / N) * rng.next_normal();
  a[m] = std::sqrt(lambda_[m] / N) * rng.next_normal();
  for (long j = 1; j < m; ++j) {
    const double s = std::sqrt(lambda_[j] / (2.0 * N));
    const std::complex<double> z(rng.next_normal(), rng.next_normal());
    a[j] = s * z;
    a[N - j] = std::conj(a[j]);
  }
  Eigen::FFT<double> fft;
  Eigen::VectorXcd out(N);
  fft.fwd(out, a);
  return out.real().head(n_);
}

namespace {

// build the stationary sampler with embedding-size escalation 2n -> 16n
std::shared_ptr<const CirculantSampler> make_stationary_sampler(double ds,
                                                                const std::vector<double>& ar,
                                                                const std::vector<double>& ma,
                                                                double sigma2, long n) {
  std::string last;
  for (int doublings = 0; doublings < 4; ++doublings) {
    const long m = n << doublings;
    try {
      return std::make_shared<const CirculantSampler>(
          arfima_autocovariance(ds, ar, ma, sigma2, m), n);
    } catch (const std::runtime_error& e) {
      last = e.what();
    }
  }
  throw std::runtime_error("circulant embedding failed up to size 16n: " + last);
}

}  // namespace

std::function<TimeSeries(RngStream&)> make_generator(const ModelSpec& spec, long n) {
  spec.validate();
  switch (spec.kind) {
    case ModelKind::ARFIMA: {
      const auto [k, ds] = split_memory(spec.d);
      const long n_stat = n + (k < 0 ? -static_cast<long>(k) : 0);
      auto sampler = make_stationary_sampler(ds, spec.ar, spec.ma, spec.sigma2, n_stat);
      const int kk = k;
      return [sampler, kk](RngStream& rng) {
        TimeSeries y = sampler->sample(rng);
        if (kk > 0) return integrate(y, kk, 0.0);
        if (kk < 0) return static_cast<TimeSeries>(difference(y, -kk));
        return y;
      };
    }
    case ModelKind::DARFIMA: {
      const int Lf = spec.sinc_halfwidth;
      ModelSpec inner = spec;
      inner.kind = ModelKind::ARFIMA;
      auto gen = make_generator(inner, n + 2L * Lf);
      auto kern = std::make_shared<Eigen::VectorXd>(2 * Lf + 1);
      for (int t = -Lf; t <= Lf; ++t)
        (*kern)[t + Lf] = t == 0 ? spec.lambda0 / kPi
                                 : std::sin(spec.lambda0 * t) / (kPi * static_cast<double>(t));
      return [gen, kern, n, Lf](RngStream& rng) {
        const TimeSeries x = gen(rng);
        TimeSeries out(n);
        for (long i = 0; i < n; ++i) out[i] = kern->dot(x.segment(i, 2 * Lf + 1));
        return out;
      };
    }
    case ModelKind::FGN: {
      std::string last;
      for (int doublings = 0; doublings < 4; ++doublings) {
        try {
          auto s = std::make_shared<const CirculantSampler>(
              fgn_autocovariance(spec.H, n << doublings), n);
          return [s](RngStream& rng) { return s->sample(rng); };
        } catch (const std::runtime_error& e) {
          last = e.what();
        }
      }
      throw std::runtime_error("FGN circulant embedding failed up to size 16n: " + last);
    }
    case ModelKind::SUBORD1:
    case ModelKind::SUBORD2: {
      const int k0 = spec.kind == ModelKind::SUBORD2 ? 2 : 1;
      const double d_y = 0.5 * (1.0 - (1.0 - 2.0 * spec.d) / k0);
      if (!(d_y < 0.5))
        throw std::invalid_argument("gen_subord: required base memory d_Y=" +
                                    std::to_string(d_y) + " >= 1/2, subordination infeasible");
      if (!(d_y > -0.5))
        throw std::invalid_argument("gen_subord: required base memory d_Y=" +
                                    std::to_string(d_y) + " <= -1/2, base not stationary");
      const double sd =
          std::sqrt(arfima_autocovariance(d_y, spec.ar, spec.ma, 1.0, 0)[0]);
      auto sampler = make_stationary_sampler(d_y, spec.ar, spec.ma, 1.0, n);
      const bool square = k0 == 2;
      return [sampler, sd, square, n](RngStream& rng) {
        TimeSeries y = sampler->sample(rng) / sd;
        TimeSeries x(n);
        if (square)
          for (long t = 0; t < n; ++t) x[t] = y[t] * y[t] - 1.0;
        else
          for (long t = 0; t < n; ++t) x[t] = std::exp(y[t]);
        return x;
      };
    }
  }
  throw std::logic_error("make_generator: unknown model kind");
}

TimeSeries gen_arfima(const ModelSpec& spec, long n, RngStream& rng) {
  ModelSpec s = spec;
  s.kind = ModelKind::ARFIMA;
  return make_generator(s, n)(rng);
}

TimeSeries gen_fgn(double H, long n, RngStream& rng) {
  ModelSpec s;
  s.kind = ModelKind::FGN;
  s.H = H;
  return make_generator(s, n)(rng);
}

TimeSeries gen_darfima(const ModelSpec& spec, long n, RngStream& rng) {
  ModelSpec s = spec;
  s.kind = ModelKind::DARFIMA;
  return make_generator(s, n)(rng);
}

TimeSeries gen_subord(ModelKind kind, double d_target, const ModelSpec& base, long n,
                      RngStream& rng) {
  if (kind != ModelKind::SUBORD1 && kind != ModelKind::SUBORD2)
    throw std::invalid_argument("gen_subord: kind must be SUBORD1 or SUBORD2");
  ModelSpec s = base;
  s.kind = kind;
  s.d = d_target;
  return make_generator(s, n)(rng);
}

TimeSeries generate(const ModelSpec& spec, long n, RngStream& rng) {
  return make_generator(spec, n)(rng);
}

}  // namespace lrd

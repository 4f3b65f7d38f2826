#include "lrd/asympvar.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "lrd/fourier.hpp"
#include "lrd/rng.hpp"
#include "lrd/special.hpp"

namespace lrd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLog2 = std::numbers::ln2;

void gauss_legendre_16(Eigen::ArrayXd& x, Eigen::ArrayXd& w) {
  // 16-point Gauss-Legendre on [-1,1]
  static const double xs[8] = {0.09501250983763744, 0.28160355077925891, 0.45801677765722739,
                               0.61787624440264375, 0.75540440835500303, 0.86563120238783174,
                               0.94457502307323258, 0.98940093499164993};
  static const double ws[8] = {0.18945061045506850, 0.18260341504492359, 0.16915651939500254,
                               0.14959598881657673, 0.12462897125553387, 0.09515851168249278,
                               0.06225352393864789, 0.02715245941175409};
  x.resize(16);
  w.resize(16);
  for (int i = 0; i < 8; ++i) {
    x[i] = -xs[7 - i];
    w[i] = ws[7 - i];
    x[8 + i] = xs[i];
    w[8 + i] = ws[i];
  }
}

// admissibility window for the |xi|^{-2d} integrals
void check_admissible(double d, const WaveletFourierTable& t) {
  const double lo = 0.5 - t.alpha, hi = t.M + 0.5;
  if (!(d > lo + 1e-9 && d < hi - 1e-9))
    throw std::domain_error("asympvar: d=" + std::to_string(d) +
                            " outside the admissible window (" + std::to_string(lo) + ", " +
                            std::to_string(hi) + ") — integral diverges");
}

struct AvConstants {
  double eta = 0.0;
  double kappa = 0.0;
  double den = 0.0;  // 2 - 2^{-ell}
};

AvConstants av_constants(int ell) {
  AvConstants c;
  c.den = 2.0 - std::pow(2.0, -ell);
  double se = 0.0, sk = 0.0;
  for (int j = 0; j <= ell; ++j) se += j * std::pow(2.0, -j);
  c.eta = se / c.den;
  for (int j = 0; j <= ell; ++j) sk += (j - c.eta) * (j - c.eta) * std::pow(2.0, -j);
  c.kappa = sk / c.den;
  return c;
}

// Covariance series kernel for one (d,u): Cov(W_{0,0}, W_{-u,tau}) =
// 2^{-u/2} * 2 Re[ sum_i A_i P_i^tau ] + head term (analytic xi->0 patch).
struct CovKernel {
  Eigen::ArrayXcd A;
  Eigen::ArrayXcd P;
  double head = 0.0;   // analytic contribution of (0, xi_min 2^u], phase ~ 1
  double tail0 = 0.0;  // analytic top tail, tau = 0 only
  double scale = 1.0;  // 2^{-u/2}
  Eigen::ArrayXcd Q;   // running P^tau

  double cov_at(double qsign_tau /*+1: use Q, -1: use conj Q*/) const {
    const double s = qsign_tau > 0 ? (A * Q).real().sum() : (A * Q.conjugate()).real().sum();
    return scale * 2.0 * s;
  }
};

CovKernel make_cov_kernel(double d, int u, const WaveletFourierTable& t) {
  CovKernel k;
  const int noct = t.octave_max - t.octave_min + 1;
  const int nper = t.nodes_per_octave;
  const int used = noct - u;
  if (used <= 0) throw std::invalid_argument("I_u: u exceeds table octave range");
  k.A.resize(static_cast<Eigen::Index>(used) * nper);
  k.P.resize(k.A.size());
  k.scale = std::pow(2.0, -0.5 * u);
  const double shift_scale = std::pow(2.0, -u);
  Eigen::Index at = 0;
  for (int e = t.octave_min + u; e <= t.octave_max; ++e) {
    const double fac = std::pow(2.0, e);
    const auto& v1 = t.values[static_cast<size_t>(e - t.octave_min)];
    const auto& v2 = t.values[static_cast<size_t>(e - u - t.octave_min)];
    for (int i = 0; i < nper; ++i, ++at) {
      const double xi = fac * t.base_nodes[i];
      const double w = fac * t.base_weights[i];
      k.A[at] = w * std::pow(xi, -2.0 * d) * v1[i] * std::conj(v2[i]);
      k.P[at] = std::polar(1.0, shift_scale * xi);
    }
  }
  // head: psi(xi) conj(psi(2^-u xi)) ~ c0 2^{-uM} xi^{2M} below xi_min * 2^u
  const double a = std::pow(2.0, t.octave_min + u) * kPi;
  const double ex = 2.0 * t.M - 2.0 * d + 1.0;
  k.head = k.scale * 2.0 * t.head_c0 * std::pow(2.0, -u * t.M) * std::pow(a, ex) / ex;
  // top tail (power-law average decay), non-oscillatory tau = 0 term only
  const double Xi = std::pow(2.0, t.octave_max + 1) * kPi;
  const double s = 2.0 * d + 2.0 * t.alpha - 1.0;
  const auto& vt1 = t.values[static_cast<size_t>(noct - 1)];
  const auto& vt2 = t.values[static_cast<size_t>(noct - 1 - u)];
  double c2 = 0.0;
  for (int i = 0; i < nper; ++i) {
    const double xi = std::pow(2.0, t.octave_max) * t.base_nodes[i];
    c2 += (vt1[i] * std::conj(vt2[i])).real() * std::pow(xi, 2.0 * t.alpha) * t.base_weights[i];
  }
  c2 /= t.base_weights.sum();
  k.tail0 = k.scale * 2.0 * c2 * std::pow(Xi, -s) / s;
  k.Q = Eigen::ArrayXcd::Ones(k.A.size());
  return k;
}

std::mutex g_cache_mutex;
std::map<int, std::shared_ptr<const WaveletFourierTable>> g_table_cache;
std::map<std::pair<int, int>, Sigma2Pool> g_sigma2_cache;

}  // namespace

WaveletFourierTable psi_hat_table(const WaveletSpec& w, int depth, int nodes_per_octave,
                                  int octave_min, int octave_max) {
  if (depth < 10) throw std::invalid_argument("psi_hat_table: depth must be >= 10");
  if (nodes_per_octave % 16 != 0)
    throw std::invalid_argument("psi_hat_table: nodes_per_octave must be a multiple of 16");
  WaveletFourierTable t;
  t.M = w.vanishing_moments;
  t.alpha = w.alpha;
  t.nodes_per_octave = nodes_per_octave;
  t.octave_min = octave_min;
  t.octave_max = octave_max;

  // composite 16-point Gauss-Legendre panels on the base octave [pi, 2pi)
  Eigen::ArrayXd gx, gw;
  gauss_legendre_16(gx, gw);
  const int panels = nodes_per_octave / 16;
  t.base_nodes.resize(nodes_per_octave);
  t.base_weights.resize(nodes_per_octave);
  for (int p = 0; p < panels; ++p) {
    const double a = kPi * (1.0 + static_cast<double>(p) / panels);
    const double b = kPi * (1.0 + static_cast<double>(p + 1) / panels);
    for (int i = 0; i < 16; ++i) {
      t.base_nodes[p * 16 + i] = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
      t.base_weights[p * 16 + i] = 0.5 * (b - a) * gw[i];
    }
  }

  // cascade product psi_hat(xi) = m1(xi/2) prod_{k=2}^{depth} m0(xi/2^k)
  const auto m_of = [](const Eigen::VectorXd& f, double om) {
    std::complex<double> s(0.0, 0.0);
    for (Eigen::Index l = 0; l < f.size(); ++l) s += f[l] * std::polar(1.0, -om * l);
    return s / std::sqrt(2.0);
  };
  const int noct = octave_max - octave_min + 1;
  t.values.resize(static_cast<size_t>(noct));
  for (int e = octave_min; e <= octave_max; ++e) {
    Eigen::ArrayXcd v(nodes_per_octave);
    const double fac = std::pow(2.0, e);
    for (int i = 0; i < nodes_per_octave; ++i) {
      const double xi = fac * t.base_nodes[i];
      std::complex<double> acc = m_of(w.highpass, xi / 2.0);
      for (int k = 2; k <= depth; ++k) acc *= m_of(w.lowpass, xi / std::pow(2.0, k));
      v[i] = acc;
    }
    t.values[static_cast<size_t>(e - octave_min)] = v;
  }

  // analytic end fits: |psi|^2 ~ c0 xi^{2M} near 0, ~ c2 xi^{-2 alpha} at the top
  {
    const auto& v = t.values.front();
    double c0 = 0.0;
    for (int i = 0; i < nodes_per_octave; ++i) {
      const double xi = std::pow(2.0, octave_min) * t.base_nodes[i];
      c0 += std::norm(v[i]) / std::pow(xi, 2.0 * t.M) * t.base_weights[i];
    }
    t.head_c0 = c0 / t.base_weights.sum();
  }
  {
    const auto& v = t.values.back();
    double c2 = 0.0;
    for (int i = 0; i < nodes_per_octave; ++i) {
      const double xi = std::pow(2.0, octave_max) * t.base_nodes[i];
      c2 += std::norm(v[i]) * std::pow(xi, 2.0 * t.alpha) * t.base_weights[i];
    }
    t.tail_c2 = c2 / t.base_weights.sum();
  }
  return t;
}

std::shared_ptr<const WaveletFourierTable> shared_psi_table(const WaveletSpec& w) {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = g_table_cache.find(w.vanishing_moments);
  if (it != g_table_cache.end()) return it->second;
  auto t = std::make_shared<const WaveletFourierTable>(psi_hat_table(w));
  g_table_cache.emplace(w.vanishing_moments, t);
  return t;
}

double K_psi(double d, const WaveletFourierTable& t) {
  check_admissible(d, t);
  double tot = 0.0;
  for (int e = t.octave_min; e <= t.octave_max; ++e) {
    const double fac = std::pow(2.0, e);
    const auto& v = t.values[static_cast<size_t>(e - t.octave_min)];
    double s = 0.0;
    for (int i = 0; i < t.nodes_per_octave; ++i) {
      const double xi = fac * t.base_nodes[i];
      s += t.base_weights[i] * std::pow(xi, -2.0 * d) * std::norm(v[i]);
    }
    tot += fac * s;
  }
  tot *= 2.0;  // even integrand
  const double a = std::pow(2.0, t.octave_min) * kPi;
  const double exh = 2.0 * t.M - 2.0 * d + 1.0;
  tot += 2.0 * t.head_c0 * std::pow(a, exh) / exh;
  const double Xi = std::pow(2.0, t.octave_max + 1) * kPi;
  const double ext = 2.0 * d + 2.0 * t.alpha - 1.0;
  tot += 2.0 * t.tail_c2 * std::pow(Xi, -ext) / ext;
  return tot;
}

double I_u(double d, int u, const WaveletFourierTable& t) {
  check_admissible(d, t);
  if (u < 0) throw std::invalid_argument("I_u: u must be >= 0");
  CovKernel k = make_cov_kernel(d, u, t);
  double c0 = k.cov_at(+1) + k.head + k.tail0;  // tau = 0 (Q = 1)
  double sum = c0 * c0;
  const int tau_cap = 4096;
  for (int tau = 1; tau <= tau_cap; ++tau) {
    k.Q *= k.P;
    const double cp = k.cov_at(+1) + k.head;
    const double cm = k.cov_at(-1) + k.head;
    const double term = cp * cp + cm * cm;
    sum += term;
    if (tau >= 16 && term < 1e-10 * sum) break;
  }
  return sum / (2.0 * kPi);
}

Eigen::MatrixXd sigma_matrix(double d, int ell, const WaveletFourierTable& t) {
  if (ell < 1) throw std::invalid_argument("sigma_matrix: ell must be >= 1");
  check_admissible(d, t);
  std::vector<double> iu(static_cast<size_t>(ell) + 1);
  for (int u = 0; u <= ell; ++u) iu[static_cast<size_t>(u)] = I_u(d, u, t);
  const double K = K_psi(d, t);
  Eigen::MatrixXd S(ell + 1, ell + 1);
  for (int i = 0; i <= ell; ++i)
    for (int j = 0; j <= ell; ++j) {
      const int u = std::abs(i - j);
      S(i, j) = 4.0 * kPi * std::pow(2.0, 2.0 * d * u) * std::pow(2.0, std::min(i, j)) /
                (K * K) * iu[static_cast<size_t>(u)];
    }
  return S;
}

double v_av(double d, int ell, const WaveletFourierTable& t) {
  check_admissible(d, t);
  const double K = K_psi(d, t);
  if (ell == kInfScales) {
    const int ucap = std::min(60, t.octave_max - t.octave_min - 1);
    double s = I_u(d, 0, t);
    for (int u = 1; u <= ucap; ++u) {
      const double term = 2.0 * I_u(d, u, t) * std::pow(2.0, (2.0 * d - 1.0) * u);
      s += term;
      if (std::abs(term) < 1e-10 * std::abs(s)) break;
    }
    return kPi / std::pow(2.0 * kLog2 * K, 2) * s;
  }
  if (ell < 1) throw std::invalid_argument("v_av: ell must be >= 1");
  const AvConstants c = av_constants(ell);
  double s = I_u(d, 0, t);
  for (int u = 1; u <= ell; ++u) {
    double inner = 0.0;
    for (int i = 0; i <= ell - u; ++i)
      inner += std::pow(2.0, -i) / c.den * (i - c.eta) * (i + u - c.eta);
    s += 2.0 / c.kappa * I_u(d, u, t) * std::pow(2.0, (2.0 * d - 1.0) * u) * inner;
  }
  return kPi / (c.den * c.kappa * std::pow(kLog2 * K, 2)) * s;
}

namespace {

Eigen::MatrixXd design_matrix(int ell) {
  Eigen::MatrixXd B(ell + 1, 2);
  for (int i = 0; i <= ell; ++i) {
    B(i, 0) = 1.0;
    B(i, 1) = i;
  }
  return B;
}

Eigen::Vector2d design_rhs() { return {0.0, 1.0 / (2.0 * kLog2)}; }

Eigen::LDLT<Eigen::MatrixXd> checked_ldlt(const Eigen::MatrixXd& S, const char* who) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 1e-12 * lmax))
    throw std::runtime_error(std::string(who) + ": Sigma matrix numerically singular");
  return S.ldlt();
}

}  // namespace

double v_opt(double d, int ell, const WaveletFourierTable& t) {
  if (ell < 1) throw std::invalid_argument("v_opt: ell must be >= 1");
  const Eigen::MatrixXd S = sigma_matrix(d, ell, t);
  auto ldlt = checked_ldlt(S, "v_opt");
  const Eigen::MatrixXd B = design_matrix(ell);
  const Eigen::Matrix2d A = B.transpose() * ldlt.solve(B);
  const Eigen::Vector2d b = design_rhs();
  return b.dot(A.ldlt().solve(b));
}

double g_band_integral(double x) {
  if (std::abs(x + 1.0) < 1e-12) return kLog2;
  return (std::pow(2.0 * kPi, x + 1.0) - std::pow(kPi, x + 1.0)) / (x + 1.0);
}

double shannon_K(double d) { return 2.0 * g_band_integral(-2.0 * d); }

double shannon_I0(double d) { return 2.0 * g_band_integral(-4.0 * d); }

double v_shannon(double d, int ell) {
  double kappa, den;
  if (ell == kInfScales) {
    kappa = 2.0;
    den = 2.0;
  } else {
    if (ell < 1) throw std::invalid_argument("v_shannon: ell must be >= 1");
    const AvConstants c = av_constants(ell);
    kappa = c.kappa;
    den = c.den;
  }
  return kPi * g_band_integral(-4.0 * d) /
         (2.0 * den * kappa * kLog2 * kLog2 * std::pow(g_band_integral(-2.0 * d), 2));
}

double phi_tau(int tau) {
  if (tau < 0) throw std::invalid_argument("phi_tau: tau must be >= 0");
  return std::exp(std::lgamma(4.0 * tau + 1.0) + 4.0 * std::lgamma(tau + 1.0) -
                  4.0 * std::lgamma(2.0 * tau + 1.0));
}

Sigma2Pool sigma2_pool(int p, int tau, long long min_ordinates, std::uint64_t seed) {
  if (p < 1) throw std::invalid_argument("sigma2_pool: p must be >= 1");
  if (tau < 0) throw std::invalid_argument("sigma2_pool: tau must be >= 0");
  if (tau == 0) {
    Sigma2Pool out;
    out.p = p;
    out.tau = tau;
    out.sigma2 = trigamma(p);
    out.stderr_ = 0.0;
    out.ordinates = 0;
    out.seed = 0;
    return out;
  }
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_sigma2_cache.find({p, tau});
    if (it != g_sigma2_cache.end()) return it->second;
  }
  if (min_ordinates < 10000)
    throw std::invalid_argument("sigma2_pool: need at least 1e4 ordinates for tau > 0");

  const long n = 8192;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  long long count = 0;
  std::uint64_t rep = 0;
  TimeSeries x(n);
  while (count < min_ordinates) {
    RngStream rng(seed, rep++);
    for (long t = 0; t < n; ++t) x[t] = rng.next_normal();
    const auto tp = tapered_periodogram(x, tau);
    const auto pp = pool(tp, p);
    // drop blocks at the band edges
    for (long k = 2; k < pp.K - 2; ++k) {
      const double l = std::log(pp.ordinates[k]);
      s1 += l;
      s2 += l * l;
      s3 += l * l * l;
      s4 += l * l * l * l;
      ++count;
    }
  }
  const double N = static_cast<double>(count);
  const double m = s1 / N;
  const double var = s2 / N - m * m;
  const double mu4 = s4 / N - 4 * m * s3 / N + 6 * m * m * s2 / N - 3 * m * m * m * m;
  Sigma2Pool out;
  out.p = p;
  out.tau = tau;
  out.sigma2 = var;
  out.stderr_ = std::sqrt(std::max(0.0, mu4 - var * var) / N);
  out.ordinates = count;
  out.seed = seed;
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    g_sigma2_cache[{p, tau}] = out;
  }
  return out;
}

void load_sigma2_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open constants file " + path);
  std::string line;
  int lineno = 0;
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Sigma2Pool e;
    if (!(ls >> e.p >> e.tau)) continue;
    if (!(ls >> e.sigma2 >> e.stderr_ >> e.ordinates >> e.seed))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed constants entry");
    g_sigma2_cache[{e.p, e.tau}] = e;
  }
}

void save_sigma2_entry(const std::string& path, const Sigma2Pool& entry) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d %d %.10g %.3g %lld %llu\n", entry.p, entry.tau,
                entry.sigma2, entry.stderr_, entry.ordinates,
                static_cast<unsigned long long>(entry.seed));
  out << buf;
}

bool lww_lrw_av_equality_check(double d, int ell, const WaveletFourierTable& t) {
  const double direct = v_av(d, ell, t);
  const Eigen::MatrixXd S = sigma_matrix(d, ell, t);
  const AvConstants c = av_constants(ell);
  Eigen::VectorXd w(ell + 1);
  for (int i = 0; i <= ell; ++i)
    w[i] = (i - c.eta) * std::pow(2.0, -i) / (2.0 * kLog2 * c.kappa * c.den);
  const double quad = w.dot(S * w);
  return std::abs(direct - quad) <= 1e-10 * std::max(1.0, std::abs(direct));
}

VarianceReport variance_report(double d, int ell, const WaveletSpec& w) {
  auto t = shared_psi_table(w);
  VarianceReport r;
  r.d = d;
  r.ell = ell;
  r.v_av = v_av(d, ell, *t);
  r.v_shannon = v_shannon(d, ell);
  r.sigma = sigma_matrix(d, ell, *t);
  auto ldlt = checked_ldlt(r.sigma, "variance_report");
  const Eigen::MatrixXd B = design_matrix(ell);
  const Eigen::Matrix2d A = B.transpose() * ldlt.solve(B);
  const Eigen::Vector2d b = design_rhs();
  const Eigen::Vector2d beta = A.ldlt().solve(b);
  r.optimal_weights = ldlt.solve(B * beta);
  r.v_opt = b.dot(beta);
  return r;
}

}  // namespace lrd

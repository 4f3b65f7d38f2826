#include "lrd/wavelet.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lrd {

namespace {

// Minimal-phase Daubechies scaling filters, M = 1..10, derived once by
// spectral factorization at 60-digit precision and checked against the
// QMF/moment invariants in the unit tests.
const double kDaubechies[] = {
    // M=1
    0.70710678118654752, 0.70710678118654752,
    // M=2
    0.48296291314453414, 0.83651630373780791, 0.22414386804201338, -0.12940952255126038,
    // M=3
    0.33267055295008262, 0.80689150931109258, 0.45987750211849157, -0.13501102001025459,
    -0.085441273882026662, 0.035226291885709537,
    // M=4
    0.23037781330889650, 0.71484657055291565, 0.63088076792985891, -0.027983769416859854,
    -0.18703481171909308, 0.030841381835560764, 0.032883011666885200, -0.010597401785069032,
    // M=5
    0.16010239797419291, 0.60382926979718967, 0.72430852843777293, 0.13842814590132073,
    -0.24229488706638203, -0.032244869584638375, 0.077571493840045714, -0.0062414902127982743,
    -0.012580751999081999, 0.0033357252854737713,
    // M=6
    0.11154074335010946, 0.49462389039845309, 0.75113390802109535, 0.31525035170919763,
    -0.22626469396543982, -0.12976686756726194, 0.097501605587323049, 0.027522865530305729,
    -0.031582039317486030, 0.00055384220116149614, 0.0047772575109455106, -0.0010773010853084796,
    // M=7
    0.077852054085009179, 0.39653931948191731, 0.72913209084623512, 0.46978228740519312,
    -0.14390600392856498, -0.22403618499387498, 0.071309219266830265, 0.080612609151083072,
    -0.038029936935014414, -0.016574541630666881, 0.012550998556099841, 0.00042957797292136652,
    -0.0018016407040474909, 0.00035371379997452025,
    // M=8
    0.054415842243104010, 0.31287159091429997, 0.67563073629728981, 0.58535468365420671,
    -0.015829105256349306, -0.28401554296154693, 0.00047248457391328277, 0.12874742662047846,
    -0.017369301001807546, -0.044088253930794752, 0.013981027917398282, 0.0087460940474057767,
    -0.0048703529934515743, -0.00039174037337694705, 0.00067544940645056937,
    -0.00011747678412476953,
    // M=9
    0.038077947363878347, 0.24383467461259035, 0.60482312369011111, 0.65728807805130054,
    0.13319738582500758, -0.29327378327917491, -0.096840783222976461, 0.14854074933810638,
    0.030725681479333379, -0.067632829061329974, 0.00025094711483145196, 0.022361662123679097,
    -0.0047232047577513973, -0.0042815036824634298, 0.0018476468830562265,
    0.00023038576352319597, -0.00025196318894271014, 3.9347320316271599e-5,
    // M=10
    0.026670057900555554, 0.18817680007769149, 0.52720118893172559, 0.68845903945360357,
    0.28117234366057746, -0.24984642432731538, -0.19594627437737704, 0.12736934033579326,
    0.093057364603572351, -0.071394147166397087, -0.029457536821875813, 0.033212674059341002,
    0.0036065535669561697, -0.010733175483330575, 0.0013953517470529012, 0.0019924052951850561,
    -0.00068585669495971163, -0.00011646685512928545, 9.3588670320069591e-5,
    -1.3264202894521245e-5,
};

// Fourier decay exponents quoted for the wavelets used in the experiments;
// other orders fall back to the analytic lower bound (1 - log2(3)/2) M,
// which is conservative in admissible-range checks.
double decay_exponent(int M) {
  if (M == 1) return 1.0;  // Haar: discontinuous, decay exactly 1
  if (M == 2) return 1.34;
  if (M == 4) return 1.91;
  return (1.0 - std::log2(3.0) / 2.0) * M;
}

// valid correlation y[k] = sum_l f[l] a[2k+l] (decimate=2) or a[k+l] (decimate=1)
Eigen::VectorXd filt(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& f, int decimate) {
  const Eigen::Index T = f.size();
  const Eigen::Index nout = a.size() >= T ? (a.size() - T) / decimate + 1 : 0;
  Eigen::VectorXd y(nout);
  for (Eigen::Index k = 0; k < nout; ++k) y[k] = f.dot(a.segment(k * decimate, T));
  return y;
}

long floor_div(long a, long b) {
  long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

}  // namespace

WaveletSpec daubechies(int M) {
  if (M < 1 || M > 10)
    throw std::invalid_argument("daubechies: unsupported order M=" + std::to_string(M) +
                                " (need 1..10)");
  int off = 0;
  for (int m = 1; m < M; ++m) off += 2 * m;
  const int T = 2 * M;
  WaveletSpec w;
  w.vanishing_moments = M;
  w.support = T;
  w.alpha = decay_exponent(M);
  w.lowpass = Eigen::Map<const Eigen::VectorXd>(kDaubechies + off, T);
  w.highpass.resize(T);
  for (int l = 0; l < T; ++l)
    w.highpass[l] = (l % 2 == 0 ? 1.0 : -1.0) * w.lowpass[T - 1 - l];
  return w;
}

long n_available(long n, int T, int j) {
  if (j < 0) throw std::invalid_argument("n_available: j must be >= 0");
  if (j >= 62) return std::numeric_limits<long>::min() / 4;
  return floor_div(n - T + 1, 1L << j) - T + 1;
}

int max_scale(long n, int T) {
  if (n_available(n, T, 0) < 1)
    throw std::invalid_argument("max_scale: no boundary-free coefficients (n=" +
                                std::to_string(n) + ", T=" + std::to_string(T) + ")");
  int j = 0;
  while (n_available(n, T, j + 1) >= 1) ++j;
  return j;
}

WaveletPyramid pyramid(const Eigen::Ref<const TimeSeries>& x, const WaveletSpec& w,
                       std::optional<int> J) {
  const long n = x.size();
  const int T = w.support;
  if (n_available(n, T, 0) < 1)
    throw std::invalid_argument("pyramid: series shorter than filter support allows (n=" +
                                std::to_string(n) + ", T=" + std::to_string(T) + ")");
  const int Jmax = max_scale(n, T);
  int Juse = J.value_or(Jmax);
  if (Juse < 0 || Juse > Jmax)
    throw std::invalid_argument("pyramid: J=" + std::to_string(Juse) +
                                " exceeds maximal scale " + std::to_string(Jmax));
  WaveletPyramid p;
  p.n = n;
  p.J = Juse;
  p.coeffs.resize(Juse + 1);
  p.counts.resize(Juse + 1);

  const long n0 = n_available(n, T, 0);
  p.coeffs[0] = filt(x, w.highpass, 1).head(n0);
  p.counts[0] = n0;

  Eigen::VectorXd a = x;
  for (int j = 1; j <= Juse; ++j) {
    const long nj = n_available(n, T, j);
    Eigen::VectorXd d = filt(a, w.highpass, 2);
    a = filt(a, w.lowpass, 2);
    if (d.size() < nj) throw std::logic_error("pyramid: cascade shorter than n_j");
    p.coeffs[j] = d.head(nj);
    p.counts[j] = nj;
  }
  return p;
}

double scale_spectrum(const WaveletPyramid& p, int j) {
  if (j < 0 || j > p.J || p.counts[j] < 1)
    throw std::out_of_range("scale_spectrum: scale " + std::to_string(j) + " not in pyramid");
  return p.coeffs[j].squaredNorm() / static_cast<double>(p.counts[j]);
}

Eigen::VectorXd equivalent_filter(const WaveletSpec& w, int j) {
  if (j < 0) throw std::invalid_argument("equivalent_filter: j must be >= 0");
  if (j == 0) return w.highpass;
  // scale j detail: E_1 = h; E_j = g * up2(E_{j-1})
  Eigen::VectorXd e = w.highpass;
  for (int lev = 2; lev <= j; ++lev) {
    Eigen::VectorXd up = Eigen::VectorXd::Zero(2 * e.size() - 1);
    for (Eigen::Index i = 0; i < e.size(); ++i) up[2 * i] = e[i];
    Eigen::VectorXd out = Eigen::VectorXd::Zero(up.size() + w.lowpass.size() - 1);
    for (Eigen::Index i = 0; i < up.size(); ++i)
      for (Eigen::Index l = 0; l < w.lowpass.size(); ++l) out[i + l] += up[i] * w.lowpass[l];
    e = out;
  }
  return e;
}

void dump_pyramid_csv(const WaveletPyramid& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "scale,k,coefficient\n";
  char buf[64];
  for (int j = 0; j <= p.J; ++j)
    for (long k = 0; k < p.counts[j]; ++k) {
      std::snprintf(buf, sizeof buf, "%d,%ld,%.17g\n", j, k, p.coeffs[j][k]);
      out << buf;
    }
}

}  // namespace lrd

#include "lrd/estimate.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lrd/minimize.hpp"
#include "lrd/special.hpp"

namespace lrd {

namespace {

constexpr double kLog2 = std::numbers::ln2;

double g_of(double lambda) { return -2.0 * std::log(std::abs(1.0 - std::polar(1.0, lambda))); }

const char* method_name(Method m) {
  switch (m) {
    case Method::GPH: return "gph";
    case Method::LWF: return "lwf";
    case Method::LRW: return "lrw";
    case Method::LWW: return "lww";
  }
  return "?";
}

// clamp the variance-evaluation point into the integrable window; the
// estimate itself is never clamped
double clamp_for_variance(double d, const WaveletSpec& w) {
  const double lo = 0.5 - w.alpha + 0.05;
  const double hi = w.vanishing_moments + 0.2;
  return std::min(std::max(d, lo), hi);
}

void check_scales(int L, int U, int J) {
  if (!(0 <= L && L < U && U <= J))
    throw std::invalid_argument("wavelet tuning: need 0 <= L < U <= J (got L=" +
                                std::to_string(L) + ", U=" + std::to_string(U) +
                                ", J=" + std::to_string(J) + ")");
}

}  // namespace

Eigen::VectorXd av_weights(int ell) {
  if (ell < 1) throw std::invalid_argument("av_weights: ell must be >= 1");
  const double den = 2.0 - std::pow(2.0, -ell);
  double eta = 0.0, kappa = 0.0;
  for (int j = 0; j <= ell; ++j) eta += j * std::pow(2.0, -j);
  eta /= den;
  for (int j = 0; j <= ell; ++j) kappa += (j - eta) * (j - eta) * std::pow(2.0, -j);
  kappa /= den;
  Eigen::VectorXd w(ell + 1);
  for (int i = 0; i <= ell; ++i)
    w[i] = (i - eta) * std::pow(2.0, -i) / (2.0 * kLog2 * kappa * den);
  return w;
}

Eigen::VectorXd optimal_weights(double d, int ell, const WaveletSpec& w) {
  return variance_report(d, ell, w).optimal_weights;
}

std::pair<double, double> gph_fit(const PooledPeriodogram& pp, int m, int trim, int delta) {
  if (m < 2) throw std::invalid_argument("gph: need at least 2 regression blocks");
  if (trim < 0) throw std::invalid_argument("gph: trim must be >= 0");
  if (pp.K < trim + m)
    throw std::invalid_argument("gph: only " + std::to_string(pp.K) +
                                " pooled blocks available, need " + std::to_string(trim + m));
  Eigen::ArrayXd g(m), logI(m);
  for (int k = 0; k < m; ++k) {
    const long idx = trim + k;
    g[k] = g_of(pp.central_freqs[idx]);
    const double ord = pp.ordinates[idx];
    if (!(ord > 0.0)) throw std::runtime_error("gph: zero pooled ordinate");
    logI[k] = std::log(ord);
  }
  const double gbar = g.mean();
  const double S = (g - gbar).square().sum();
  const double slope = ((g - gbar) * logI).sum() / S;
  return {slope + delta, S};
}

EstimateResult gph(const Eigen::Ref<const TimeSeries>& x, const FourierTuning& t) {
  const TimeSeries y = difference(x, t.delta);
  const auto tp = tapered_periodogram(y, t.tau);
  const auto pp = pool(tp, t.p);
  const auto [dhat, S] = gph_fit(pp, t.m, t.trim, t.delta);
  const Sigma2Pool s2 = sigma2_pool(t.p, t.tau);
  EstimateResult r;
  r.method = Method::GPH;
  r.d_hat = dhat;
  r.std = std::sqrt(s2.sigma2 / S);
  r.std_asymptotic = std::sqrt(s2.sigma2 / (4.0 * t.m));
  r.m = t.m;
  r.p = t.p;
  r.tau = t.tau;
  r.delta = t.delta;
  r.trim = t.trim;
  return r;
}

double lwf_fit(const Eigen::Ref<const Eigen::ArrayXd>& ordinates,
               const Eigen::Ref<const Eigen::ArrayXd>& freqs, int delta,
               std::optional<std::pair<double, double>> range, bool* interior) {
  const Eigen::Index m = ordinates.size();
  if (m < 2) throw std::invalid_argument("lwf: need at least 2 ordinates");
  if ((ordinates <= 0.0).all())
    throw std::runtime_error("lwf: all periodogram ordinates are zero");
  Eigen::ArrayXd s(m), logI(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    s[k] = std::log(std::abs(1.0 - std::polar(1.0, freqs[k])));
    logI[k] = ordinates[k] > 0.0 ? std::log(ordinates[k])
                                 : -std::numeric_limits<double>::infinity();
  }
  const double sbar = s.mean();
  // profile likelihood in e = d - delta, log-sum-exp form
  const auto contrast = [&](double e) {
    Eigen::ArrayXd a = 2.0 * e * s + logI;
    const double amax = a.maxCoeff();
    return amax + std::log((a - amax).exp().sum()) - std::log(double(m)) - 2.0 * e * sbar;
  };
  std::optional<double> lo, hi;
  if (range) {
    lo = range->first - delta;
    hi = range->second - delta;
  }
  const auto res = minimize_convex(contrast, 0.0, lo, hi, 1e-10);
  if (interior) *interior = res.interior;
  return res.x + delta;
}

EstimateResult lwf(const Eigen::Ref<const TimeSeries>& x, const FourierTuning& t) {
  const TimeSeries y = difference(x, t.delta);
  const auto tp = tapered_periodogram(y, t.tau);
  if (tp.ordinates.size() < t.trim + t.m)
    throw std::invalid_argument("lwf: only " + std::to_string(tp.ordinates.size()) +
                                " ordinates available, need " + std::to_string(t.trim + t.m));
  EstimateResult r;
  r.method = Method::LWF;
  r.d_hat = lwf_fit(tp.ordinates.segment(t.trim, t.m), tp.frequencies.segment(t.trim, t.m),
                    t.delta, t.range, &r.minimizer_interior);
  r.std = std::sqrt(phi_tau(t.tau) / (4.0 * t.m));
  r.m = t.m;
  r.p = 1;
  r.tau = t.tau;
  r.delta = t.delta;
  r.trim = t.trim;
  return r;
}

std::pair<double, double> lrw_fit(const Eigen::Ref<const Eigen::VectorXd>& log_sig2, int L,
                                  const Eigen::Ref<const Eigen::VectorXd>& weights) {
  const int ell = static_cast<int>(log_sig2.size()) - 1;
  if (ell < 1) throw std::invalid_argument("lrw: need at least 2 scales");
  if (weights.size() != log_sig2.size())
    throw std::invalid_argument("lrw: weight length mismatch");
  const double dhat = weights.dot(log_sig2);
  // intercept: log c with sigma^2_j ~ c 2^{2 d j}; mean residual over used scales
  double resid = 0.0;
  for (int i = 0; i <= ell; ++i) resid += log_sig2[i] - 2.0 * dhat * kLog2 * (L + i);
  return {dhat, resid / (ell + 1)};
}

namespace {

struct WaveletFitInput {
  WaveletPyramid pyr;
  int L = 0, U = 0, J = 0;
  Eigen::VectorXd log_sig2;   // scales L..U
  Eigen::VectorXd energies;   // sum of squares per scale
  Eigen::VectorXd counts;
};

WaveletFitInput prepare_wavelet_fit(const Eigen::Ref<const TimeSeries>& x,
                                    const WaveletTuning& t, const WaveletSpec& w,
                                    bool need_log) {
  WaveletFitInput in;
  const TimeSeries y = difference(x, t.delta);
  in.J = max_scale(y.size(), w.support);
  in.L = t.L;
  in.U = t.U.value_or(in.J);
  check_scales(in.L, in.U, in.J);
  in.pyr = pyramid(y, w, in.U);
  const int ns = in.U - in.L + 1;
  in.log_sig2.resize(ns);
  in.energies.resize(ns);
  in.counts.resize(ns);
  for (int j = in.L; j <= in.U; ++j) {
    const double e = in.pyr.coeffs[j].squaredNorm();
    in.energies[j - in.L] = e;
    in.counts[j - in.L] = static_cast<double>(in.pyr.counts[j]);
    if (need_log) {
      if (!(e > 0.0))
        throw std::runtime_error("lrw: zero scale spectrum at scale " + std::to_string(j));
      in.log_sig2[j - in.L] = std::log(e / in.counts[j - in.L]);
    }
  }
  return in;
}

}  // namespace

EstimateResult lrw(const Eigen::Ref<const TimeSeries>& x, const WaveletTuning& t,
                   const WaveletSpec& w) {
  const auto in = prepare_wavelet_fit(x, t, w, true);
  const int ell = in.U - in.L;
  Eigen::VectorXd wt;
  switch (t.weights) {
    case LrwWeights::AbryVeitch:
      wt = av_weights(ell);
      break;
    case LrwWeights::Optimal: {
      // pilot_d is in original-series units; the fit runs on the differenced series
      const double pilot = t.pilot_d ? *t.pilot_d - t.delta
                                     : lrw_fit(in.log_sig2, in.L, av_weights(ell)).first;
      wt = optimal_weights(clamp_for_variance(pilot, w), ell, w);
      break;
    }
    case LrwWeights::Explicit: {
      if (!t.explicit_weights) throw std::invalid_argument("lrw: explicit weights missing");
      wt = *t.explicit_weights;
      if (wt.size() != ell + 1)
        throw std::invalid_argument("lrw: explicit weights must have length ell+1");
      double c0 = wt.sum(), c1 = 0.0;
      for (int i = 0; i <= ell; ++i) c1 += i * wt[i];
      if (std::abs(c0) > 1e-6 || std::abs(2.0 * kLog2 * c1 - 1.0) > 1e-6)
        throw std::invalid_argument("lrw: explicit weights violate the regression constraints");
      break;
    }
  }
  const auto [dfit, logc] = lrw_fit(in.log_sig2, in.L, wt);
  EstimateResult r;
  r.method = Method::LRW;
  r.d_hat = dfit + t.delta;
  r.intercept = std::exp(logc);
  r.weights_used = wt;
  r.L = in.L;
  r.U = in.U;
  r.delta = t.delta;
  const auto table = shared_psi_table(w);
  const Eigen::MatrixXd S = sigma_matrix(clamp_for_variance(dfit, w), ell, *table);
  const double n_eff = static_cast<double>(in.pyr.n) * std::pow(2.0, -in.L);
  r.std = std::sqrt(wt.dot(S * wt) / n_eff);
  return r;
}

double lww_fit(const Eigen::Ref<const Eigen::VectorXd>& energies,
               const Eigen::Ref<const Eigen::VectorXd>& counts, int L,
               std::optional<std::pair<double, double>> range, bool* interior) {
  const int ns = static_cast<int>(energies.size());
  if (ns < 2) throw std::invalid_argument("lww: need at least 2 scales");
  if ((energies.array() <= 0.0).all())
    throw std::runtime_error("lww: all wavelet coefficients are zero");
  const double jbar = [&] {
    double njs = 0.0, js = 0.0;
    for (int i = 0; i < ns; ++i) {
      njs += counts[i];
      js += counts[i] * (L + i);
    }
    return js / njs;
  }();
  Eigen::ArrayXd logE(ns), jdev(ns);
  for (int i = 0; i < ns; ++i) {
    logE[i] = energies[i] > 0.0 ? std::log(energies[i])
                                : -std::numeric_limits<double>::infinity();
    jdev[i] = jbar - (L + i);
  }
  const auto contrast = [&](double d) {
    Eigen::ArrayXd a = 2.0 * d * kLog2 * jdev + logE;
    const double amax = a.maxCoeff();
    return amax + std::log((a - amax).exp().sum());
  };
  std::optional<double> lo, hi;
  if (range) {
    lo = range->first;
    hi = range->second;
  }
  const auto res = minimize_convex(contrast, 0.0, lo, hi, 1e-10);
  if (interior) *interior = res.interior;
  return res.x;
}

EstimateResult lww(const Eigen::Ref<const TimeSeries>& x, const WaveletTuning& t,
                   const WaveletSpec& w) {
  const auto in = prepare_wavelet_fit(x, t, w, false);
  const int ell = in.U - in.L;
  EstimateResult r;
  r.method = Method::LWW;
  const double dfit = lww_fit(in.energies, in.counts, in.L, t.range, &r.minimizer_interior);
  r.d_hat = dfit + t.delta;
  r.L = in.L;
  r.U = in.U;
  r.delta = t.delta;
  const auto table = shared_psi_table(w);
  const double n_eff = static_cast<double>(in.pyr.n) * std::pow(2.0, -in.L);
  r.std = std::sqrt(v_av(clamp_for_variance(dfit, w), ell, *table) / n_eff);
  return r;
}

std::pair<double, double> confidence_interval(double d, double std, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("confidence_interval: level must be in (0,1)");
  if (!(std >= 0.0)) throw std::invalid_argument("confidence_interval: std must be >= 0");
  const double z = normal_quantile(0.5 * (1.0 + level));
  return {d - z * std, d + z * std};
}

std::string EstimateResult::to_json() const {
  nlohmann::json j;
  j["method"] = method_name(method);
  j["d_hat"] = d_hat;
  j["std"] = std;
  if (std_asymptotic) j["std_asymptotic"] = *std_asymptotic;
  if (intercept) j["intercept"] = *intercept;
  if (weights_used) {
    std::vector<double> w(weights_used->data(), weights_used->data() + weights_used->size());
    j["weights"] = w;
  }
  nlohmann::json tun;
  if (method == Method::GPH || method == Method::LWF) {
    tun["m"] = m;
    tun["p"] = p;
    tun["tau"] = tau;
    tun["trim"] = trim;
  } else {
    tun["L"] = L;
    tun["U"] = U;
  }
  tun["delta"] = delta;
  j["tuning"] = tun;
  return j.dump();
}

}  // namespace lrd

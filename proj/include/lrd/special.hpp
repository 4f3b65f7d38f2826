#ifndef LRD_SPECIAL_HPP
#define LRD_SPECIAL_HPP

namespace lrd {

// psi(z) = Gamma'(z)/Gamma(z), z > 0. Recurrence + asymptotic series.
double digamma(double z);

// psi'(z), z > 0. Accurate to ~1e-12 relative.
double trigamma(double z);

// Standard normal quantile (Wichura PPND16), p in (0,1).
double normal_quantile(double p);

}  // namespace lrd

#endif

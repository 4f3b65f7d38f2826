#ifndef LRD_SERIES_OPS_HPP
#define LRD_SERIES_OPS_HPP

#include <Eigen/Core>
#include <string>

namespace lrd {

using TimeSeries = Eigen::VectorXd;

// delta-th order difference; output length n - delta. delta = 0 is the identity.
TimeSeries difference(const Eigen::Ref<const TimeSeries>& x, int delta);

// k-fold cumulative sum, each pass starting at `initial`; inverse of difference
// up to round-off. Length preserved.
TimeSeries integrate(const Eigen::Ref<const TimeSeries>& x, int order, double initial = 0.0);

// One ASCII real per line; '#' starts a comment; blank lines skipped.
// Rejects NaN/Inf.
TimeSeries read_series(const std::string& path);
TimeSeries read_series_stream(std::istream& in, const std::string& name);
void write_series(const std::string& path, const Eigen::Ref<const TimeSeries>& x);

}  // namespace lrd

#endif

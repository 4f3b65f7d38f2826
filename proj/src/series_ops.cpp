#include "lrd/series_ops.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lrd {

TimeSeries difference(const Eigen::Ref<const TimeSeries>& x, int delta) {
  if (delta < 0) throw std::invalid_argument("difference: order must be >= 0");
  if (delta >= x.size())
    throw std::invalid_argument("difference: order " + std::to_string(delta) +
                                " >= series length " + std::to_string(x.size()));
  TimeSeries y = x;
  for (int pass = 0; pass < delta; ++pass) {
    const auto m = y.size() - 1;
    y = (y.tail(m) - y.head(m)).eval();
  }
  return y;
}

TimeSeries integrate(const Eigen::Ref<const TimeSeries>& x, int order, double initial) {
  if (order < 0) throw std::invalid_argument("integrate: order must be >= 0");
  TimeSeries y = x;
  for (int pass = 0; pass < order; ++pass) {
    // compensated summation so the round trip with difference() stays tight
    double acc = initial, comp = 0.0;
    for (Eigen::Index t = 0; t < y.size(); ++t) {
      const double term = y[t] - comp;
      const double next = acc + term;
      comp = (next - acc) - term;
      acc = next;
      y[t] = acc;
    }
  }
  return y;
}

TimeSeries read_series_stream(std::istream& in, const std::string& name) {
  std::vector<double> vals;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;  // blank or comment-only line
    const char* start = line.c_str() + first;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start)
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": unparseable value");
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0')
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": trailing content");
    if (!std::isfinite(v))
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": non-finite value");
    vals.push_back(v);
  }
  if (vals.empty()) throw std::runtime_error(name + ": no data");
  return Eigen::Map<const TimeSeries>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

TimeSeries read_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_series_stream(in, path);
}

void write_series(const std::string& path, const Eigen::Ref<const TimeSeries>& x) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[40];
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x[t]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lrd

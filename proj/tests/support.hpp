#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "nsv/fields.hpp"

namespace nsv::test {

/// Frozen reference values produced by oracles/generate_oracles.py.
inline const nlohmann::json& oracles() {
  static const nlohmann::json doc = [] {
    std::ifstream in(NSV_ORACLES);
    if (!in) throw std::runtime_error("cannot open " NSV_ORACLES);
    return nlohmann::json::parse(in);
  }();
  return doc;
}

inline TimeSeries sample(const TimeGrid& tg, const std::function<double(double)>& fn) {
  TimeSeries s(tg);
  for (int n = 0; n < tg.nodes(); ++n) s[n] = fn(tg.time(n));
  return s;
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i)
    m = std::max(m, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  return m;
}

inline double max_abs_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
  return std::max({max_abs_diff(a[0], b[0]), max_abs_diff(a[1], b[1]), max_abs_diff(a[2], b[2])});
}

inline double max_abs_diff(const SpaceTimeField& a, const SpaceTimeField& b) {
  double m = 0;
  for (std::size_t n = 0; n < a.snapshots.size(); ++n)
    m = std::max(m, max_abs_diff(a[n], b[n]));
  return m;
}

inline double max_abs(const SpaceTimeField& a) {
  double m = 0;
  for (const auto& s : a.snapshots) m = std::max(m, s.max_abs());
  return m;
}

}  // namespace nsv::test

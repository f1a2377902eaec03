#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "scalesim/errors.hpp"

namespace scalesim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Open interval (lo, hi) of the extended real line.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  Interval() = default;
  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo < hi)) throw InvalidArgument("interval requires lo < hi");
  }

  static Interval real_line() { return {}; }

  bool contains(double x) const { return x > lo && x < hi; }
  bool contains_closed(double x) const { return x >= lo && x <= hi; }
  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  double length() const { return hi - lo; }
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace scalesim

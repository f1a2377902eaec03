#include "scalesim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "scalesim/errors.hpp"

namespace scalesim {

namespace {

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate(const Integrand& f, double a, double b) {
  double error = 0.0;
  const double value = GK15::integrate(f, a, b, 0, 0.0, &error);
  if (!std::isfinite(value) || !std::isfinite(error)) {
    throw QuadratureError("quadrature produced a non-finite value");
  }
  return {a, b, value, error};
}

// Globally adaptive: always bisect the panel with the largest error estimate,
// stop when the summed estimate meets the tolerance or the panel budget runs out.
QuadratureResult adapt(const Integrand& f, const std::vector<double>& cuts,
                       double rel_tol, unsigned max_depth) {
  std::priority_queue<Panel> open;
  std::vector<Panel> done;
  double value = 0.0, error = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Panel p = evaluate(f, cuts[i], cuts[i + 1]);
    value += p.value;
    error += p.error;
    l1 += std::abs(p.value);
    open.push(p);
  }
  const std::size_t budget = open.size() + (std::size_t{1} << std::min(max_depth, 20u));
  std::size_t panels = open.size();
  auto satisfied = [&] { return error <= rel_tol * l1 || error <= 1e-300; };
  while (!open.empty() && !satisfied() && panels < budget) {
    const Panel worst = open.top();
    open.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      done.push_back(worst);
      continue;
    }
    const Panel left = evaluate(f, worst.a, mid);
    const Panel right = evaluate(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += std::abs(left.value) + std::abs(right.value) - std::abs(worst.value);
    open.push(left);
    open.push(right);
    ++panels;
  }
  // Re-sum from the final panels to avoid drift from the running updates.
  QuadratureResult out;
  l1 = 0.0;
  for (const auto& p : done) out.value += p.value, out.error += p.error, l1 += std::abs(p.value);
  while (!open.empty()) {
    const Panel& p = open.top();
    out.value += p.value;
    out.error += p.error;
    l1 += std::abs(p.value);
    open.pop();
  }
  out.converged = out.error <= rel_tol * l1 || out.error <= 1e-14;
  return out;
}

QuadratureResult infinite(const Integrand& f, double a, double b, double rel_tol,
                          unsigned max_depth) {
  double error = 0.0, l1 = 0.0, value = 0.0;
  try {
    value = GK15::integrate(f, a, b, max_depth, rel_tol, &error, &l1);
  } catch (const std::exception& e) {
    throw QuadratureError(std::string("quadrature failed: ") + e.what());
  }
  if (!std::isfinite(value) || !std::isfinite(error)) {
    throw QuadratureError("quadrature produced a non-finite value");
  }
  return {value, error, error <= rel_tol * l1 || error <= 1e-14};
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b,
                           double rel_tol, unsigned max_depth) {
  return integrate_pieces(f, a, b, {}, rel_tol, max_depth);
}

QuadratureResult integrate_pieces(const Integrand& f, double a, double b,
                                  std::span<const double> breakpoints,
                                  double rel_tol, unsigned max_depth) {
  if (a == b) return {};
  if (a > b) {
    auto r = integrate_pieces(f, b, a, breakpoints, rel_tol, max_depth);
    r.value = -r.value;
    return r;
  }
  if (std::isinf(a) || std::isinf(b)) {
    if (!breakpoints.empty()) {
      throw InvalidArgument("breakpoints are not supported on infinite intervals");
    }
    return infinite(f, a, b, rel_tol, max_depth);
  }
  std::vector<double> cuts{a};
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), a);
  for (; it != breakpoints.end() && *it < b; ++it) {
    if (*it > cuts.back()) cuts.push_back(*it);
  }
  cuts.push_back(b);
  try {
    return adapt(f, cuts, rel_tol, max_depth);
  } catch (const QuadratureError&) {
    throw;
  } catch (const std::exception& e) {
    throw QuadratureError(std::string("quadrature failed: ") + e.what());
  }
}

}  // namespace scalesim

#pragma once

#include <functional>
#include <span>

namespace scalesim {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b]; at most 2^max_depth
/// bisections. Endpoints may be infinite.
/// Throws QuadratureError if the integrand produces non-finite values.
QuadratureResult integrate(const Integrand& f, double a, double b,
                           double rel_tol = 1e-9, unsigned max_depth = 15);

/// Same, split at every breakpoint strictly inside (a, b). Breakpoints must be
/// sorted; ones outside the interval are ignored.
QuadratureResult integrate_pieces(const Integrand& f, double a, double b,
                                  std::span<const double> breakpoints,
                                  double rel_tol = 1e-9,
                                  unsigned max_depth = 15);

}  // namespace scalesim

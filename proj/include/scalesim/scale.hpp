#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scalesim/cantor.hpp"
#include "scalesim/errors.hpp"
#include "scalesim/interval.hpp"

namespace scalesim {

/// Regularity class of (an a.e. version of) t' where t is the inverse scale.
enum class InverseClass {
  Lipschitz,
  AbsolutelyContinuous,
  BoundedVariationWithJumps,
  NotBoundedVariation,
};

const char* to_string(InverseClass c);

/// Jump of t' at the scale point s(state): t'(s(state)+) - t'(s(state)-).
struct InverseJump {
  double state;
  double jump;
};

using Description = std::vector<std::pair<std::string, std::string>>;

/// A strictly increasing continuous scale function s with s(anchor) = 0 and
/// Lebesgue decomposition ds = g dx + kappa. Implementations are immutable.
class ScaleModel {
 public:
  virtual ~ScaleModel() = default;

  virtual std::string kind() const = 0;
  virtual Interval domain() const = 0;
  virtual double anchor() const = 0;
  /// s(x); models accept the (possibly infinite) domain endpoints.
  virtual double value(double x) const = 0;
  /// J = s(domain).
  virtual Interval range() const;

  /// g(x), density of the absolutely continuous part.
  virtual double density(double x) const = 0;
  virtual std::optional<double> density_derivative(double) const {
    return std::nullopt;
  }
  virtual const SingularMeasure* singular() const { return nullptr; }
  /// Integral of g over [x0, x1].
  virtual double abs_cont_integral(double x0, double x1) const;

  /// Whether inverse() is evaluated in closed form rather than by bracketing.
  virtual bool closed_form_inverse() const { return false; }
  virtual double inverse(double y) const;

  /// t' o s at a state point (right-continuous version; a.e. equal to 1/g).
  virtual double inverse_derivative_at(double x) const;
  /// t'' o s at a state point, where t' is differentiable.
  virtual double inverse_second_derivative_at(double x) const;
  /// t'(y) and t''(y) in scale coordinates, without a round trip through t.
  virtual double inverse_derivative(double y) const {
    return inverse_derivative_at(inverse(y));
  }
  virtual double inverse_second_derivative(double y) const {
    return inverse_second_derivative_at(inverse(y));
  }
  virtual InverseClass inverse_class() const = 0;
  /// t is piecewise linear (so t'' = 0 off its kinks).
  virtual bool inverse_piecewise_linear() const { return false; }
  virtual std::vector<InverseJump> inverse_jumps() const { return {}; }

  /// State points where g or t' o s fail to be smooth, inside [lo, hi].
  virtual std::vector<double> breakpoints(double, double) const { return {}; }
  /// Same, in scale coordinates (points y with t nonsmooth near y).
  virtual std::vector<double> scale_breakpoints(double, double) const {
    return {};
  }

  virtual Description describe() const = 0;
};

using ScaleFunction = std::shared_ptr<const ScaleModel>;

/// Bracketing inversion of s: returns x with s(x) within tol of y (and the
/// bracket shrunk to a few ulps of x). Throws DomainError for y outside J.
double bracket_inverse(const ScaleModel& s, double y, double tol);

class InverseScale {
 public:
  InverseScale(ScaleFunction s, double tol);

  const ScaleFunction& scale() const { return s_; }
  double tolerance() const { return tol_; }
  Interval range() const { return range_; }

  double operator()(double y) const;
  /// t'(y).
  double derivative(double y) const;
  /// t''(y) where defined.
  double second_derivative(double y) const;

 private:
  ScaleFunction s_;
  double tol_;
  Interval range_;
};

InverseScale invert(const ScaleFunction& s, double tol = 1e-12);

// Constructions.

ScaleFunction identity_scale(Interval domain = Interval::real_line());

struct CantorScale {
  ScaleFunction scale;
  InverseScale inverse;
};

/// t = integral of psi = d(., K), extended by psi outside the base so that
/// t(+-inf) = +-inf; s = t^-1 anchored where the construction starts.
CantorScale build_cantor_scale(const GeneralizedCantorSpec& spec);

/// s(x) = x + c(x) with c the middle-thirds Cantor function.
CantorScale build_devils_staircase_scale(int depth);

/// s_hat = gamma1 (s - s(x0)) left of x0, gamma2 (s - s(x0)) right of it,
/// shifted so s_hat(anchor) = 0.
ScaleFunction skew_scale(const ScaleFunction& s, double x0, double gamma1,
                         double gamma2);

/// s with kappa dropped.
ScaleFunction abs_cont_part(const ScaleFunction& s);

/// s_c: g plus kappa restricted to [e - x_c, e + x_c], kappa(window) = c.
ScaleFunction subspace_scale(const ScaleFunction& s, double c);
/// x_c for a subspace scale (0 when s has no singular part).
double subspace_half_width(const ScaleFunction& s, double c);

struct LebesgueDecomposition {
  ScaleFunction scale;
  double kappa_mass = 0.0;
  const ScaleModel& model() const { return *scale; }
  double g(double x) const { return scale->density(x); }
  const SingularMeasure* kappa() const { return scale->singular(); }
};

struct AuditResult {
  int probes = 0;
  double worst_excess = 0.0;  // max of |residual| - allowed; <= 0 passes
  double worst_residual = 0.0;
};

/// Checks |ds - int g - dkappa| <= 1e-8 |ds| + 1e-12 on seeded random probe
/// intervals (half of them inside the hull of kappa when present).
AuditResult audit_decomposition(const ScaleModel& s, std::uint64_t seed,
                                int probes = 100);

/// Accessor plus audit; throws AuditFailure on mismatch.
LebesgueDecomposition lebesgue_decompose(const ScaleFunction& s,
                                         std::uint64_t seed = 1);

/// Window used for random probes: the domain clipped to a neighborhood of
/// the anchor and the singular hull.
Interval probe_window(const ScaleModel& s);

}  // namespace scalesim

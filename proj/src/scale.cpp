#include "scalesim/scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "scalesim/format.hpp"
#include "scalesim/quadrature.hpp"
#include "scalesim/rng.hpp"

namespace scalesim {

const char* to_string(InverseClass c) {
  switch (c) {
    case InverseClass::Lipschitz: return "lipschitz";
    case InverseClass::AbsolutelyContinuous: return "absolutely-continuous";
    case InverseClass::BoundedVariationWithJumps: return "bounded-variation-with-jumps";
    case InverseClass::NotBoundedVariation: return "not-bounded-variation";
  }
  return "unknown";
}

Interval ScaleModel::range() const {
  const Interval d = domain();
  return Interval(value(d.lo), value(d.hi));
}

double ScaleModel::abs_cont_integral(double x0, double x1) const {
  if (x0 == x1) return 0.0;
  const double lo = std::min(x0, x1);
  const double hi = std::max(x0, x1);
  const auto pts = breakpoints(lo, hi);
  const auto r = integrate_pieces([this](double x) { return density(x); }, lo,
                                  hi, pts, 1e-11);
  return x0 < x1 ? r.value : -r.value;
}

double ScaleModel::inverse(double y) const {
  return bracket_inverse(*this, y, 1e-12);
}

double ScaleModel::inverse_derivative_at(double x) const {
  return 1.0 / density(x);
}

double ScaleModel::inverse_second_derivative_at(double x) const {
  const double g = density(x);
  double dg;
  if (auto exact = density_derivative(x)) {
    dg = *exact;
  } else {
    const Interval d = domain();
    double h = 1e-5 * (1.0 + std::abs(x));
    if (d.bounded()) h = std::min(h, 0.25 * std::min(x - d.lo, d.hi - x));
    dg = (density(x + h) - density(x - h)) / (2.0 * h);
  }
  return -dg / (g * g * g);
}

namespace {

double step_toward(double x, double bound, double& step) {
  if (std::isfinite(bound)) return x + 0.5 * (bound - x);
  const double next = bound > x ? x + step : x - step;
  step *= 2.0;
  return next;
}

}  // namespace

double bracket_inverse(const ScaleModel& s, double y, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("inversion tolerance must be > 0");
  const Interval dom = s.domain();
  const Interval J = s.range();
  if (!(y >= J.lo && y <= J.hi) || std::isinf(y)) {
    throw DomainError("value " + format_double(y) + " outside the scale range");
  }
  if (y == J.lo) return dom.lo;
  if (y == J.hi) return dom.hi;

  const double e = s.anchor();
  double lo = e, hi = e;
  double flo = s.value(e) - y, fhi = flo;
  if (flo == 0.0) return e;
  double step = 1.0 + std::abs(e);
  if (flo < 0.0) {
    for (int i = 0; i < 4000 && fhi < 0.0; ++i) {
      lo = hi;
      flo = fhi;
      hi = step_toward(hi, dom.hi, step);
      fhi = s.value(hi) - y;
    }
  } else {
    for (int i = 0; i < 4000 && flo > 0.0; ++i) {
      hi = lo;
      fhi = flo;
      lo = step_toward(lo, dom.lo, step);
      flo = s.value(lo) - y;
    }
  }
  if (flo > 0.0 || fhi < 0.0) {
    throw DomainError("could not bracket s^-1(" + format_double(y) + ")");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;

  auto f = [&](double x) { return s.value(x) - y; };
  auto done = [&](double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * scale ||
           std::abs(b - a) <= std::numeric_limits<double>::min();
  };
  std::uintmax_t iters = 400;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
  const double fa = std::abs(f(a));
  const double fb = std::abs(f(b));
  (void)tol;
  return fa <= fb ? a : b;
}

InverseScale::InverseScale(ScaleFunction s, double tol)
    : s_(std::move(s)), tol_(tol), range_(s_->range()) {
  if (!(tol > 0.0)) throw InvalidArgument("inversion tolerance must be > 0");
}

double InverseScale::operator()(double y) const {
  if (!(y >= range_.lo && y <= range_.hi)) {
    throw DomainError("value " + format_double(y) + " outside the scale range");
  }
  if (s_->closed_form_inverse()) return s_->inverse(y);
  return bracket_inverse(*s_, y, tol_);
}

double InverseScale::derivative(double y) const {
  return s_->inverse_derivative_at((*this)(y));
}

double InverseScale::second_derivative(double y) const {
  return s_->inverse_second_derivative_at((*this)(y));
}

InverseScale invert(const ScaleFunction& s, double tol) {
  return InverseScale(s, tol);
}

Interval probe_window(const ScaleModel& s) {
  const Interval d = s.domain();
  const double e = s.anchor();
  double lo = std::max(d.lo, e - 4.0);
  double hi = std::min(d.hi, e + 4.0);
  if (const auto* k = s.singular()) {
    const auto [klo, khi] = k->hull();
    lo = std::max(d.lo, std::min(lo, klo - 0.5 * (khi - klo)));
    hi = std::min(d.hi, std::max(hi, khi + 0.5 * (khi - klo)));
  }
  if (d.bounded()) {
    const double pad = 1e-6 * d.length();
    lo = std::max(lo, d.lo + pad);
    hi = std::min(hi, d.hi - pad);
  }
  return Interval(lo, hi);
}

AuditResult audit_decomposition(const ScaleModel& s, std::uint64_t seed,
                                int probes) {
  AuditResult out;
  Rng rng(seed, 0xa0d17);
  const Interval w = probe_window(s);
  const auto* kappa = s.singular();
  for (int i = 0; i < probes; ++i) {
    double lo = w.lo, hi = w.hi;
    if (kappa && i % 2 == 1) {
      const auto [klo, khi] = kappa->hull();
      lo = std::max(w.lo, klo);
      hi = std::min(w.hi, khi);
      if (!(lo < hi)) lo = w.lo, hi = w.hi;
    }
    double x0 = lo + (hi - lo) * rng.uniform();
    double x1 = lo + (hi - lo) * rng.uniform();
    if (x0 > x1) std::swap(x0, x1);
    if (x0 == x1) continue;
    const double ds = s.value(x1) - s.value(x0);
    const double ac = s.abs_cont_integral(x0, x1);
    const double dk = kappa ? kappa->mass(x0, x1) : 0.0;
    const double residual = std::abs(ds - ac - dk);
    const double allowed = 1e-8 * std::abs(ds) + 1e-12;
    out.worst_residual = std::max(out.worst_residual, residual);
    out.worst_excess = out.probes == 0 ? residual - allowed
                                       : std::max(out.worst_excess, residual - allowed);
    ++out.probes;
  }
  return out;
}

LebesgueDecomposition lebesgue_decompose(const ScaleFunction& s,
                                         std::uint64_t seed) {
  const auto audit = audit_decomposition(*s, seed);
  if (audit.worst_excess > 0.0) {
    throw AuditFailure("decomposition audit failed: residual " +
                       format_double(audit.worst_residual));
  }
  LebesgueDecomposition out;
  out.scale = s;
  out.kappa_mass = s->singular() ? s->singular()->total_mass() : 0.0;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double default_anchor(const Interval& d) {
  if (d.contains(0.0)) return 0.0;
  return 0.5 * (d.lo + d.hi);
}

class IdentityScale final : public ScaleModel {
 public:
  explicit IdentityScale(Interval d) : d_(d), e_(default_anchor(d)) {}
  std::string kind() const override { return "identity"; }
  Interval domain() const override { return d_; }
  double anchor() const override { return e_; }
  double value(double x) const override { return x - e_; }
  double density(double) const override { return 1.0; }
  std::optional<double> density_derivative(double) const override { return 0.0; }
  double abs_cont_integral(double x0, double x1) const override { return x1 - x0; }
  bool closed_form_inverse() const override { return true; }
  double inverse(double y) const override { return y + e_; }
  double inverse_derivative_at(double) const override { return 1.0; }
  double inverse_second_derivative_at(double) const override { return 0.0; }
  InverseClass inverse_class() const override { return InverseClass::Lipschitz; }
  bool inverse_piecewise_linear() const override { return true; }
  Description describe() const override {
    return {{"kind", "identity"},
            {"domain", format_double(d_.lo) + " " + format_double(d_.hi)},
            {"anchor", format_double(e_)}};
  }

 private:
  Interval d_;
  double e_;
};

class SkewScale final : public ScaleModel {
 public:
  SkewScale(ScaleFunction parent, double x0, double g1, double g2)
      : p_(std::move(parent)), x0_(x0), g1_(g1), g2_(g2), sx0_(p_->value(x0)) {
    if (const auto* k = p_->singular()) {
      kappa_ = k->reweighted(x0, g1, g2);
    }
    shift_ = raw(p_->anchor());
  }

  std::string kind() const override { return "skew"; }
  Interval domain() const override { return p_->domain(); }
  double anchor() const override { return p_->anchor(); }
  double value(double x) const override { return raw(x) - shift_; }
  double density(double x) const override { return gamma(x) * p_->density(x); }
  std::optional<double> density_derivative(double x) const override {
    auto d = p_->density_derivative(x);
    if (d) return gamma(x) * *d;
    return std::nullopt;
  }
  const SingularMeasure* singular() const override {
    return kappa_ ? &*kappa_ : nullptr;
  }
  double abs_cont_integral(double x0, double x1) const override {
    if (x0 > x1) return -abs_cont_integral(x1, x0);
    double total = 0.0;
    if (x0 < x0_) total += g1_ * p_->abs_cont_integral(x0, std::min(x1, x0_));
    if (x1 > x0_) total += g2_ * p_->abs_cont_integral(std::max(x0, x0_), x1);
    return total;
  }
  bool closed_form_inverse() const override { return p_->closed_form_inverse(); }
  double inverse(double y) const override {
    const double r = y + shift_;
    const double g = r < 0.0 ? g1_ : g2_;
    if (!p_->closed_form_inverse()) return bracket_inverse(*this, y, 1e-12);
    return p_->inverse(sx0_ + r / g);
  }
  double inverse_derivative_at(double x) const override {
    return p_->inverse_derivative_at(x) / gamma(x);
  }
  double inverse_derivative(double y) const override {
    const double r = y + shift_;
    const double g = r < 0.0 ? g1_ : g2_;
    return p_->inverse_derivative(sx0_ + r / g) / g;
  }
  double inverse_second_derivative(double y) const override {
    const double r = y + shift_;
    const double g = r < 0.0 ? g1_ : g2_;
    return p_->inverse_second_derivative(sx0_ + r / g) / (g * g);
  }
  double inverse_second_derivative_at(double x) const override {
    const double g = gamma(x);
    return p_->inverse_second_derivative_at(x) / (g * g);
  }
  InverseClass inverse_class() const override {
    const auto c = p_->inverse_class();
    if (g1_ == g2_ || c == InverseClass::NotBoundedVariation) return c;
    return InverseClass::BoundedVariationWithJumps;
  }
  bool inverse_piecewise_linear() const override {
    return p_->inverse_piecewise_linear();
  }
  std::vector<InverseJump> inverse_jumps() const override {
    std::vector<InverseJump> out;
    for (const auto& j : p_->inverse_jumps()) {
      out.push_back({j.state, j.jump / gamma(j.state)});
    }
    if (g1_ != g2_) {
      const double tp = p_->inverse_derivative_at(x0_);
      out.push_back({x0_, tp / g2_ - tp / g1_});
    }
    std::sort(out.begin(), out.end(),
              [](const InverseJump& a, const InverseJump& b) { return a.state < b.state; });
    return out;
  }
  std::vector<double> breakpoints(double lo, double hi) const override {
    auto pts = p_->breakpoints(lo, hi);
    if (lo < x0_ && x0_ < hi) pts.insert(std::upper_bound(pts.begin(), pts.end(), x0_), x0_);
    return pts;
  }
  std::vector<double> scale_breakpoints(double lo, double hi) const override {
    // Parent scale breakpoints mapped through the affine pieces.
    std::vector<double> out;
    const double y0 = value(x0_);
    auto to_parent = [&](double y) {
      return sx0_ + (y - y0) / (y < y0 ? g1_ : g2_);
    };
    const double plo = to_parent(lo), phi = to_parent(hi);
    for (double q : p_->scale_breakpoints(plo, phi)) {
      const double r = q - sx0_;
      out.push_back(y0 + r * (r < 0.0 ? g1_ : g2_));
    }
    if (lo < y0 && y0 < hi) out.push_back(y0);
    std::sort(out.begin(), out.end());
    return out;
  }
  Description describe() const override {
    Description d{{"kind", "skew"},
                  {"skew.x0", format_double(x0_)},
                  {"skew.gamma1", format_double(g1_)},
                  {"skew.gamma2", format_double(g2_)}};
    for (auto& [k, v] : p_->describe()) d.emplace_back("parent." + k, v);
    return d;
  }

 private:
  double gamma(double x) const { return x < x0_ ? g1_ : g2_; }
  double raw(double x) const {
    const double r = p_->value(x) - sx0_;
    return (x < x0_ ? g1_ : g2_) * r;
  }

  ScaleFunction p_;
  double x0_, g1_, g2_, sx0_;
  double shift_ = 0.0;
  std::optional<SingularMeasure> kappa_;
};

class SubspaceScale final : public ScaleModel {
 public:
  SubspaceScale(ScaleFunction parent, double c, double half_width)
      : p_(std::move(parent)), c_(c), xc_(half_width) {
    const auto* k = p_->singular();
    const double e = p_->anchor();
    if (k) {
      inside_ = k->restricted(e - xc_, e + xc_);
      if (c_ <= 0.0) inside_ = k->restricted(e, e);
    }
  }

  std::string kind() const override { return "subspace"; }
  Interval domain() const override { return p_->domain(); }
  double anchor() const override { return p_->anchor(); }
  double value(double x) const override {
    const auto* k = p_->singular();
    if (!k) return p_->value(x);
    const double e = p_->anchor();
    const double outside = k->signed_mass(e, x) - inside_->signed_mass(e, x);
    return p_->value(x) - outside;
  }
  Interval range() const override {
    const Interval d = domain();
    return Interval(value(d.lo), value(d.hi));
  }
  double density(double x) const override { return p_->density(x); }
  std::optional<double> density_derivative(double x) const override {
    if (auto d = p_->density_derivative(x)) return d;
    const double h = 1e-6 * (1.0 + std::abs(x));
    return (p_->density(x + h) - p_->density(x - h)) / (2.0 * h);
  }
  const SingularMeasure* singular() const override {
    return inside_ && c_ > 0.0 ? &*inside_ : nullptr;
  }
  double abs_cont_integral(double x0, double x1) const override {
    return p_->abs_cont_integral(x0, x1);
  }
  InverseClass inverse_class() const override { return p_->inverse_class(); }
  std::vector<InverseJump> inverse_jumps() const override {
    return p_->inverse_jumps();
  }
  std::vector<double> breakpoints(double lo, double hi) const override {
    return p_->breakpoints(lo, hi);
  }
  Description describe() const override {
    Description d{{"kind", "subspace"},
                  {"subspace.c", format_double(c_)},
                  {"subspace.half_width", format_double(xc_)}};
    for (auto& [k, v] : p_->describe()) d.emplace_back("parent." + k, v);
    return d;
  }

  const ScaleFunction& parent() const { return p_; }

 private:
  ScaleFunction p_;
  double c_;
  double xc_;
  std::optional<SingularMeasure> inside_;
};

}  // namespace

ScaleFunction identity_scale(Interval domain) {
  return std::make_shared<IdentityScale>(domain);
}

ScaleFunction skew_scale(const ScaleFunction& s, double x0, double gamma1,
                         double gamma2) {
  if (!s->domain().contains(x0)) {
    throw DomainError("skew point " + format_double(x0) + " outside the domain");
  }
  if (!(gamma1 > 0.0 && gamma2 > 0.0)) {
    throw InvalidArgument("skew factors must be positive");
  }
  return std::make_shared<SkewScale>(s, x0, gamma1, gamma2);
}

double subspace_half_width(const ScaleFunction& s, double c) {
  const auto* k = s->singular();
  const double total = k ? k->total_mass() : 0.0;
  if (!(c >= 0.0 && c <= total)) {
    throw InvalidArgument("subspace mass " + format_double(c) +
                          " outside [0, " + format_double(total) + "]");
  }
  if (!k || c == 0.0) return 0.0;
  const double e = s->anchor();
  const auto [klo, khi] = k->hull();
  double hi = std::max(e - klo, khi - e);
  if (c >= total) return hi;
  auto window_mass = [&](double r) { return k->mass(e - r, e + r); };
  double lo = 0.0;
  for (int i = 0; i < 200 && lo < hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (window_mass(mid) >= c) hi = mid; else lo = mid;
  }
  return hi;
}

ScaleFunction subspace_scale(const ScaleFunction& s, double c) {
  const double xc = subspace_half_width(s, c);
  return std::make_shared<SubspaceScale>(s, c, xc);
}

ScaleFunction abs_cont_part(const ScaleFunction& s) {
  if (!s->singular()) return s;
  return subspace_scale(s, 0.0);
}

}  // namespace scalesim

#include "scalesim/speed.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "scalesim/format.hpp"
#include "scalesim/quadrature.hpp"

namespace scalesim {

SpeedMeasure SpeedMeasure::lebesgue(Interval domain) {
  SpeedMeasure m = with_density(domain, [](double) { return 1.0; }, true, "lebesgue");
  return m;
}

SpeedMeasure SpeedMeasure::with_density(Interval domain, Density h,
                                        bool positive_ae, std::string description,
                                        Breaks breaks) {
  SpeedMeasure m;
  m.domain_ = domain;
  m.h_ = std::move(h);
  m.positive_ae_ = positive_ae;
  m.description_ = std::move(description);
  m.breaks_ = std::move(breaks);
  return m;
}

SpeedMeasure SpeedMeasure::energy(const ScaleFunction& s) {
  ScaleFunction keep = s;
  SpeedMeasure m = with_density(
      s->domain(), [keep](double x) { return keep->inverse_derivative_at(x); },
      true, "energy",
      [keep](double a, double b) { return keep->breakpoints(a, b); });
  m.energy_of_ = s;
  return m;
}

SpeedMeasure SpeedMeasure::atomic(Interval domain, std::vector<SpeedAtom> atoms) {
  SpeedMeasure m;
  m.domain_ = domain;
  std::sort(atoms.begin(), atoms.end(),
            [](const SpeedAtom& a, const SpeedAtom& b) { return a.x < b.x; });
  for (const auto& a : atoms) {
    if (!(a.mass > 0.0)) throw InvalidArgument("speed atoms must have positive mass");
    if (!domain.contains(a.x)) throw DomainError("speed atom outside the domain");
  }
  m.atoms_ = std::move(atoms);
  m.description_ = "atomic";
  return m;
}

SpeedMeasure SpeedMeasure::skewed(double x0, double w_left, double w_right) const {
  if (!(w_left > 0.0 && w_right > 0.0)) {
    throw InvalidArgument("skew weights must be positive");
  }
  SpeedMeasure m = *this;
  m.energy_of_ = nullptr;
  if (h_) {
    Density h = h_;
    m.h_ = [h, x0, w_left, w_right](double x) {
      return (x < x0 ? w_left : w_right) * h(x);
    };
  }
  for (auto& a : m.atoms_) a.mass *= a.x < x0 ? w_left : w_right;
  Breaks inner = breaks_;
  m.breaks_ = [inner, x0](double a, double b) {
    std::vector<double> pts = inner ? inner(a, b) : std::vector<double>{};
    if (a < x0 && x0 < b) {
      pts.insert(std::upper_bound(pts.begin(), pts.end(), x0), x0);
    }
    return pts;
  };
  m.description_ = "skewed(" + description_ + ", x0=" + format_double(x0) +
                   ", left=" + format_double(w_left) +
                   ", right=" + format_double(w_right) + ")";
  return m;
}

std::vector<double> SpeedMeasure::breakpoints(double a, double b) const {
  if (!breaks_) return {};
  return breaks_(a, b);
}

double SpeedMeasure::integrate(const std::function<double(double)>& f, double a,
                               double b, double rel_tol, unsigned max_depth) const {
  if (!(a < b)) return 0.0;
  double total = 0.0;
  const ScaleModel* es = energy_of_.get();
  if (h_ && es && es->singular() && es->closed_form_inverse()) {
    // m~(dx) = t'(y)^2 dy in scale coordinates, piecewise smooth there.
    const double ya = es->value(a), yb = es->value(b);
    const auto pts = es->scale_breakpoints(ya, yb);
    auto g = [&](double y) {
      const double tp = es->inverse_derivative(y);
      return f(es->inverse(y)) * tp * tp;
    };
    total += integrate_pieces(g, ya, yb, pts, rel_tol, max_depth).value;
  } else if (h_) {
    const auto pts = breakpoints(a, b);
    const Density& h = h_;
    total += integrate_pieces([&](double x) { return f(x) * h(x); }, a, b, pts,
                              rel_tol, max_depth)
                 .value;
  }
  for (const auto& atom : atoms_) {
    if (atom.x > a && atom.x <= b) total += atom.mass * f(atom.x);
  }
  return total;
}

double SpeedMeasure::mass(double a, double b) const {
  return integrate([](double) { return 1.0; }, a, b);
}

Description SpeedMeasure::describe() const {
  Description d{{"speed", description_}};
  if (!atoms_.empty()) d.emplace_back("speed.atoms", std::to_string(atoms_.size()));
  return d;
}

// ---------------------------------------------------------------------------

Drift Drift::zero() { return {[](double) { return 0.0; }, "zero"}; }

Drift Drift::constant(double beta) {
  return {[beta](double) { return beta; }, "constant " + format_double(beta)};
}

Drift Drift::sine(double amplitude) {
  return {[amplitude](double x) { return amplitude * std::sin(x); },
          "sine " + format_double(amplitude)};
}

Drift Drift::linear(double theta) {
  return {[theta](double x) { return -theta * x; }, "linear " + format_double(theta)};
}

namespace {

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

class OreyScale final : public ScaleModel {
 public:
  OreyScale(Drift drift, double rel_tol, double half_width, double step)
      : drift_(std::move(drift)), tol_(rel_tol), step_(step) {
    if (!(rel_tol > 0.0)) throw InvalidArgument("quadrature tolerance must be > 0");
    if (!(half_width > 0.0 && step > 0.0)) {
      throw InvalidArgument("orey table needs positive extent and step");
    }
    n_ = static_cast<int>(std::ceil(half_width / step));
    const int count = 2 * n_ + 1;
    B_.assign(count, 0.0);
    s_.assign(count, 0.0);
    lo_valid_ = 0;
    hi_valid_ = count - 1;
    // Walk outward from the origin in both directions.
    for (int dir : {1, -1}) {
      for (int k = 1; k <= n_; ++k) {
        const int i = n_ + dir * k;
        const int prev = i - dir;
        const double a = node(prev), b = node(i);
        B_[i] = B_[prev] + drift_integral(a, b);
        const double inc = scale_increment(prev, a, b);
        s_[i] = s_[prev] + inc;
        if (!std::isfinite(B_[i]) || !std::isfinite(s_[i]) ||
            std::abs(s_[i]) > 1e300 || 2.0 * std::abs(B_[i]) > 700.0) {
          // B -> +inf only drives s to a finite limit; B -> -inf blows s up.
          const bool saturated = B_[i] > 0.0 && std::isfinite(s_[i]);
          if (dir > 0) hi_valid_ = prev, hi_saturated_ = saturated;
          else lo_valid_ = prev, lo_saturated_ = saturated;
          break;
        }
      }
    }
    lim_lo_ = limit(-1);
    lim_hi_ = limit(1);
  }

  std::string kind() const override { return "orey"; }
  Interval domain() const override { return Interval::real_line(); }
  double anchor() const override { return 0.0; }
  Interval range() const override { return Interval(lim_lo_, lim_hi_); }

  double value(double x) const override {
    if (x == kInf) return lim_hi_;
    if (x == -kInf) return lim_lo_;
    const int i = nearest(x);
    return s_[i] + scale_increment(i, node(i), x);
  }
  double density(double x) const override { return std::exp(-2.0 * B(x)); }
  double abs_cont_integral(double x0, double x1) const override {
    return value(x1) - value(x0);
  }
  double inverse_derivative_at(double x) const override {
    return std::exp(2.0 * B(x));
  }
  InverseClass inverse_class() const override {
    return InverseClass::AbsolutelyContinuous;
  }
  Description describe() const override {
    return {{"kind", "orey"},
            {"drift", drift_.description},
            {"table.step", format_double(step_)},
            {"table.half_width", format_double(n_ * step_)}};
  }

  double B(double x) const {
    const int i = nearest(x);
    return B_[i] + drift_integral(node(i), x);
  }

 private:
  double node(int i) const { return (i - n_) * step_; }

  int nearest(double x) const {
    const double r = std::round(x / step_);
    const double clamped = std::clamp(r, static_cast<double>(lo_valid_ - n_),
                                      static_cast<double>(hi_valid_ - n_));
    const int i = static_cast<int>(clamped) + n_;
    const double dist = std::abs(x - node(i));
    if (dist > step_ && ((i == hi_valid_ && hi_valid_ < 2 * n_) ||
                         (i == lo_valid_ && lo_valid_ > 0))) {
      throw QuadratureError("orey scale overflows beyond x = " +
                            format_double(node(i)));
    }
    return i;
  }

  double drift_integral(double a, double b) const {
    if (a == b) return 0.0;
    if (std::abs(b - a) <= step_) return GK15::integrate(drift_.b, a, b, 0);
    return integrate(drift_.b, a, b, tol_, 20).value;
  }

  /// int_a^x exp(-2 B(y)) dy with B anchored at node i.
  double scale_increment(int i, double a, double x) const {
    if (a == x) return 0.0;
    const double Bi = B_[i];
    auto g = [&](double y) { return std::exp(-2.0 * (Bi + drift_integral(a, y))); };
    if (std::abs(x - a) <= step_) {
      double err = 0.0;
      const double v = GK15::integrate(g, a, x, 8, tol_, &err);
      if (!std::isfinite(v)) throw QuadratureError("orey scale overflow");
      return v;
    }
    std::vector<double> pts;
    for (double p = std::ceil(std::min(a, x) / step_) * step_; p < std::max(a, x);
         p += step_) {
      pts.push_back(p);
    }
    return (x > a ? 1.0 : -1.0) *
           integrate_pieces(g, std::min(a, x), std::max(a, x), pts, tol_, 8).value;
  }

  double limit(int dir) const {
    const int end = dir > 0 ? hi_valid_ : lo_valid_;
    const bool overflowed = dir > 0 ? hi_valid_ < 2 * n_ : lo_valid_ > 0;
    if (overflowed) {
      return (dir > 0 ? hi_saturated_ : lo_saturated_) ? s_[end] : dir * kInf;
    }
    const int mid = n_ + (end - n_) / 2;
    const int quarter = n_ + (end - n_) / 4;
    const double i1 = std::abs(s_[mid] - s_[quarter]);
    const double i2 = std::abs(s_[end] - s_[mid]);
    if (i2 == 0.0) return s_[end];
    const double r = i2 / i1;
    if (r <= 0.3) return s_[end] + dir * i2 * r / (1.0 - r);
    return dir * kInf;
  }

  Drift drift_;
  double tol_;
  double step_;
  int n_ = 0;
  int lo_valid_ = 0;
  int hi_valid_ = 0;
  bool lo_saturated_ = false;
  bool hi_saturated_ = false;
  std::vector<double> B_;
  std::vector<double> s_;
  double lim_lo_ = -kInf;
  double lim_hi_ = kInf;
};

}  // namespace

OreyModel build_orey_scale(const Drift& drift, double rel_tol, double half_width,
                           double node_step) {
  auto model = std::make_shared<OreyScale>(drift, rel_tol, half_width, node_step);
  ScaleFunction s = model;
  SpeedMeasure m = SpeedMeasure::with_density(
      Interval::real_line(),
      [model](double x) { return std::exp(2.0 * model->B(x)); }, true,
      "orey " + drift.description);
  return {s, m};
}

}  // namespace scalesim

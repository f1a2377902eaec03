#include "scalesim/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "scalesim/format.hpp"
#include "scalesim/quadrature.hpp"
#include "scalesim/rng.hpp"

namespace scalesim {

DiffusionSpec make_spec(std::string name, ScaleFunction scale, SpeedMeasure speed,
                        double inverse_tol) {
  if (!(scale->domain() == speed.domain())) {
    throw InvalidArgument("speed measure and scale live on different intervals");
  }
  if (!speed.has_density() && speed.atoms().empty()) {
    throw InvalidArgument("speed measure is zero");
  }
  InverseScale inv = invert(scale, inverse_tol);
  return DiffusionSpec{std::move(name), std::move(scale), std::move(inv),
                       std::move(speed)};
}

// ---------------------------------------------------------------------------

SmoothSignedMeasure::SmoothSignedMeasure(ScaleFunction s, double factor,
                                         std::vector<SignedAtom> atoms)
    : s_(std::move(s)), factor_(factor), atoms_(std::move(atoms)) {
  atoms_.erase(std::remove_if(atoms_.begin(), atoms_.end(),
                              [](const SignedAtom& a) { return a.mass == 0.0; }),
               atoms_.end());
}

bool SmoothSignedMeasure::is_zero() const {
  if (!atoms_.empty()) return false;
  if (!s_ || factor_ == 0.0) return true;
  return s_->inverse_piecewise_linear();
}

double SmoothSignedMeasure::density(double x) const {
  if (!s_) return 0.0;
  return factor_ * s_->inverse_second_derivative_at(x) * s_->density(x);
}

double SmoothSignedMeasure::integrate(const std::function<double(double)>& f,
                                      double a, double b, Part part,
                                      double rel_tol, unsigned max_depth) const {
  if (!(a < b)) return 0.0;
  auto clip = [part](double v) {
    switch (part) {
      case Part::Positive: return std::max(v, 0.0);
      case Part::Negative: return std::max(-v, 0.0);
      case Part::Signed: break;
    }
    return v;
  };
  double total = 0.0;
  for (const auto& atom : atoms_) {
    if (atom.x > a && atom.x <= b) total += f(atom.x) * clip(atom.mass);
  }
  if (!s_ || factor_ == 0.0) return total;
  const ScaleModel& s = *s_;
  if (s.singular() && s.closed_form_inverse()) {
    // mu(A) = factor * int_{s(A)} t''(y) dy.
    const double ya = s.value(a), yb = s.value(b);
    const auto pts = s.scale_breakpoints(ya, yb);
    auto g = [&](double y) {
      return f(s.inverse(y)) * clip(factor_ * s.inverse_second_derivative(y));
    };
    total += integrate_pieces(g, ya, yb, pts, rel_tol, max_depth).value;
  } else {
    const auto pts = s.breakpoints(a, b);
    auto g = [&](double x) { return f(x) * clip(density(x)); };
    total += integrate_pieces(g, a, b, pts, rel_tol, max_depth).value;
  }
  return total;
}

// ---------------------------------------------------------------------------

namespace {

bool t_prime_is_bv(const ScaleModel& s) {
  return s.inverse_class() != InverseClass::NotBoundedVariation;
}

bool t_prime_is_ac(const ScaleModel& s) {
  const auto c = s.inverse_class();
  return (c == InverseClass::Lipschitz || c == InverseClass::AbsolutelyContinuous) &&
         s.inverse_jumps().empty();
}

bool speed_positive_density(const SpeedMeasure& m) {
  return m.has_density() && m.density_positive_ae();
}

HypothesisEntry check_h1(const DiffusionSpec& spec, std::uint64_t seed) {
  const ScaleModel& s = *spec.scale;
  const Interval w = probe_window(s);
  Rng rng(seed, 0x41);
  for (int i = 0; i < 1000; ++i) {
    const double x = w.lo + w.length() * rng.uniform_open();
    const double g = s.density(x);
    if (!(g > 0.0)) {
      return {Verdict::Fails, "g vanishes at Lebesgue-random x = " + format_double(x)};
    }
  }
  double l2 = 0.0;
  try {
    l2 = SpeedMeasure::energy(spec.scale).mass(w.lo, w.hi);
  } catch (const Error& e) {
    return {Verdict::Undecidable, std::string("quadrature of (t')^2 failed: ") + e.what()};
  }
  if (!std::isfinite(l2)) {
    return {Verdict::Fails, "int (t')^2 dy diverges on s([" + format_double(w.lo) +
                                ", " + format_double(w.hi) + "])"};
  }
  return {Verdict::Holds, "t absolutely continuous; int (t')^2 dy over s([" +
                              format_double(w.lo) + ", " + format_double(w.hi) +
                              "]) = " + format_double(l2)};
}

}  // namespace

SpeedMeasure m_tilde(const DiffusionSpec& spec) {
  const auto h1 = check_h1(spec, 1);
  if (!h1.holds()) throw HypothesisFailure("H1", h1.witness);
  return SpeedMeasure::energy(spec.scale);
}

Coefficient sigma(const DiffusionSpec& spec) {
  if (!speed_positive_density(spec.speed)) {
    if (!spec.speed.has_density()) {
      throw HypothesisFailure("H3", "m has no density, so m~ is not << m");
    }
  }
  ScaleFunction s = spec.scale;
  SpeedMeasure m = spec.speed;
  return [s, m](double x) {
    return std::sqrt(s->inverse_derivative_at(x) / m.density(x));
  };
}

SmoothSignedMeasure smooth_measure_N(const DiffusionSpec& spec) {
  const ScaleModel& s = *spec.scale;
  if (!t_prime_is_bv(s)) {
    throw NotBoundedVariation("t' is not locally of bounded variation");
  }
  std::vector<SignedAtom> atoms;
  for (const auto& j : s.inverse_jumps()) atoms.push_back({j.state, 0.5 * j.jump});
  return SmoothSignedMeasure(spec.scale, 0.5, std::move(atoms));
}

DriftResult drift_b(const DiffusionSpec& spec) {
  DriftResult out;
  out.measure = smooth_measure_N(spec);
  if (!spec.speed.has_density()) {
    throw NotAbsolutelyContinuous("d t_*(t') is not << m: m has no density");
  }
  bool atoms_charged = true;
  for (const auto& a : out.measure.atoms()) {
    const auto& ma = spec.speed.atoms();
    atoms_charged = atoms_charged &&
                    std::any_of(ma.begin(), ma.end(),
                                [&](const SpeedAtom& m) { return m.x == a.x; });
  }
  if (!out.measure.atoms().empty() && !atoms_charged) {
    out.is_function = false;
    return out;
  }
  ScaleFunction s = spec.scale;
  SpeedMeasure m = spec.speed;
  out.is_function = out.measure.atoms().empty();
  if (out.is_function) {
    out.b = [s, m](double x) {
      return 0.5 * s->inverse_second_derivative_at(x) * s->density(x) / m.density(x);
    };
  }
  return out;
}

bool check_h4prime_equivalence(const DiffusionSpec& spec) {
  if (!t_prime_is_bv(*spec.scale)) return false;
  // m~ has an a.e.-positive density, so mu_N << m~ exactly when mu_N has no
  // atoms (its remaining part is a Lebesgue density).
  return smooth_measure_N(spec).atoms().empty();
}

bool speed_matches_energy(const DiffusionSpec& spec, std::uint64_t seed,
                          int probes) {
  const auto& m = spec.speed;
  if (!m.has_density() || !m.atoms().empty()) return false;
  const ScaleModel& s = *spec.scale;
  const Interval w = probe_window(s);
  Rng rng(seed, 0x3e);
  for (int i = 0; i < probes; ++i) {
    const double x = w.lo + w.length() * rng.uniform_open();
    const double a = m.density(x);
    const double b = s.inverse_derivative_at(x);
    if (!(std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)))) return false;
  }
  return true;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Undecidable: return "undecidable-at-depth";
  }
  return "unknown";
}

Description HypothesisReport::records() const {
  Description d;
  auto add = [&d](const std::string& key, const HypothesisEntry& e) {
    d.emplace_back(key, to_string(e.verdict));
    d.emplace_back(key + ".witness", e.witness);
  };
  add("h1", h1);
  add("h2", h2);
  add("h3", h3);
  add("h3prime", h3prime);
  add("h4", h4);
  add("h4.measure_abs_cont", h4_measure);
  add("h4prime", h4prime);
  d.emplace_back("m_equals_m_tilde", m_equals_m_tilde ? "true" : "false");
  return d;
}

HypothesisReport validate_hypotheses(const DiffusionSpec& spec, std::uint64_t seed) {
  HypothesisReport r;
  const ScaleModel& s = *spec.scale;
  const SpeedMeasure& m = spec.speed;

  try {
    r.h1 = check_h1(spec, seed);
  } catch (const std::exception& e) {
    r.h1 = {Verdict::Undecidable, e.what()};
  }

  const auto* kappa = s.singular();
  const double kmass = kappa ? kappa->total_mass() : 0.0;
  if (kmass <= 0.0) {
    r.h2 = {Verdict::Fails, "kappa mass = 0"};
  } else if (kmass <= kappa->cdf_tolerance()) {
    r.h2 = {Verdict::Undecidable, "kappa mass = " + format_double(kmass) +
                                      " below the depth resolution"};
  } else {
    r.h2 = {Verdict::Holds, "kappa mass = " + format_double(kmass)};
  }

  if (speed_positive_density(m) && m.atoms().empty()) {
    r.h3prime = {Verdict::Holds, "m = h dx with h > 0 a.e."};
  } else if (!m.atoms().empty()) {
    r.h3prime = {Verdict::Fails, "m has " + std::to_string(m.atoms().size()) + " atoms"};
  } else {
    r.h3prime = {Verdict::Fails, "m has no a.e.-positive density"};
  }

  if (r.h3prime.holds()) {
    r.h3 = {Verdict::Holds, "implied by H3'"};
  } else if (speed_positive_density(m)) {
    r.h3 = {Verdict::Holds, "m has an a.e.-positive density part"};
  } else {
    r.h3 = {Verdict::Fails, "m~ has a density but m has no a.e.-positive density"};
  }

  const auto cls = s.inverse_class();
  if (cls == InverseClass::NotBoundedVariation) {
    r.h4 = {Verdict::Fails, "t' not of bounded variation"};
    r.h4_measure = {Verdict::Fails, "d t_*(t') undefined"};
  } else {
    r.h4 = {Verdict::Holds, std::string("t' locally of bounded variation (") +
                                to_string(cls) + ")"};
    const auto jumps = s.inverse_jumps();
    if (!jumps.empty() && m.atoms().empty()) {
      r.h4_measure = {Verdict::Fails, "d t_*(t') has an atom at x = " +
                                          format_double(jumps.front().state) +
                                          " where m has none"};
    } else if (speed_positive_density(m)) {
      r.h4_measure = {Verdict::Holds, "density part << m"};
    } else {
      r.h4_measure = {Verdict::Fails, "m has no a.e.-positive density"};
    }
  }

  if (t_prime_is_ac(s)) {
    r.h4prime = {Verdict::Holds, std::string("t' is ") + to_string(cls)};
  } else {
    r.h4prime = {Verdict::Fails, std::string("t' is ") + to_string(cls)};
  }

  // Implications that every report must respect.
  if (r.h4prime.holds() && !r.h1.holds()) {
    r.h4prime = {Verdict::Fails, "H4' requires H1, which does not hold"};
  }
  if (r.h3prime.holds() && !r.h3.holds()) {
    r.h3 = {Verdict::Holds, "implied by H3'"};
  }
  if (r.h4prime.holds() && r.h3prime.holds() && !r.h4.holds()) {
    r.h4 = {Verdict::Holds, "implied by H3' and H4'"};
  }

  r.m_equals_m_tilde = speed_matches_energy(spec, seed);
  return r;
}

const char* to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::Approachable: return "approachable-in-finite-time";
    case BoundaryKind::Unapproachable: return "unapproachable";
    case BoundaryKind::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

BoundaryReport classify_boundary(const DiffusionSpec& spec, bool upper) {
  const ScaleModel& s = *spec.scale;
  const Interval d = spec.interval();
  BoundaryReport out;
  out.endpoint = upper ? d.hi : d.lo;
  const Interval J = s.range();
  const double send = upper ? J.hi : J.lo;
  if (std::isinf(send)) {
    out.kind = BoundaryKind::Unapproachable;
    out.witness = std::string("s(") + (upper ? "hi" : "lo") + ") is infinite";
    return out;
  }

  std::vector<double> cuts;
  if (std::isinf(out.endpoint)) {
    const double e = s.anchor();
    for (double off : {1.0, 10.0, 100.0, 1000.0}) cuts.push_back(upper ? e + off : e - off);
  } else {
    for (int k = 1; k <= 5; ++k) {
      const double dist = d.length() * std::pow(10.0, -k);
      cuts.push_back(upper ? out.endpoint - dist : out.endpoint + dist);
    }
  }
  // Fubini form int m((x0, u]) ds(u): same convergence as the Feller
  // integral, without the cancellation in s(end) - s(x).
  std::vector<double> inc;
  double m_before = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    try {
      const double a = std::min(cuts[i], cuts[i + 1]);
      const double b = std::max(cuts[i], cuts[i + 1]);
      const double start = cuts[i];
      auto M = [&](double u) {
        const double between = upper ? spec.speed.integrate([](double) { return 1.0; },
                                                            start, u, 1e-6, 6)
                                     : spec.speed.integrate([](double) { return 1.0; },
                                                            u, start, 1e-6, 6);
        return m_before + between;
      };
      auto integrand = [&](double u) { return M(u) * s.density(u); };
      const double v = integrate_pieces(integrand, a, b, s.breakpoints(a, b), 1e-6, 8).value;
      inc.push_back(v);
      m_before += upper ? spec.speed.mass(start, cuts[i + 1])
                        : spec.speed.mass(cuts[i + 1], start);
      if (!std::isfinite(v)) break;
    } catch (const Error&) {
      break;
    }
  }
  if (inc.size() < 2) {
    out.kind = BoundaryKind::Inconclusive;
    out.witness = "test integral could not be evaluated on enough truncations";
    return out;
  }
  const double last = inc.back();
  const double prev = inc[inc.size() - 2];
  const double ratio = last / prev;
  out.witness = "test-integral increment ratio = " + format_double(ratio);
  if (!std::isfinite(last) || ratio >= 0.7) {
    out.kind = BoundaryKind::Unapproachable;
  } else if (ratio <= 0.3) {
    out.kind = BoundaryKind::Approachable;
  } else {
    out.kind = BoundaryKind::Inconclusive;
  }
  return out;
}

}  // namespace scalesim

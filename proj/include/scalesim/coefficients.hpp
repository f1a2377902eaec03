#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scalesim/scale.hpp"
#include "scalesim/speed.hpp"

namespace scalesim {

struct DiffusionSpec {
  std::string name;
  ScaleFunction scale;
  InverseScale inverse;
  SpeedMeasure speed;

  Interval interval() const { return scale->domain(); }
};

/// Checks that the speed lives on the scale's domain and is fully supported.
DiffusionSpec make_spec(std::string name, ScaleFunction scale, SpeedMeasure speed,
                        double inverse_tol = 1e-12);

using Coefficient = std::function<double(double)>;

struct SignedAtom {
  double x;
  double mass;
};

/// Signed measure mu = rho(x) dx + atoms, with rho = factor * (t'' o s) * g.
/// Integrals are evaluated in scale coordinates when the scale has a singular
/// part (the integrand is then piecewise smooth there).
class SmoothSignedMeasure {
 public:
  enum class Part { Signed, Positive, Negative };

  SmoothSignedMeasure() = default;
  SmoothSignedMeasure(ScaleFunction s, double factor, std::vector<SignedAtom> atoms);

  bool is_zero() const;
  bool has_density() const { return static_cast<bool>(s_); }
  const std::vector<SignedAtom>& atoms() const { return atoms_; }
  double density(double x) const;

  /// Integral of f over (a, b].
  double integrate(const std::function<double(double)>& f, double a, double b,
                   Part part = Part::Signed, double rel_tol = 1e-10,
                   unsigned max_depth = 15) const;
  double mass(double a, double b, Part part = Part::Signed) const {
    return integrate([](double) { return 1.0; }, a, b, part);
  }

 private:
  ScaleFunction s_;
  double factor_ = 0.0;
  std::vector<SignedAtom> atoms_;
};

/// m~(dx) = t' o s(x) dx. Throws HypothesisFailure("H1") when H1 fails.
SpeedMeasure m_tilde(const DiffusionSpec& spec);

/// sigma = (t' o s / h)^(1/2). Throws HypothesisFailure("H3") without H3.
Coefficient sigma(const DiffusionSpec& spec);

/// mu_N = 1/2 d t_*(t'). Throws NotBoundedVariation.
SmoothSignedMeasure smooth_measure_N(const DiffusionSpec& spec);

struct DriftResult {
  bool is_function = false;
  Coefficient b;                 // set when is_function
  SmoothSignedMeasure measure;   // always set
};

/// b = 1/2 d t_*(t') / dm. Returns a function when t' is absolutely
/// continuous, otherwise the measure (flagged). Throws NotBoundedVariation or
/// NotAbsolutelyContinuous (mu_N not << m).
DriftResult drift_b(const DiffusionSpec& spec);

/// mu_N << m~, decided structurally.
bool check_h4prime_equivalence(const DiffusionSpec& spec);

/// m = m~ on seeded Lebesgue-random probes (relative 1e-9), no atoms.
bool speed_matches_energy(const DiffusionSpec& spec, std::uint64_t seed = 1,
                          int probes = 1000);

enum class Verdict { Holds, Fails, Undecidable };
const char* to_string(Verdict v);

struct HypothesisEntry {
  Verdict verdict = Verdict::Undecidable;
  std::string witness;
  bool holds() const { return verdict == Verdict::Holds; }
};

struct HypothesisReport {
  HypothesisEntry h1, h2, h3, h4, h3prime, h4prime;
  /// The second half of H4: d t_*(t') << m.
  HypothesisEntry h4_measure;
  bool m_equals_m_tilde = false;

  /// Flat key/value records in a fixed order.
  Description records() const;
};

HypothesisReport validate_hypotheses(const DiffusionSpec& spec,
                                     std::uint64_t seed = 1);

enum class BoundaryKind { Approachable, Unapproachable, Inconclusive };
const char* to_string(BoundaryKind k);

struct BoundaryReport {
  BoundaryKind kind = BoundaryKind::Inconclusive;
  double endpoint = 0.0;
  std::string witness;
};

/// Feller test integral int |s(end) - s(x)| m(dx) near the endpoint, with
/// truncations at |x - e| = 10, 100, 1000 (infinite endpoints) or distances
/// 10^-k of the domain length (finite endpoints).
BoundaryReport classify_boundary(const DiffusionSpec& spec, bool upper);

}  // namespace scalesim

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "scalesim/interval.hpp"
#include "scalesim/scale.hpp"

namespace scalesim {

struct SpeedAtom {
  double x;
  double mass;
};

/// Speed measure m = h dx + sum of atoms. Immutable.
class SpeedMeasure {
 public:
  using Density = std::function<double(double)>;
  using Breaks = std::function<std::vector<double>(double, double)>;

  static SpeedMeasure lebesgue(Interval domain = Interval::real_line());
  /// positive_ae: h > 0 Lebesgue-a.e. (declared by the constructor's caller).
  static SpeedMeasure with_density(Interval domain, Density h, bool positive_ae,
                                   std::string description, Breaks breaks = {});
  /// m~(dx) = t' o s(x) dx.
  static SpeedMeasure energy(const ScaleFunction& s);
  static SpeedMeasure atomic(Interval domain, std::vector<SpeedAtom> atoms);

  /// w_left * m on (-inf, x0), w_right * m on [x0, inf).
  SpeedMeasure skewed(double x0, double w_left, double w_right) const;

  Interval domain() const { return domain_; }
  bool has_density() const { return static_cast<bool>(h_); }
  double density(double x) const { return h_ ? h_(x) : 0.0; }
  bool density_positive_ae() const { return positive_ae_; }
  const std::vector<SpeedAtom>& atoms() const { return atoms_; }
  /// True when this measure was built as the energy measure of a scale.
  bool is_energy_measure() const { return energy_of_ != nullptr; }
  const ScaleModel* energy_of() const { return energy_of_.get(); }

  std::vector<double> breakpoints(double a, double b) const;
  /// Integral of f over (a, b] against m (atoms at b included, at a excluded).
  double integrate(const std::function<double(double)>& f, double a, double b,
                   double rel_tol = 1e-10, unsigned max_depth = 15) const;
  double mass(double a, double b) const;

  Description describe() const;

 private:
  Interval domain_;
  Density h_;
  bool positive_ae_ = false;
  std::vector<SpeedAtom> atoms_;
  Breaks breaks_;
  std::string description_;
  ScaleFunction energy_of_;
};

/// Drift coefficient b for the Orey construction.
struct Drift {
  std::function<double(double)> b;
  std::string description;

  static Drift zero();
  static Drift constant(double beta);
  /// amplitude * sin(x)
  static Drift sine(double amplitude);
  /// -theta * x
  static Drift linear(double theta);
};

struct OreyModel {
  ScaleFunction scale;
  SpeedMeasure speed;
};

/// s(x) = int_0^x exp(-2 int_0^y b) dy, m(dx) = exp(2 int_0^x b) dx.
/// Tabulated on a node grid over [-half_width, half_width]; throws
/// QuadratureError when evaluation reaches a region where s overflows.
OreyModel build_orey_scale(const Drift& drift, double rel_tol = 1e-12,
                           double half_width = 1024.0, double node_step = 0.25);

}  // namespace scalesim

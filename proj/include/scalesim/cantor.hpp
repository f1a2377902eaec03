#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "scalesim/interval.hpp"

namespace scalesim {

/// Per-generation removal rule for a symmetric generalized Cantor set.
///
/// Generation n removes the open middle interval of length l_n from each of
/// the 2^(n-1) intervals that survived generation n-1.
class RemovalRule {
 public:
  enum class Kind { Geometric, Fraction };

  /// l_n = scale * ratio^n.
  static RemovalRule geometric(double scale, double ratio);
  /// l_n = fraction * (length of each surviving interval of generation n-1).
  static RemovalRule fraction(double fraction);

  Kind kind() const { return kind_; }
  double scale() const { return a_; }
  double ratio() const { return b_; }

  /// Removed fraction of a generation-(n-1) interval, given 2^(n-1) * L_(n-1)
  /// (the total surviving length after generation n-1).
  double relative_removal(int n, double surviving_total) const;

  std::string describe() const;

 private:
  RemovalRule(Kind k, double a, double b) : kind_(k), a_(a), b_(b) {}
  Kind kind_;
  double a_;
  double b_;
};

struct GeneralizedCantorSpec {
  Interval base{0.0, 1.0};
  RemovalRule removal = RemovalRule::geometric(1.0, 0.25);
  int depth = 12;
};

/// Where a construction coordinate sits in the depth-truncated tree: either
/// inside a removed gap of generation <= depth, or inside one of the 2^depth
/// surviving cells. Accumulators hold the contributions of everything to the
/// left of `left`.
struct CantorLocation {
  bool in_gap = false;
  int generation = 0;
  double left = 0.0;
  double right = 0.0;
  double psi_integral_before = 0.0;
  double split_before = 0.0;
  double non_k_before = 0.0;
};

/// Geometry of a generalized Cantor construction truncated at a finite depth.
///
/// The distance function psi(u) = d(u, K) is exact inside every gap of
/// generation <= depth. Inside a depth-level cell psi is replaced by its cell
/// mean, so its integral over each cell is exact (deeper gaps summed in closed
/// form). The splitting measure gives each child half of its parent's mass;
/// its CDF is exact at all gap endpoints and linear inside cells.
class CantorTree {
 public:
  explicit CantorTree(GeneralizedCantorSpec spec);

  const GeneralizedCantorSpec& spec() const { return spec_; }
  int depth() const { return spec_.depth; }
  double lo() const { return spec_.base.lo; }
  double hi() const { return spec_.base.hi; }
  double length() const { return spec_.base.length(); }

  /// Lebesgue measure of the limiting set K.
  double k_measure() const { return k_measure_; }
  /// Surviving interval length after generation n (n = 0..depth).
  double cell_length(int n) const { return cell_len_[n]; }
  /// Removed gap length at generation n (n = 1..depth).
  double gap_length(int n) const { return gap_len_[n]; }
  /// Integral of psi over one generation-n cell.
  double cell_psi_integral(int n) const { return cell_psi_[n]; }
  /// Lebesgue measure of a generation-n cell minus its share of K.
  double cell_non_k(int n) const { return cell_non_k_[n]; }
  double total_psi_integral() const { return cell_psi_[0]; }

  CantorLocation locate(double u) const;

  double psi(double u) const;
  double psi_derivative(double u) const;
  double psi_integral(double u) const;
  double split_cdf(double u) const;
  double non_k_length(double u) const;

  /// u with psi_integral(u) = v, v in [0, total_psi_integral()].
  double invert_psi_integral(double v) const;
  /// u with (u - lo) + mass * split_cdf(u) = v.
  double invert_identity_plus_split(double v, double mass) const;

  /// Sorted gap endpoints (and midpoints when requested) up to generation
  /// max_generation (capped at depth).
  std::vector<double> gap_points(int max_generation, bool midpoints) const;

 private:
  GeneralizedCantorSpec spec_;
  std::vector<double> cell_len_;
  std::vector<double> gap_len_;
  std::vector<double> cell_psi_;
  std::vector<double> cell_non_k_;
  std::vector<double> half_pow_;
  double k_measure_ = 0.0;
};

/// Atomless measure carried by a Cantor construction, in state coordinates.
///
/// The CDF is the construction's splitting CDF pulled back through a monotone
/// state -> construction coordinate map, optionally restricted to a window and
/// reweighted piecewise (for skew transforms).
class SingularMeasure {
 public:
  using CoordinateMap = std::function<double(double)>;

  SingularMeasure(std::shared_ptr<const CantorTree> tree, double mass,
                  CoordinateMap to_construction, Interval hull);

  /// kappa((-inf, x]).
  double cdf(double x) const;
  double mass(double x0, double x1) const { return cdf(x1) - cdf(x0); }
  /// kappa((e, x]) for x >= e, -kappa((x, e]) otherwise.
  double signed_mass(double e, double x) const { return cdf(x) - cdf(e); }
  double total_mass() const;
  /// Tolerance of CDF evaluations inside depth-level cells.
  double cdf_tolerance() const;

  /// Closed interval [first, second] outside of which the measure has no mass.
  std::pair<double, double> hull() const;
  const CantorTree& tree() const { return *tree_; }
  std::shared_ptr<const CantorTree> tree_ptr() const { return tree_; }

  SingularMeasure restricted(double lo, double hi) const;
  /// Multiply by w_left on (-inf, split) and w_right on [split, inf).
  SingularMeasure reweighted(double split, double w_left,
                             double w_right) const;

 private:
  double raw_cdf(double x) const;
  double windowed_cdf(double x) const;
  double weight_at(double x) const;

  std::shared_ptr<const CantorTree> tree_;
  double base_mass_;
  CoordinateMap map_;
  Interval hull_;
  double window_lo_;
  double window_hi_;
  // Piecewise-constant weight: weights_[0] left of breaks_[0], weights_[i]
  // on [breaks_[i-1], breaks_[i]).
  std::vector<double> breaks_;
  std::vector<double> weights_{1.0};
};

}  // namespace scalesim

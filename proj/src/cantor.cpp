#include "scalesim/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scalesim {

RemovalRule RemovalRule::geometric(double scale, double ratio) {
  if (!(scale > 0.0) || !(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidArgument("geometric removal needs scale > 0, 0 < ratio < 1");
  }
  return {Kind::Geometric, scale, ratio};
}

RemovalRule RemovalRule::fraction(double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("removal fraction must lie in (0, 1)");
  }
  return {Kind::Fraction, fraction, 0.0};
}

double RemovalRule::relative_removal(int n, double surviving_total) const {
  if (kind_ == Kind::Fraction) return a_;
  // 2^(n-1) * l_n = (scale / 2) * (2 ratio)^n
  const double removed_total = 0.5 * a_ * std::pow(2.0 * b_, n);
  return removed_total / surviving_total;
}

std::string RemovalRule::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (kind_ == Kind::Geometric) {
    out << "geometric " << a_ << ' ' << b_;
  } else {
    out << "fraction " << a_;
  }
  return out.str();
}

CantorTree::CantorTree(GeneralizedCantorSpec spec) : spec_(std::move(spec)) {
  const int depth = spec_.depth;
  if (depth < 1) throw InvalidArgument("cantor depth must be >= 1");
  if (depth > 60) throw InvalidArgument("cantor depth must be <= 60");
  if (!spec_.base.bounded()) {
    throw InvalidArgument("cantor base interval must be bounded");
  }

  // Lengths well past the truncation depth feed the closed-form cell integrals.
  const int tail = depth + 80;
  std::vector<double> len(tail + 1), gap(tail + 1, 0.0);
  len[0] = spec_.base.length();
  double surviving = len[0];
  int last = tail;
  for (int n = 1; n <= tail; ++n) {
    const double r = spec_.removal.relative_removal(n, surviving);
    if (!(r > 0.0 && r < 1.0)) {
      if (n <= depth || r >= 1.0) {
        throw InvalidArgument("cantor removals overlap at generation " +
                              std::to_string(n));
      }
      last = n - 1;
      break;
    }
    gap[n] = r * len[n - 1];
    len[n] = 0.5 * (1.0 - r) * len[n - 1];
    surviving *= 1.0 - r;
  }

  // lambda(K) = |base| * prod (1 - r_n), continued until it stops changing.
  double product = surviving;
  for (int n = last + 1; n < 5000 && product > 1e-300; ++n) {
    const double r = spec_.removal.relative_removal(n, product);
    if (r >= 1.0) {
      throw InvalidArgument("cantor removals overlap at generation " +
                            std::to_string(n));
    }
    if (r < 1e-18) break;
    product *= 1.0 - r;
  }
  k_measure_ = product > 1e-300 ? product : 0.0;

  cell_len_.assign(len.begin(), len.begin() + depth + 1);
  gap_len_.assign(gap.begin(), gap.begin() + depth + 1);

  cell_psi_.assign(depth + 1, 0.0);
  double tail_sum = 0.0;
  double weight = 1.0;
  for (int k = depth + 1; k <= last; ++k) {
    tail_sum += weight * gap[k] * gap[k] / 4.0;
    weight *= 2.0;
  }
  cell_psi_[depth] = tail_sum;
  for (int n = depth - 1; n >= 0; --n) {
    cell_psi_[n] = gap_len_[n + 1] * gap_len_[n + 1] / 4.0 + 2.0 * cell_psi_[n + 1];
  }

  half_pow_.assign(depth + 1, 1.0);
  for (int n = 1; n <= depth; ++n) half_pow_[n] = 0.5 * half_pow_[n - 1];

  cell_non_k_.assign(depth + 1, 0.0);
  for (int n = 0; n <= depth; ++n) {
    cell_non_k_[n] = std::max(0.0, cell_len_[n] - k_measure_ * half_pow_[n]);
  }
}

CantorLocation CantorTree::locate(double u) const {
  u = std::clamp(u, lo(), hi());
  CantorLocation loc;
  double left = lo();
  for (int n = 1; n <= depth(); ++n) {
    const double gap_lo = left + cell_len_[n];
    const double gap_hi = gap_lo + gap_len_[n];
    if (u < gap_lo) continue;
    loc.psi_integral_before += cell_psi_[n];
    loc.split_before += half_pow_[n];
    loc.non_k_before += cell_non_k_[n];
    if (u <= gap_hi) {
      loc.in_gap = true;
      loc.generation = n;
      loc.left = gap_lo;
      loc.right = gap_hi;
      return loc;
    }
    loc.psi_integral_before += gap_len_[n] * gap_len_[n] / 4.0;
    loc.non_k_before += gap_len_[n];
    left = gap_hi;
  }
  loc.generation = depth();
  loc.left = left;
  loc.right = left + cell_len_[depth()];
  return loc;
}

double CantorTree::psi(double u) const {
  const auto loc = locate(u);
  if (loc.in_gap) return std::max(0.0, std::min(u - loc.left, loc.right - u));
  return cell_psi_[depth()] / cell_len_[depth()];
}

double CantorTree::psi_derivative(double u) const {
  const auto loc = locate(u);
  if (!loc.in_gap) return 0.0;
  return u < 0.5 * (loc.left + loc.right) ? 1.0 : -1.0;
}

double CantorTree::psi_integral(double u) const {
  u = std::clamp(u, lo(), hi());
  const auto loc = locate(u);
  if (loc.in_gap) {
    const double half = 0.5 * (loc.right - loc.left);
    const double d = u - loc.left;
    if (d <= half) return loc.psi_integral_before + 0.5 * d * d;
    const double r = loc.right - u;
    return loc.psi_integral_before + half * half - 0.5 * r * r;
  }
  const double frac = (u - loc.left) / cell_len_[depth()];
  return loc.psi_integral_before + cell_psi_[depth()] * frac;
}

double CantorTree::split_cdf(double u) const {
  if (u <= lo()) return 0.0;
  if (u >= hi()) return 1.0;
  const auto loc = locate(u);
  if (loc.in_gap) return loc.split_before;
  const double frac = (u - loc.left) / cell_len_[depth()];
  return loc.split_before + half_pow_[depth()] * frac;
}

double CantorTree::non_k_length(double u) const {
  u = std::clamp(u, lo(), hi());
  const auto loc = locate(u);
  if (loc.in_gap) return loc.non_k_before + (u - loc.left);
  const double frac = (u - loc.left) / cell_len_[depth()];
  return loc.non_k_before + cell_non_k_[depth()] * frac;
}

double CantorTree::invert_psi_integral(double v) const {
  if (v <= 0.0) return lo();
  if (v >= total_psi_integral()) return hi();
  double left = lo();
  double acc = 0.0;
  for (int n = 1; n <= depth(); ++n) {
    const double rest = v - acc;
    if (rest < cell_psi_[n]) continue;
    const double g = gap_len_[n];
    const double gap_lo = left + cell_len_[n];
    const double gap_hi = gap_lo + g;
    const double w = rest - cell_psi_[n];
    const double gap_area = g * g / 4.0;
    if (w <= gap_area) {
      const double half_area = 0.5 * gap_area;
      if (w <= half_area) return std::min(gap_lo + std::sqrt(2.0 * w), gap_hi);
      return std::max(gap_hi - std::sqrt(2.0 * (gap_area - w)), gap_lo);
    }
    acc += cell_psi_[n] + gap_area;
    left = gap_hi;
  }
  const double p = cell_psi_[depth()];
  const double len = cell_len_[depth()];
  if (p <= 0.0) return left;
  return left + std::clamp((v - acc) / p, 0.0, 1.0) * len;
}

double CantorTree::invert_identity_plus_split(double v, double mass) const {
  if (v <= 0.0) return lo();
  if (v >= length() + mass) return hi();
  double left = lo();
  double acc = 0.0;
  for (int n = 1; n <= depth(); ++n) {
    const double child = cell_len_[n] + mass * half_pow_[n];
    const double rest = v - acc;
    if (rest < child) continue;
    const double gap_lo = left + cell_len_[n];
    if (rest <= child + gap_len_[n]) return gap_lo + (rest - child);
    acc += child + gap_len_[n];
    left = gap_lo + gap_len_[n];
  }
  const double cell = cell_len_[depth()] + mass * half_pow_[depth()];
  return left + std::clamp((v - acc) / cell, 0.0, 1.0) * cell_len_[depth()];
}

std::vector<double> CantorTree::gap_points(int max_generation,
                                           bool midpoints) const {
  max_generation = std::min(max_generation, depth());
  std::vector<double> out;
  std::vector<std::pair<double, int>> stack{{lo(), 1}};
  while (!stack.empty()) {
    const auto [left, n] = stack.back();
    stack.pop_back();
    if (n > max_generation) continue;
    const double gap_lo = left + cell_len_[n];
    const double gap_hi = gap_lo + gap_len_[n];
    out.push_back(gap_lo);
    out.push_back(gap_hi);
    if (midpoints) out.push_back(0.5 * (gap_lo + gap_hi));
    stack.emplace_back(left, n + 1);
    stack.emplace_back(gap_hi, n + 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SingularMeasure::SingularMeasure(std::shared_ptr<const CantorTree> tree,
                                 double mass, CoordinateMap to_construction,
                                 Interval hull)
    : tree_(std::move(tree)),
      base_mass_(mass),
      map_(std::move(to_construction)),
      hull_(hull),
      window_lo_(hull.lo),
      window_hi_(hull.hi) {
  if (!tree_) throw InvalidArgument("singular measure needs a construction");
  if (!(mass >= 0.0)) throw InvalidArgument("singular mass must be >= 0");
}

double SingularMeasure::raw_cdf(double x) const {
  if (x <= hull_.lo) return 0.0;
  if (x >= hull_.hi) return base_mass_;
  return base_mass_ * tree_->split_cdf(map_(x));
}

double SingularMeasure::windowed_cdf(double x) const {
  if (window_lo_ >= window_hi_) return 0.0;
  return raw_cdf(std::clamp(x, window_lo_, window_hi_)) - raw_cdf(window_lo_);
}

double SingularMeasure::weight_at(double x) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  return weights_[static_cast<std::size_t>(it - breaks_.begin())];
}

double SingularMeasure::cdf(double x) const {
  double total = 0.0;
  double piece_lo = -kInf;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(x > piece_lo)) break;
    const double piece_hi = i < breaks_.size() ? breaks_[i] : kInf;
    total += weights_[i] *
             (windowed_cdf(std::min(x, piece_hi)) - windowed_cdf(piece_lo));
    piece_lo = piece_hi;
  }
  return total;
}

double SingularMeasure::total_mass() const { return cdf(kInf); }

double SingularMeasure::cdf_tolerance() const {
  double w = 0.0;
  for (double v : weights_) w = std::max(w, std::abs(v));
  return w * base_mass_ * std::ldexp(1.0, -tree_->depth());
}

std::pair<double, double> SingularMeasure::hull() const {
  return {window_lo_, window_hi_};
}

SingularMeasure SingularMeasure::restricted(double lo, double hi) const {
  SingularMeasure out = *this;
  out.window_lo_ = std::max(window_lo_, lo);
  out.window_hi_ = std::min(window_hi_, hi);
  if (out.window_hi_ < out.window_lo_) out.window_hi_ = out.window_lo_;
  return out;
}

SingularMeasure SingularMeasure::reweighted(double split, double w_left,
                                            double w_right) const {
  if (!(w_left >= 0.0 && w_right >= 0.0)) {
    throw InvalidArgument("reweighting factors must be nonnegative");
  }
  std::vector<double> cuts = breaks_;
  if (!std::binary_search(cuts.begin(), cuts.end(), split)) {
    cuts.insert(std::upper_bound(cuts.begin(), cuts.end(), split), split);
  }
  std::vector<double> weights;
  weights.reserve(cuts.size() + 1);
  double piece_lo = -kInf;
  for (std::size_t i = 0; i <= cuts.size(); ++i) {
    const double piece_hi = i < cuts.size() ? cuts[i] : kInf;
    // Representative point of the piece [piece_lo, piece_hi).
    const double probe = std::isfinite(piece_lo) ? piece_lo
                         : std::isfinite(piece_hi) ? piece_hi - 1.0
                                                   : 0.0;
    const double extra = probe < split ? w_left : w_right;
    weights.push_back(weight_at(probe) * extra);
    piece_lo = piece_hi;
  }
  SingularMeasure out = *this;
  out.breaks_ = std::move(cuts);
  out.weights_ = std::move(weights);
  return out;
}

}  // namespace scalesim

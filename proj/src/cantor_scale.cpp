#include <algorithm>
#include <cmath>

#include "scalesim/format.hpp"
#include "scalesim/scale.hpp"

namespace scalesim {

namespace {

std::vector<double> in_range(const std::vector<double>& sorted, double lo,
                             double hi) {
  auto a = std::upper_bound(sorted.begin(), sorted.end(), lo);
  auto b = std::lower_bound(a, sorted.end(), hi);
  return {a, b};
}

/// Construction coordinate z (z = 0 at the left end of the base) of the state
/// point x, i.e. s(x) for the fat Cantor scale.
double cantor_z(const CantorTree& tree, double x) {
  const double p0 = tree.total_psi_integral();
  if (x < 0.0) return -std::sqrt(-2.0 * x);
  if (x <= p0) return tree.invert_psi_integral(x) - tree.lo();
  return tree.length() + std::sqrt(2.0 * (x - p0));
}

class FatCantorScale final : public ScaleModel {
 public:
  explicit FatCantorScale(std::shared_ptr<const CantorTree> tree)
      : tree_(std::move(tree)),
        len_(tree_->length()),
        p0_(tree_->total_psi_integral()) {
    auto tr = tree_;
    kappa_.emplace(tree_, tree_->k_measure(),
                   [tr](double x) { return cantor_z(*tr, x) + tr->lo(); },
                   Interval(0.0, p0_));
    const int deep = std::min(tree_->depth(), 12);
    for (double u : tree_->gap_points(deep, true)) {
      scale_breaks_.push_back(u - tree_->lo());
    }
    for (double u : tree_->gap_points(std::min(deep, 8), true)) {
      state_breaks_.push_back(t(u - tree_->lo()));
    }
    state_breaks_.push_back(0.0);
    state_breaks_.push_back(p0_);
    std::sort(state_breaks_.begin(), state_breaks_.end());
    state_breaks_.erase(std::unique(state_breaks_.begin(), state_breaks_.end()),
                        state_breaks_.end());
  }

  std::string kind() const override { return "fat-cantor"; }
  Interval domain() const override { return Interval::real_line(); }
  double anchor() const override { return 0.0; }
  double value(double x) const override { return cantor_z(*tree_, x); }
  Interval range() const override { return Interval::real_line(); }

  double density(double x) const override {
    const double z = value(x);
    if (z < 0.0 || z > len_) return 1.0 / psi(z);
    const auto loc = tree_->locate(z + tree_->lo());
    if (loc.in_gap) return 1.0 / psi(z);
    const int d = tree_->depth();
    const double mean = tree_->cell_psi_integral(d) / tree_->cell_length(d);
    return tree_->cell_non_k(d) / (tree_->cell_length(d) * mean);
  }
  std::optional<double> density_derivative(double x) const override {
    const double z = value(x);
    if (z >= 0.0 && z <= len_ && !tree_->locate(z + tree_->lo()).in_gap) {
      return 0.0;
    }
    const double p = psi(z);
    return -psi_derivative(z) / (p * p * p);
  }
  const SingularMeasure* singular() const override { return &*kappa_; }
  double abs_cont_integral(double x0, double x1) const override {
    return non_k(value(x1)) - non_k(value(x0));
  }

  bool closed_form_inverse() const override { return true; }
  double inverse(double y) const override { return t(y); }
  double inverse_derivative_at(double x) const override { return psi(value(x)); }
  double inverse_second_derivative_at(double x) const override {
    return psi_derivative(value(x));
  }
  double inverse_derivative(double y) const override { return psi(y); }
  double inverse_second_derivative(double y) const override {
    return psi_derivative(y);
  }
  InverseClass inverse_class() const override { return InverseClass::Lipschitz; }

  std::vector<double> breakpoints(double lo, double hi) const override {
    return in_range(state_breaks_, lo, hi);
  }
  std::vector<double> scale_breakpoints(double lo, double hi) const override {
    auto out = in_range(scale_breaks_, lo, hi);
    if (lo < 0.0 && 0.0 < hi) out.insert(out.begin(), 0.0);
    if (lo < len_ && len_ < hi) out.push_back(len_);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  Description describe() const override {
    const auto& spec = tree_->spec();
    return {{"kind", "fat-cantor"},
            {"base", format_double(spec.base.lo) + " " + format_double(spec.base.hi)},
            {"removal", spec.removal.describe()},
            {"depth", std::to_string(spec.depth)},
            {"anchor", "0"}};
  }

 private:
  double t(double z) const {
    if (z < 0.0) return -0.5 * z * z;
    if (z <= len_) return tree_->psi_integral(z + tree_->lo());
    const double r = z - len_;
    return p0_ + 0.5 * r * r;
  }
  double psi(double z) const {
    if (z < 0.0) return -z;
    if (z > len_) return z - len_;
    return tree_->psi(z + tree_->lo());
  }
  double psi_derivative(double z) const {
    if (z < 0.0) return -1.0;
    if (z > len_) return 1.0;
    return tree_->psi_derivative(z + tree_->lo());
  }
  double non_k(double z) const {
    if (z < 0.0) return z;
    if (z <= len_) return tree_->non_k_length(z + tree_->lo());
    return tree_->non_k_length(tree_->hi()) + (z - len_);
  }

  std::shared_ptr<const CantorTree> tree_;
  double len_;
  double p0_;
  std::optional<SingularMeasure> kappa_;
  std::vector<double> scale_breaks_;
  std::vector<double> state_breaks_;
};

class StaircaseScale final : public ScaleModel {
 public:
  explicit StaircaseScale(std::shared_ptr<const CantorTree> tree)
      : tree_(std::move(tree)) {
    kappa_.emplace(tree_, 1.0, [](double x) { return x; }, Interval(0.0, 1.0));
    const int gen = std::min(tree_->depth(), 8);
    state_breaks_ = tree_->gap_points(gen, false);
    for (double x : state_breaks_) scale_breaks_.push_back(value(x));
  }

  std::string kind() const override { return "staircase"; }
  Interval domain() const override { return Interval::real_line(); }
  double anchor() const override { return 0.0; }
  double value(double x) const override {
    if (x <= 0.0) return x;
    if (x >= 1.0) return x + 1.0;
    return x + tree_->split_cdf(x);
  }
  Interval range() const override { return Interval::real_line(); }
  double density(double) const override { return 1.0; }
  std::optional<double> density_derivative(double) const override { return 0.0; }
  const SingularMeasure* singular() const override { return &*kappa_; }
  double abs_cont_integral(double x0, double x1) const override { return x1 - x0; }

  bool closed_form_inverse() const override { return true; }
  double inverse(double y) const override {
    if (y <= 0.0) return y;
    if (y >= 2.0) return y - 1.0;
    return tree_->invert_identity_plus_split(y, 1.0);
  }
  double inverse_derivative_at(double) const override { return 1.0; }
  double inverse_second_derivative_at(double) const override { return 0.0; }
  double inverse_derivative(double y) const override {
    const double x = inverse(y);
    if (x <= 0.0 || x >= 1.0 || tree_->locate(x).in_gap) return 1.0;
    const int d = tree_->depth();
    const double cell = tree_->cell_length(d);
    return cell / (cell + std::ldexp(1.0, -d));
  }
  double inverse_second_derivative(double) const override { return 0.0; }
  InverseClass inverse_class() const override {
    return InverseClass::NotBoundedVariation;
  }
  std::vector<double> breakpoints(double lo, double hi) const override {
    return in_range(state_breaks_, lo, hi);
  }
  std::vector<double> scale_breakpoints(double lo, double hi) const override {
    return in_range(scale_breaks_, lo, hi);
  }
  Description describe() const override {
    return {{"kind", "staircase"},
            {"depth", std::to_string(tree_->depth())},
            {"anchor", "0"}};
  }

 private:
  std::shared_ptr<const CantorTree> tree_;
  std::optional<SingularMeasure> kappa_;
  std::vector<double> state_breaks_;
  std::vector<double> scale_breaks_;
};

}  // namespace

CantorScale build_cantor_scale(const GeneralizedCantorSpec& spec) {
  auto tree = std::make_shared<const CantorTree>(spec);
  ScaleFunction s = std::make_shared<FatCantorScale>(tree);
  return {s, invert(s)};
}

CantorScale build_devils_staircase_scale(int depth) {
  if (depth < 1) throw InvalidArgument("staircase depth must be >= 1");
  GeneralizedCantorSpec spec;
  spec.base = Interval(0.0, 1.0);
  spec.removal = RemovalRule::fraction(1.0 / 3.0);
  spec.depth = depth;
  auto tree = std::make_shared<const CantorTree>(spec);
  ScaleFunction s = std::make_shared<StaircaseScale>(tree);
  return {s, invert(s)};
}

}  // namespace scalesim

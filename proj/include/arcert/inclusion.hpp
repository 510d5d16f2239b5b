#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arcert/interval.hpp"
#include "arcert/polynomial.hpp"

namespace arcert {

/// Value (or range) of the family parameter. A degenerate interval is the
/// usual sampled case; a wide one yields hulls valid for the whole range.
struct Params {
  Interval lambda{0.0};

  static Params at(double value) { return Params{Interval(value)}; }
  static Params over(double lo, double hi) { return Params{Interval(lo, hi)}; }
};

/// Closed half-space normal . x + offset <= 0.
struct AffineGuard {
  std::vector<double> normal;
  double offset = 0.0;

  Interval value(const IntervalVector& box) const;
  bool holds_at(const std::vector<double>& x) const;

  friend bool operator==(const AffineGuard&, const AffineGuard&) = default;
};

/// One single-valued (or interval-constant) branch of the inclusion, active on
/// the closed polyhedron cut out by its guards.
struct RegionPiece {
  std::string name;
  std::vector<AffineGuard> guards;
  std::vector<Polynomial> rhs;

  /// Some point of the box may satisfy all guards (per-guard test, so this can
  /// over-report near polyhedron corners, which only widens hulls).
  bool touches(const IntervalVector& box) const;
  /// Every point of the box satisfies all guards.
  bool contains(const IntervalVector& box) const;
  bool holds_at(const std::vector<double>& x) const;
  /// Shrinks the box using the axis-aligned guards; may return an empty box.
  IntervalVector clip(const IntervalVector& box) const;

  friend bool operator==(const RegionPiece&, const RegionPiece&) = default;
};

/// Prescribed set value on a (typically measure-zero) region, e.g. F(0)=[0,1].
struct Override {
  IntervalVector region;
  IntervalVector value;

  friend bool operator==(const Override&, const Override&) = default;
};

/// Piecewise-polynomial set-valued field on a compact box. Upper
/// semicontinuity is assumed, not checked: closures of neighboring pieces
/// overlap on shared facets, so hulls taken across a switching surface
/// contain every branch that meets it.
class PiecewiseInclusion {
 public:
  PiecewiseInclusion(IntervalVector domain, std::vector<RegionPiece> pieces,
                     std::vector<Override> overrides = {},
                     Interval lambda_range = Interval(-1.0, 1.0));

  std::size_t dim() const { return domain_.dim(); }
  const IntervalVector& domain() const { return domain_; }
  const std::vector<RegionPiece>& pieces() const { return pieces_; }
  const std::vector<Override>& overrides() const { return overrides_; }
  const Interval& lambda_range() const { return lambda_range_; }

  /// Interval hull of F(x, lambda) over box & domain. Throws EmptyIntersection
  /// when the box misses the domain, UncoveredRegion when nothing applies.
  IntervalVector evaluate_hull(const IntervalVector& box, const Params& params) const;

  /// Every branch value active at a point: one entry per piece whose guard
  /// holds and per override whose region contains x.
  std::vector<IntervalVector> values_at(const std::vector<double>& x, double lambda) const;

  /// Certifies that every point of the domain is covered by a piece or an
  /// override, by bisection down to `min_relative_width` of the domain.
  void validate_coverage(double min_relative_width = 1.0 / 1024.0) const;

  /// Index of the only piece meeting box & domain when no override meets it
  /// either, so that F is that piece's right-hand side throughout.
  std::optional<std::size_t> sole_piece(const IntervalVector& box) const;
  /// Whether a piece is a smooth field plus a state-independent interval
  /// term: every monomial that involves the state has a point coefficient.
  bool has_point_state_coefficients(std::size_t piece) const { return point_state_coefficients_[piece]; }
  IntervalVector evaluate_piece(std::size_t piece, const IntervalVector& box, const Params& params) const;
  /// Interval Jacobian of a piece over a box, row-major n x n.
  std::vector<Interval> jacobian_hull(std::size_t piece, const IntervalVector& box, const Params& params) const;

  friend bool operator==(const PiecewiseInclusion&, const PiecewiseInclusion&) = default;

 private:
  IntervalVector domain_;
  std::vector<RegionPiece> pieces_;
  std::vector<Override> overrides_;
  Interval lambda_range_;
  std::vector<std::vector<Polynomial>> jacobians_;
  std::vector<bool> point_state_coefficients_;
};

inline IntervalVector evaluate_hull(const PiecewiseInclusion& inclusion, const IntervalVector& box,
                                    const Params& params) {
  return inclusion.evaluate_hull(box, params);
}

}  // namespace arcert

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <vector>

#include "arcert/error.hpp"

namespace arcert {

namespace rounding {

// Directed rounding without touching the FPU mode: the exact error of each
// operation is recovered (TwoSum / FMA) and the result is nudged one ulp only
// when the rounded value is on the wrong side of the true one.

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// One ulp toward +inf / -inf for finite x (cheaper than std::nextafter).
inline double next_up(double x) {
  if (x == 0.0) return std::numeric_limits<double>::denorm_min();
  const auto bits = std::bit_cast<std::uint64_t>(x);
  return std::bit_cast<double>(x > 0 ? bits + 1 : bits - 1);
}

inline double next_down(double x) { return -next_up(-x); }

inline double add_down(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) {
    if (std::isfinite(a) && std::isfinite(b)) return s > 0 ? std::numeric_limits<double>::max() : s;
    return s;
  }
  const double bp = s - a;
  const double ap = s - bp;
  const double e = (a - ap) + (b - bp);
  return e < 0 ? next_down(s) : s;
}

inline double add_up(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) {
    if (std::isfinite(a) && std::isfinite(b)) return s < 0 ? std::numeric_limits<double>::lowest() : s;
    return s;
  }
  const double bp = s - a;
  const double ap = s - bp;
  const double e = (a - ap) + (b - bp);
  return e > 0 ? next_up(s) : s;
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

// Below this magnitude the FMA residual may itself be rounded, so we widen
// unconditionally.
inline constexpr double kTinyProduct = 1e-290;

inline double mul_down(double a, double b) {
  const double p = a * b;
  if (!std::isfinite(p)) {
    if (std::isfinite(a) && std::isfinite(b)) return p > 0 ? std::numeric_limits<double>::max() : p;
    return p;
  }
  if (std::fabs(p) < kTinyProduct) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return next_down(p);
  }
  const double e = std::fma(a, b, -p);
  return e < 0 ? next_down(p) : p;
}

inline double mul_up(double a, double b) {
  const double p = a * b;
  if (!std::isfinite(p)) {
    if (std::isfinite(a) && std::isfinite(b)) return p < 0 ? std::numeric_limits<double>::lowest() : p;
    return p;
  }
  if (std::fabs(p) < kTinyProduct) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return next_up(p);
  }
  const double e = std::fma(a, b, -p);
  return e > 0 ? next_up(p) : p;
}

}  // namespace rounding

/// Closed real interval [lo, hi] with outward-rounded arithmetic. The empty
/// interval is a separate state, never encoded as lo > hi.
class Interval {
 public:
  constexpr Interval() = default;
  constexpr Interval(double v) : lo_(v), hi_(v) {}  // NOLINT: implicit by intent
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "interval with lo > hi");
  }

  static constexpr Interval empty() {
    Interval r;
    r.empty_ = true;
    return r;
  }

  constexpr bool is_empty() const { return empty_; }
  constexpr double lo() const { return lo_; }
  constexpr double hi() const { return hi_; }
  double width() const { return empty_ ? 0.0 : rounding::sub_up(hi_, lo_); }
  double mid() const { return lo_ + 0.5 * (hi_ - lo_); }
  double rad() const { return 0.5 * width(); }
  double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }
  bool is_point() const { return !empty_ && lo_ == hi_; }

  bool contains(double x) const { return !empty_ && lo_ <= x && x <= hi_; }
  /// Subset test; the empty interval is a subset of everything.
  bool contains(const Interval& o) const {
    if (o.empty_) return true;
    return !empty_ && lo_ <= o.lo_ && o.hi_ <= hi_;
  }
  bool intersects(const Interval& o) const {
    return !empty_ && !o.empty_ && lo_ <= o.hi_ && o.lo_ <= hi_;
  }

  friend bool operator==(const Interval& a, const Interval& b) {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

  friend Interval hull(const Interval& a, const Interval& b) {
    if (a.empty_) return b;
    if (b.empty_) return a;
    return raw(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
  }
  friend Interval intersect(const Interval& a, const Interval& b) {
    if (!a.intersects(b)) return empty();
    return raw(std::max(a.lo_, b.lo_), std::min(a.hi_, b.hi_));
  }

  friend Interval operator-(const Interval& a) {
    if (a.empty_) return a;
    return raw(-a.hi_, -a.lo_);
  }
  friend Interval operator+(const Interval& a, const Interval& b) {
    if (a.empty_ || b.empty_) return empty();
    return raw(rounding::add_down(a.lo_, b.lo_), rounding::add_up(a.hi_, b.hi_));
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    if (a.empty_ || b.empty_) return empty();
    return raw(rounding::sub_down(a.lo_, b.hi_), rounding::sub_up(a.hi_, b.lo_));
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    if (a.empty_ || b.empty_) return empty();
    if (a.is_point() && b.is_point()) {
      return raw(rounding::mul_down(a.lo_, b.lo_), rounding::mul_up(a.lo_, b.lo_));
    }
    using rounding::mul_down;
    using rounding::mul_up;
    const double lo = std::min({mul_down(a.lo_, b.lo_), mul_down(a.lo_, b.hi_),
                                mul_down(a.hi_, b.lo_), mul_down(a.hi_, b.hi_)});
    const double hi = std::max({mul_up(a.lo_, b.lo_), mul_up(a.lo_, b.hi_),
                                mul_up(a.hi_, b.lo_), mul_up(a.hi_, b.hi_)});
    return raw(lo, hi);
  }
  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }

  /// Tight integer power: even powers of a zero-straddling interval start at 0.
  Interval pow(unsigned n) const;

  /// Symmetric widening: mid +- (factor * rad + abs).
  Interval inflate(double factor, double abs) const;

 private:
  static constexpr Interval raw(double lo, double hi) {
    Interval r;
    r.lo_ = lo;
    r.hi_ = hi;
    return r;
  }

  double lo_ = 0.0;
  double hi_ = 0.0;
  bool empty_ = false;
};

std::ostream& operator<<(std::ostream& os, const Interval& x);

/// Axis-aligned box in R^n. Empty as soon as any component is empty.
class IntervalVector {
 public:
  IntervalVector() = default;
  explicit IntervalVector(std::size_t n, Interval fill = Interval(0.0)) : c_(n, fill) {}
  IntervalVector(std::initializer_list<Interval> xs) : c_(xs) {}
  explicit IntervalVector(std::vector<Interval> xs) : c_(std::move(xs)) {}

  static IntervalVector point(const std::vector<double>& x);
  static IntervalVector from_bounds(const std::vector<double>& lo, const std::vector<double>& hi);

  std::size_t dim() const { return c_.size(); }
  const Interval& operator[](std::size_t i) const { return c_[i]; }
  Interval& operator[](std::size_t i) { return c_[i]; }
  auto begin() const { return c_.begin(); }
  auto end() const { return c_.end(); }

  bool is_empty() const {
    return std::any_of(c_.begin(), c_.end(), [](const Interval& x) { return x.is_empty(); });
  }
  bool contains(const IntervalVector& o) const;
  bool contains_point(const std::vector<double>& x) const;
  bool intersects(const IntervalVector& o) const;
  double max_width() const;
  std::vector<double> midpoint() const;

  friend bool operator==(const IntervalVector& a, const IntervalVector& b) { return a.c_ == b.c_; }
  friend IntervalVector hull(const IntervalVector& a, const IntervalVector& b);
  friend IntervalVector intersect(const IntervalVector& a, const IntervalVector& b);

 private:
  std::vector<Interval> c_;
};

std::ostream& operator<<(std::ostream& os, const IntervalVector& x);

}  // namespace arcert

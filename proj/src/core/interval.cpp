#include "arcert/interval.hpp"

#include <ostream>

namespace arcert {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::UncoveredRegion: return "UncoveredRegion";
    case ErrorCode::NoEnclosure: return "NoEnclosure";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NoAttractor: return "NoAttractor";
    case ErrorCode::DecompositionInconsistent: return "DecompositionInconsistent";
    case ErrorCode::AnchorFailure: return "AnchorFailure";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

// |x|^n rounded in the requested direction, x >= 0.
double abs_pow(double x, unsigned n, bool up) {
  double r = 1.0;
  for (unsigned i = 0; i < n; ++i) r = up ? rounding::mul_up(r, x) : rounding::mul_down(r, x);
  return r;
}

}  // namespace

Interval Interval::pow(unsigned n) const {
  if (empty_) return *this;
  if (n == 0) return Interval(1.0);
  if (n == 1) return *this;
  if (n % 2 == 0) {
    const double a = std::fabs(lo_);
    const double b = std::fabs(hi_);
    if (lo_ <= 0.0 && hi_ >= 0.0) return raw(0.0, abs_pow(std::max(a, b), n, true));
    const double small = std::min(a, b);
    const double large = std::max(a, b);
    return raw(abs_pow(small, n, false), abs_pow(large, n, true));
  }
  // Odd powers are monotone.
  auto signed_pow = [n](double x, bool up) {
    if (x >= 0.0) return abs_pow(x, n, up);
    return -abs_pow(-x, n, !up);
  };
  return raw(signed_pow(lo_, false), signed_pow(hi_, true));
}

Interval Interval::inflate(double factor, double abs) const {
  if (empty_) return *this;
  const double m = mid();
  const double r = rounding::add_up(rounding::mul_up(rad(), factor), abs);
  return raw(std::min(lo_, rounding::sub_down(m, r)), std::max(hi_, rounding::add_up(m, r)));
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  if (x.is_empty()) return os << "[empty]";
  return os << '[' << x.lo() << ", " << x.hi() << ']';
}

IntervalVector IntervalVector::point(const std::vector<double>& x) {
  std::vector<Interval> c;
  c.reserve(x.size());
  for (double v : x) c.emplace_back(v);
  return IntervalVector(std::move(c));
}

IntervalVector IntervalVector::from_bounds(const std::vector<double>& lo,
                                           const std::vector<double>& hi) {
  if (lo.size() != hi.size()) throw Error(ErrorCode::InvalidArgument, "bound dimension mismatch");
  std::vector<Interval> c;
  c.reserve(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) c.emplace_back(lo[i], hi[i]);
  return IntervalVector(std::move(c));
}

bool IntervalVector::contains(const IntervalVector& o) const {
  if (o.is_empty()) return true;
  if (is_empty() || dim() != o.dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!c_[i].contains(o.c_[i])) return false;
  }
  return true;
}

bool IntervalVector::contains_point(const std::vector<double>& x) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!c_[i].contains(x[i])) return false;
  }
  return true;
}

bool IntervalVector::intersects(const IntervalVector& o) const {
  if (dim() != o.dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!c_[i].intersects(o.c_[i])) return false;
  }
  return true;
}

double IntervalVector::max_width() const {
  double w = 0.0;
  for (const auto& x : c_) w = std::max(w, x.width());
  return w;
}

std::vector<double> IntervalVector::midpoint() const {
  std::vector<double> m;
  m.reserve(dim());
  for (const auto& x : c_) m.push_back(x.mid());
  return m;
}

IntervalVector hull(const IntervalVector& a, const IntervalVector& b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  if (a.dim() != b.dim()) throw Error(ErrorCode::InvalidArgument, "hull of boxes with different dimension");
  IntervalVector r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = hull(a[i], b[i]);
  return r;
}

IntervalVector intersect(const IntervalVector& a, const IntervalVector& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::InvalidArgument, "intersection of boxes with different dimension");
  IntervalVector r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = intersect(a[i], b[i]);
  return r;
}

std::ostream& operator<<(std::ostream& os, const IntervalVector& x) {
  os << '(';
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (i) os << " x ";
    os << x[i];
  }
  return os << ')';
}

}  // namespace arcert

#include "arcert/inclusion.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace arcert {

Interval AffineGuard::value(const IntervalVector& box) const {
  Interval v(offset);
  for (std::size_t i = 0; i < normal.size(); ++i) {
    if (normal[i] != 0.0) v += Interval(normal[i]) * box[i];
  }
  return v;
}

bool AffineGuard::holds_at(const std::vector<double>& x) const {
  return value(IntervalVector::point(x)).lo() <= 0.0;
}

bool RegionPiece::touches(const IntervalVector& box) const {
  for (const auto& g : guards) {
    if (g.value(box).lo() > 0.0) return false;
  }
  return true;
}

bool RegionPiece::contains(const IntervalVector& box) const {
  for (const auto& g : guards) {
    if (g.value(box).hi() > 0.0) return false;
  }
  return true;
}

bool RegionPiece::holds_at(const std::vector<double>& x) const {
  for (const auto& g : guards) {
    if (!g.holds_at(x)) return false;
  }
  return true;
}

IntervalVector RegionPiece::clip(const IntervalVector& box) const {
  IntervalVector out = box;
  for (const auto& g : guards) {
    std::size_t axis = g.normal.size();
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < g.normal.size(); ++i) {
      if (g.normal[i] != 0.0) {
        axis = i;
        ++nonzero;
      }
    }
    if (nonzero != 1) continue;
    // a * x + c <= 0  =>  x <= -c/a (a > 0) or x >= -c/a (a < 0), bound rounded outward.
    const double a = g.normal[axis];
    const double q = -g.offset / a;
    Interval& xi = out[axis];
    if (xi.is_empty()) return out;
    if (a > 0) {
      const double bound = std::nextafter(q, rounding::kInf);
      if (bound < xi.lo()) {
        xi = Interval::empty();
      } else if (bound < xi.hi()) {
        xi = Interval(xi.lo(), bound);
      }
    } else {
      const double bound = std::nextafter(q, -rounding::kInf);
      if (bound > xi.hi()) {
        xi = Interval::empty();
      } else if (bound > xi.lo()) {
        xi = Interval(bound, xi.hi());
      }
    }
  }
  return out;
}

PiecewiseInclusion::PiecewiseInclusion(IntervalVector domain, std::vector<RegionPiece> pieces,
                                       std::vector<Override> overrides, Interval lambda_range)
    : domain_(std::move(domain)),
      pieces_(std::move(pieces)),
      overrides_(std::move(overrides)),
      lambda_range_(lambda_range) {
  const std::size_t n = domain_.dim();
  if (n == 0 || n > Polynomial::kMaxStateDim || domain_.is_empty()) {
    throw Error(ErrorCode::ValidationError, "domain must be a non-empty box of dimension 1.." +
                                                std::to_string(Polynomial::kMaxStateDim));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(domain_[i].width() > 0.0)) throw Error(ErrorCode::ValidationError, "domain box has zero width");
  }
  if (pieces_.empty() && overrides_.empty()) {
    throw Error(ErrorCode::ValidationError, "inclusion needs at least one piece");
  }
  for (const auto& p : pieces_) {
    if (p.rhs.size() != n) {
      throw Error(ErrorCode::ValidationError, "piece '" + p.name + "' has " + std::to_string(p.rhs.size()) +
                                                  " right-hand sides, expected " + std::to_string(n));
    }
    for (const auto& g : p.guards) {
      if (g.normal.size() != n) throw Error(ErrorCode::ValidationError, "guard dimension mismatch in '" + p.name + "'");
    }
  }
  for (const auto& o : overrides_) {
    if (o.region.dim() != n || o.value.dim() != n) {
      throw Error(ErrorCode::ValidationError, "override dimension mismatch");
    }
    if (o.region.is_empty() || o.value.is_empty()) {
      throw Error(ErrorCode::ValidationError, "override region and value must be non-empty");
    }
  }
  for (const auto& p : pieces_) {
    std::vector<Polynomial> jac;
    bool point = true;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) jac.push_back(p.rhs[i].derivative(j));
      for (const auto& [e, c] : p.rhs[i].terms()) {
        const bool state_free = std::all_of(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n),
                                            [](std::uint8_t k) { return k == 0; });
        if (!state_free && !c.is_point()) point = false;
      }
    }
    jacobians_.push_back(std::move(jac));
    point_state_coefficients_.push_back(point);
  }
}

std::optional<std::size_t> PiecewiseInclusion::sole_piece(const IntervalVector& box) const {
  const IntervalVector b = intersect(box, domain_);
  if (b.is_empty()) return std::nullopt;
  for (const auto& o : overrides_) {
    if (o.region.intersects(b)) return std::nullopt;
  }
  std::optional<std::size_t> found;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (!pieces_[k].touches(b)) continue;
    if (found) return std::nullopt;
    found = k;
  }
  return found;
}

IntervalVector PiecewiseInclusion::evaluate_piece(std::size_t piece, const IntervalVector& box,
                                                  const Params& params) const {
  IntervalVector r(dim());
  for (std::size_t i = 0; i < dim(); ++i) r[i] = pieces_.at(piece).rhs[i].evaluate(box, params.lambda);
  return r;
}

std::vector<Interval> PiecewiseInclusion::jacobian_hull(std::size_t piece, const IntervalVector& box,
                                                        const Params& params) const {
  const auto& jac = jacobians_.at(piece);
  std::vector<Interval> r(jac.size());
  for (std::size_t k = 0; k < jac.size(); ++k) r[k] = jac[k].evaluate(box, params.lambda);
  return r;
}

IntervalVector PiecewiseInclusion::evaluate_hull(const IntervalVector& box, const Params& params) const {
  if (box.dim() != dim()) throw Error(ErrorCode::InvalidArgument, "box dimension does not match inclusion");
  const IntervalVector b = intersect(box, domain_);
  if (b.is_empty()) throw Error(ErrorCode::EmptyIntersection, "box does not meet the domain");

  IntervalVector result(dim(), Interval::empty());
  bool any = false;
  for (const auto& piece : pieces_) {
    if (!piece.touches(b)) continue;
    const IntervalVector cb = piece.clip(b);
    if (cb.is_empty()) continue;
    for (std::size_t i = 0; i < dim(); ++i) {
      result[i] = hull(result[i], piece.rhs[i].evaluate(cb, params.lambda));
    }
    any = true;
  }
  for (const auto& o : overrides_) {
    if (!o.region.intersects(b)) continue;
    for (std::size_t i = 0; i < dim(); ++i) result[i] = hull(result[i], o.value[i]);
    any = true;
  }
  if (!any) throw Error(ErrorCode::UncoveredRegion, "no piece or override covers the box");
  return result;
}

std::vector<IntervalVector> PiecewiseInclusion::values_at(const std::vector<double>& x, double lambda) const {
  std::vector<IntervalVector> out;
  const IntervalVector px = IntervalVector::point(x);
  for (const auto& piece : pieces_) {
    if (!piece.holds_at(x)) continue;
    IntervalVector v(dim());
    for (std::size_t i = 0; i < dim(); ++i) v[i] = piece.rhs[i].evaluate(px, Interval(lambda));
    out.push_back(std::move(v));
  }
  for (const auto& o : overrides_) {
    if (o.region.contains_point(x)) out.push_back(o.value);
  }
  return out;
}

void PiecewiseInclusion::validate_coverage(double min_relative_width) const {
  const std::size_t n = dim();
  std::vector<double> min_width(n);
  for (std::size_t i = 0; i < n; ++i) min_width[i] = domain_[i].width() * min_relative_width;

  std::function<void(const IntervalVector&)> visit = [&](const IntervalVector& box) {
    bool touched = false;
    for (const auto& p : pieces_) {
      if (p.contains(box)) return;
      touched = touched || p.touches(box);
    }
    for (const auto& o : overrides_) {
      if (o.region.contains(box)) return;
      touched = touched || o.region.intersects(box);
    }
    auto uncovered = [&]() {
      std::ostringstream msg;
      msg << "no piece covers " << box;
      throw Error(ErrorCode::UncoveredRegion, msg.str());
    };
    if (!touched) uncovered();

    std::size_t axis = n;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double rel = box[i].width() / min_width[i];
      if (rel > 1.0 && rel > best) {
        best = rel;
        axis = i;
      }
    }
    if (axis == n) {
      // Finest level: only boundary slivers remain; require the center to be covered.
      const auto c = box.midpoint();
      for (const auto& p : pieces_) {
        if (p.holds_at(c)) return;
      }
      for (const auto& o : overrides_) {
        if (o.region.contains_point(c)) return;
      }
      uncovered();
    }
    const double m = box[axis].mid();
    IntervalVector left = box;
    IntervalVector right = box;
    left[axis] = Interval(box[axis].lo(), m);
    right[axis] = Interval(m, box[axis].hi());
    visit(left);
    visit(right);
  };
  visit(domain_);
}

}  // namespace arcert

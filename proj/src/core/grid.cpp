#include "arcert/grid.hpp"

#include <cmath>

namespace arcert {

Grid::Grid(IntervalVector domain, std::vector<std::uint64_t> subdivisions)
    : domain_(std::move(domain)), subdivisions_(std::move(subdivisions)) {
  if (domain_.dim() == 0 || domain_.is_empty()) throw Error(ErrorCode::ValidationError, "grid domain must be a non-empty box");
  if (subdivisions_.size() != domain_.dim()) {
    throw Error(ErrorCode::ValidationError, "grid needs one subdivision count per axis");
  }
  count_ = 1;
  strides_.resize(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (subdivisions_[i] == 0) throw Error(ErrorCode::ValidationError, "subdivision counts must be positive");
    if (!(domain_[i].width() > 0.0)) throw Error(ErrorCode::ValidationError, "grid domain has zero width");
    strides_[i] = count_;
    if (count_ > (std::uint64_t{1} << 40) / subdivisions_[i]) throw Error(ErrorCode::ValidationError, "grid too large");
    count_ *= subdivisions_[i];
  }
}

double Grid::cell_width(std::size_t axis) const {
  return (domain_[axis].hi() - domain_[axis].lo()) / static_cast<double>(subdivisions_[axis]);
}

double Grid::min_cell_width() const {
  double w = cell_width(0);
  for (std::size_t i = 1; i < dim(); ++i) w = std::min(w, cell_width(i));
  return w;
}

double Grid::line(std::size_t axis, std::uint64_t k) const {
  const double lo = domain_[axis].lo();
  const double hi = domain_[axis].hi();
  const std::uint64_t n = subdivisions_[axis];
  if (k == 0) return lo;
  if (k >= n) return hi;
  return lo + (hi - lo) * (static_cast<double>(k) / static_cast<double>(n));
}

std::vector<std::uint64_t> Grid::coords(CellId id) const {
  std::vector<std::uint64_t> c(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    c[i] = id % subdivisions_[i];
    id /= subdivisions_[i];
  }
  return c;
}

CellId Grid::id(const std::vector<std::uint64_t>& coords) const {
  CellId r = 0;
  for (std::size_t i = 0; i < dim(); ++i) r += coords[i] * strides_[i];
  return r;
}

IntervalVector Grid::cell_box(CellId id) const {
  IntervalVector b(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    const std::uint64_t k = id % subdivisions_[i];
    id /= subdivisions_[i];
    b[i] = Interval(line(i, k), line(i, k + 1));
  }
  return b;
}

std::pair<std::int64_t, std::int64_t> Grid::axis_range(std::size_t axis, const Interval& x, bool open) const {
  const auto n = static_cast<std::int64_t>(subdivisions_[axis]);
  if (x.is_empty()) return {0, -1};
  const double lo = domain_[axis].lo();
  const double w = cell_width(axis);
  auto above_lo = [&](std::int64_t k) {  // cell k reaches the query's lower end
    const double up = line(axis, static_cast<std::uint64_t>(k + 1));
    return open ? up > x.lo() : up >= x.lo();
  };
  auto below_hi = [&](std::int64_t k) {  // cell k starts before the query's upper end
    const double down = line(axis, static_cast<std::uint64_t>(k));
    return open ? down < x.hi() : down <= x.hi();
  };
  auto guess = [&](double v) {
    const double g = std::floor((v - lo) / w);
    if (!(g > 0)) return std::int64_t{0};
    if (g >= static_cast<double>(n - 1)) return n - 1;
    return static_cast<std::int64_t>(g);
  };

  std::int64_t first = guess(x.lo());
  while (first > 0 && above_lo(first - 1)) --first;
  while (first < n && !above_lo(first)) ++first;
  std::int64_t last = guess(x.hi());
  while (last < n - 1 && below_hi(last + 1)) ++last;
  while (last >= 0 && !below_hi(last)) --last;
  return {first, last};
}

std::vector<CellId> Grid::cells_in_ranges(const std::vector<std::pair<std::int64_t, std::int64_t>>& ranges) const {
  std::vector<CellId> out;
  for (const auto& [a, b] : ranges) {
    if (a > b) return out;
  }
  std::vector<std::uint64_t> c(dim());
  for (std::size_t i = 0; i < dim(); ++i) c[i] = static_cast<std::uint64_t>(ranges[i].first);
  for (;;) {
    out.push_back(id(c));
    std::size_t axis = 0;
    while (axis < dim()) {
      if (c[axis] < static_cast<std::uint64_t>(ranges[axis].second)) {
        ++c[axis];
        break;
      }
      c[axis] = static_cast<std::uint64_t>(ranges[axis].first);
      ++axis;
    }
    if (axis == dim()) break;
  }
  return out;  // axis 0 fastest, so ids come out sorted
}

std::vector<CellId> Grid::cells_meeting(const IntervalVector& box) const {
  if (box.dim() != dim()) throw Error(ErrorCode::InvalidArgument, "query box dimension mismatch");
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges(dim());
  for (std::size_t i = 0; i < dim(); ++i) ranges[i] = axis_range(i, box[i], false);
  return cells_in_ranges(ranges);
}

std::vector<CellId> Grid::cells_overlapping(const IntervalVector& box) const {
  if (box.dim() != dim()) throw Error(ErrorCode::InvalidArgument, "query box dimension mismatch");
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges(dim());
  for (std::size_t i = 0; i < dim(); ++i) ranges[i] = axis_range(i, box[i], !box[i].is_point());
  return cells_in_ranges(ranges);
}

std::vector<CellId> Grid::cells_containing(const std::vector<double>& x) const {
  return cells_meeting(IntervalVector::point(x));
}

bool Grid::on_boundary(CellId id) const {
  const auto c = coords(id);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0 || c[i] + 1 == subdivisions_[i]) return true;
  }
  return false;
}

void Grid::neighbors(CellId id, std::vector<CellId>& out) const {
  out.clear();
  const auto c = coords(id);
  std::vector<int> offset(dim(), -1);
  for (;;) {
    bool self = true;
    bool inside = true;
    CellId nb = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (offset[i] != 0) self = false;
      const std::int64_t k = static_cast<std::int64_t>(c[i]) + offset[i];
      if (k < 0 || k >= static_cast<std::int64_t>(subdivisions_[i])) {
        inside = false;
        break;
      }
      nb += static_cast<CellId>(k) * strides_[i];
    }
    if (inside && !self) out.push_back(nb);
    std::size_t axis = 0;
    while (axis < dim() && offset[axis] == 1) offset[axis++] = -1;
    if (axis == dim()) break;
    ++offset[axis];
  }
}

}  // namespace arcert

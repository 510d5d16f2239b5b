#include "arcert/boxset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arcert {

BoxSet::BoxSet(std::shared_ptr<const Grid> grid) : grid_(std::move(grid)) {
  if (!grid_) throw Error(ErrorCode::InvalidArgument, "box set needs a grid");
}

BoxSet::BoxSet(std::shared_ptr<const Grid> grid, std::vector<CellId> ids) : BoxSet(std::move(grid)) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (!ids.empty() && ids.back() >= grid_->cell_count()) {
    throw Error(ErrorCode::InvalidArgument, "cell id " + std::to_string(ids.back()) + " outside the grid");
  }
  ids_ = std::move(ids);
}

BoxSet BoxSet::all(std::shared_ptr<const Grid> grid) {
  BoxSet s(std::move(grid));
  s.ids_.resize(s.grid_->cell_count());
  for (CellId i = 0; i < s.ids_.size(); ++i) s.ids_[i] = i;
  return s;
}

BoxSet BoxSet::covering(std::shared_ptr<const Grid> grid, const IntervalVector& box) {
  auto ids = grid->cells_overlapping(box);
  return BoxSet(std::move(grid), std::move(ids));
}

BoxSet BoxSet::from_mask(std::shared_ptr<const Grid> grid, const std::vector<char>& mask) {
  BoxSet s(std::move(grid));
  for (CellId i = 0; i < mask.size(); ++i) {
    if (mask[i]) s.ids_.push_back(i);
  }
  return s;
}

bool BoxSet::contains(CellId id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

bool BoxSet::subset_of(const BoxSet& other) const {
  check_same_grid(other);
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

std::vector<char> BoxSet::mask() const {
  std::vector<char> m(grid_->cell_count(), 0);
  for (CellId id : ids_) m[id] = 1;
  return m;
}

void BoxSet::check_same_grid(const BoxSet& other) const {
  if (grid_ != other.grid_ && !(*grid_ == *other.grid_)) {
    throw Error(ErrorCode::InvalidArgument, "box sets live on different grids");
  }
}

BoxSet BoxSet::unite(const BoxSet& other) const {
  check_same_grid(other);
  BoxSet r(grid_);
  std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(), std::back_inserter(r.ids_));
  return r;
}

BoxSet BoxSet::intersect(const BoxSet& other) const {
  check_same_grid(other);
  BoxSet r(grid_);
  std::set_intersection(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                        std::back_inserter(r.ids_));
  return r;
}

BoxSet BoxSet::minus(const BoxSet& other) const {
  check_same_grid(other);
  BoxSet r(grid_);
  std::set_difference(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(), std::back_inserter(r.ids_));
  return r;
}

BoxSet BoxSet::dilate(std::size_t layers) const { return dilate_within(all(grid_), layers); }

BoxSet BoxSet::dilate_within(const BoxSet& carrier, std::size_t layers) const {
  check_same_grid(carrier);
  const auto allowed = carrier.mask();
  auto current = mask();
  for (CellId id = 0; id < current.size(); ++id) current[id] = current[id] && allowed[id];
  std::vector<CellId> nb;
  std::vector<CellId> frontier;
  for (CellId id : ids_) {
    if (allowed[id]) frontier.push_back(id);
  }
  for (std::size_t layer = 0; layer < layers; ++layer) {
    std::vector<CellId> next;
    for (CellId id : frontier) {
      grid_->neighbors(id, nb);
      for (CellId n : nb) {
        if (allowed[n] && !current[n]) {
          current[n] = 1;
          next.push_back(n);
        }
      }
    }
    frontier = std::move(next);
  }
  return from_mask(grid_, current);
}

BoxSet BoxSet::erode_within(const BoxSet& carrier) const {
  check_same_grid(carrier);
  const auto allowed = carrier.mask();
  const auto in = mask();
  BoxSet r(grid_);
  std::vector<CellId> nb;
  for (CellId id : ids_) {
    if (!allowed[id]) continue;
    grid_->neighbors(id, nb);
    const bool interior = std::all_of(nb.begin(), nb.end(), [&](CellId n) { return !allowed[n] || in[n]; });
    if (interior) r.ids_.push_back(id);
  }
  return r;
}

IntervalVector BoxSet::bounding_box() const {
  IntervalVector b(grid_->dim(), Interval::empty());
  for (CellId id : ids_) b = hull(b, grid_->cell_box(id));
  return b;
}

namespace {

double box_distance(const std::vector<double>& x, const IntervalVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = 0.0;
    if (x[i] < b[i].lo()) d = b[i].lo() - x[i];
    if (x[i] > b[i].hi()) d = x[i] - b[i].hi();
    s += d * d;
  }
  return std::sqrt(s);
}

double point_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Nearest-item search over grid buckets in growing Chebyshev shells.
template <typename CellDistance>
double ring_search(const Grid& grid, const std::vector<double>& x, CellDistance&& cell_distance) {
  const std::size_t n = grid.dim();
  std::vector<std::int64_t> home(n);
  std::int64_t max_radius = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cells = static_cast<std::int64_t>(grid.subdivisions()[i]);
    const double rel = (x[i] - grid.domain()[i].lo()) / grid.cell_width(i);
    home[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(rel)), 0, cells - 1);
    max_radius = std::max(max_radius, std::max(home[i], cells - 1 - home[i]));
  }
  const double w = grid.min_cell_width();
  // Outside the domain the shell bound must account for the gap to the home cell.
  const double outside = box_distance(x, grid.domain());
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> off(n);
  std::vector<std::uint64_t> c(n);
  for (std::int64_t r = 0; r <= max_radius; ++r) {
    std::fill(off.begin(), off.end(), -r);
    for (;;) {
      bool on_shell = false;
      bool inside = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::llabs(off[i]) == r) on_shell = true;
        const std::int64_t k = home[i] + off[i];
        if (k < 0 || k >= static_cast<std::int64_t>(grid.subdivisions()[i])) inside = false;
        c[i] = static_cast<std::uint64_t>(k);
      }
      if (on_shell && inside) best = std::min(best, cell_distance(grid.id(c), x));
      std::size_t axis = 0;
      while (axis < n && off[axis] == r) off[axis++] = -r;
      if (axis == n) break;
      ++off[axis];
    }
    if (best <= std::max(0.0, static_cast<double>(r) * w - outside)) break;
  }
  return best;
}

void lattice(const IntervalVector& box, unsigned per_axis, std::vector<std::vector<double>>& out) {
  out.clear();
  const std::size_t n = box.dim();
  per_axis = std::max(per_axis, 2u);
  std::vector<unsigned> k(n, 0);
  std::vector<double> p(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = box[i].lo() + (box[i].hi() - box[i].lo()) * (static_cast<double>(k[i]) / (per_axis - 1));
    }
    out.push_back(p);
    std::size_t axis = 0;
    while (axis < n && k[axis] == per_axis - 1) k[axis++] = 0;
    if (axis == n) break;
    ++k[axis];
  }
}

double directed(const BoxSet& from, const BoxSet& to, unsigned samples) {
  const auto to_mask = to.mask();
  const Grid& g = to.grid();
  auto cell_distance = [&](CellId id, const std::vector<double>& x) {
    return to_mask[id] ? box_distance(x, g.cell_box(id)) : std::numeric_limits<double>::infinity();
  };
  double worst = 0.0;
  std::vector<std::vector<double>> pts;
  for (CellId id : from.ids()) {
    if (to_mask[id]) continue;
    lattice(from.grid().cell_box(id), samples, pts);
    for (const auto& p : pts) worst = std::max(worst, ring_search(g, p, cell_distance));
  }
  return worst;
}

}  // namespace

double box_hausdorff(const BoxSet& p, const BoxSet& q, unsigned samples_per_axis) {
  if (p.empty() || q.empty()) throw Error(ErrorCode::EmptyInput, "Hausdorff distance of an empty set");
  if (!(p.grid() == q.grid())) throw Error(ErrorCode::InvalidArgument, "box sets live on different grids");
  return std::max(directed(p, q, samples_per_axis), directed(q, p, samples_per_axis));
}

double distance_to_set(const std::vector<double>& x, const BoxSet& s) {
  if (s.empty()) return std::numeric_limits<double>::infinity();
  const auto m = s.mask();
  const Grid& g = s.grid();
  return ring_search(g, x, [&](CellId id, const std::vector<double>& y) {
    return m[id] ? box_distance(y, g.cell_box(id)) : std::numeric_limits<double>::infinity();
  });
}

SampleDistances distances_to_samples(const BoxSet& s, const std::vector<std::vector<double>>& points,
                                     unsigned samples_per_axis) {
  if (s.empty() || points.empty()) throw Error(ErrorCode::EmptyInput, "distance to an empty set");
  SampleDistances d;
  const Grid& g = s.grid();
  const auto m = s.mask();
  for (const auto& x : points) {
    d.points_to_set = std::max(d.points_to_set, ring_search(g, x, [&](CellId id, const std::vector<double>& y) {
      return m[id] ? box_distance(y, g.cell_box(id)) : std::numeric_limits<double>::infinity();
    }));
  }
  // Bucket the sample points by grid cell for the reverse direction.
  std::vector<std::vector<std::size_t>> buckets(g.cell_count());
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<std::uint64_t> c(g.dim());
    for (std::size_t a = 0; a < g.dim(); ++a) {
      const double rel = (points[i][a] - g.domain()[a].lo()) / g.cell_width(a);
      c[a] = static_cast<std::uint64_t>(
          std::clamp<double>(std::floor(rel), 0.0, static_cast<double>(g.subdivisions()[a] - 1)));
    }
    buckets[g.id(c)].push_back(i);
  }
  // Points outside the domain are clamped into border buckets; ring_search's
  // shell bound assumes items lie inside their cell, so pad with the excess.
  double excess = 0.0;
  for (const auto& x : points) excess = std::max(excess, box_distance(x, g.domain()));
  std::vector<std::vector<double>> pts;
  for (CellId id : s.ids()) {
    lattice(g.cell_box(id), samples_per_axis, pts);
    for (const auto& p : pts) {
      double best = ring_search(g, p, [&](CellId b, const std::vector<double>& y) {
        double r = std::numeric_limits<double>::infinity();
        for (std::size_t i : buckets[b]) r = std::min(r, point_distance(points[i], y));
        return r;
      });
      if (excess > 0.0) {
        for (const auto& x : points) best = std::min(best, point_distance(x, p));
      }
      d.set_to_points = std::max(d.set_to_points, best);
    }
  }
  return d;
}

}  // namespace arcert

#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "arcert/grid.hpp"

namespace arcert {

/// Sorted set of cells of one grid. All set algebra is exact; dilation and
/// erosion use the Moore neighborhood and are taken relative to a carrier
/// (the whole grid unless given).
class BoxSet {
 public:
  explicit BoxSet(std::shared_ptr<const Grid> grid);
  BoxSet(std::shared_ptr<const Grid> grid, std::vector<CellId> ids);

  static BoxSet all(std::shared_ptr<const Grid> grid);
  /// Cells with positive-measure overlap with the box (see Grid::cells_overlapping).
  static BoxSet covering(std::shared_ptr<const Grid> grid, const IntervalVector& box);
  static BoxSet from_mask(std::shared_ptr<const Grid> grid, const std::vector<char>& mask);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  const std::vector<CellId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(CellId id) const;
  bool subset_of(const BoxSet& other) const;
  std::vector<char> mask() const;

  BoxSet unite(const BoxSet& other) const;
  BoxSet intersect(const BoxSet& other) const;
  BoxSet minus(const BoxSet& other) const;

  /// One-cell (or `layers`-cell) dilation clipped to the carrier.
  BoxSet dilate(std::size_t layers = 1) const;
  BoxSet dilate_within(const BoxSet& carrier, std::size_t layers = 1) const;
  /// Cells whose every neighbor inside the carrier is also in the set.
  BoxSet erode_within(const BoxSet& carrier) const;

  /// Bounding box of the union of cells; empty box for the empty set.
  IntervalVector bounding_box() const;

  friend bool operator==(const BoxSet& a, const BoxSet& b) {
    return a.ids_ == b.ids_ && (a.grid_ == b.grid_ || *a.grid_ == *b.grid_);
  }

 private:
  void check_same_grid(const BoxSet& other) const;

  std::shared_ptr<const Grid> grid_;
  std::vector<CellId> ids_;
};

/// Hausdorff distance between the unions of cells of two sets on the same
/// grid, in state-space units. The supremum over each cell is taken on a
/// lattice of `samples_per_axis` points per axis (corners included), so in
/// dimension >= 2 the value can undershoot the exact one by at most half a
/// lattice diagonal; in 1-D it is exact. Throws EmptyInput on empty sets.
double box_hausdorff(const BoxSet& p, const BoxSet& q, unsigned samples_per_axis = 5);

/// Euclidean distance from a point to the union of cells of a set.
double distance_to_set(const std::vector<double>& x, const BoxSet& s);

/// Directed distances between a set and a finite point sample of some other
/// compact set: sup over points of dist(point, |s|), and sup over |s|
/// (lattice-sampled like box_hausdorff) of dist(., points). Their max is the
/// Hausdorff distance up to the sample resolutions.
struct SampleDistances {
  double points_to_set = 0.0;
  double set_to_points = 0.0;
  double hausdorff() const { return points_to_set > set_to_points ? points_to_set : set_to_points; }
};
SampleDistances distances_to_samples(const BoxSet& s, const std::vector<std::vector<double>>& points,
                                     unsigned samples_per_axis = 5);

}  // namespace arcert

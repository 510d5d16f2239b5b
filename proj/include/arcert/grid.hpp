#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "arcert/interval.hpp"

namespace arcert {

using CellId = std::uint64_t;

/// Uniform cubical grid over a box. Cell ids are row-major with axis 0
/// varying fastest. Cell bounds on each axis are computed from one formula,
/// so neighboring cells share their facet coordinates exactly.
class Grid {
 public:
  Grid(IntervalVector domain, std::vector<std::uint64_t> subdivisions);

  std::size_t dim() const { return domain_.dim(); }
  const IntervalVector& domain() const { return domain_; }
  const std::vector<std::uint64_t>& subdivisions() const { return subdivisions_; }
  std::uint64_t cell_count() const { return count_; }
  double cell_width(std::size_t axis) const;
  double min_cell_width() const;

  /// Coordinate of the k-th grid line on an axis, k in [0, subdivisions].
  double line(std::size_t axis, std::uint64_t k) const;

  std::vector<std::uint64_t> coords(CellId id) const;
  CellId id(const std::vector<std::uint64_t>& coords) const;
  IntervalVector cell_box(CellId id) const;

  /// Every cell whose closed box meets the closed query box.
  std::vector<CellId> cells_meeting(const IntervalVector& box) const;
  /// Cells sharing a positive-measure overlap with the box; on a degenerate
  /// axis this falls back to closed contact, so a point on a facet selects
  /// both adjacent cells.
  std::vector<CellId> cells_overlapping(const IntervalVector& box) const;
  /// Cells whose closure contains the point (one cell, or several on facets).
  std::vector<CellId> cells_containing(const std::vector<double>& x) const;

  /// Moore neighborhood (cells whose closures touch), excluding the cell.
  void neighbors(CellId id, std::vector<CellId>& out) const;
  /// The cell's closure meets the boundary of the domain.
  bool on_boundary(CellId id) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.domain_ == b.domain_ && a.subdivisions_ == b.subdivisions_;
  }

 private:
  // Closed-contact index range on one axis; lo > hi when empty.
  std::pair<std::int64_t, std::int64_t> axis_range(std::size_t axis, const Interval& x, bool open) const;
  std::vector<CellId> cells_in_ranges(const std::vector<std::pair<std::int64_t, std::int64_t>>& ranges) const;

  IntervalVector domain_;
  std::vector<std::uint64_t> subdivisions_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t count_ = 0;
};

}  // namespace arcert

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "arcert/boxset.hpp"
#include "arcert/grid.hpp"
#include "arcert/inclusion.hpp"

namespace arcert {

enum class TimeDirection { Forward, Backward };

/// Box: the first-order step box + h * hull(F(B)) with Picard bound B.
/// Ball: follows a Euclidean ball around the center trajectory. Each step
/// encloses the center by c + h f(c) + h^2/2 J(B) F(B) and grows the radius
/// by exp(h * mu), mu a bound on the logarithmic norm of the interval
/// Jacobian over B. It needs a single smooth piece around the ball and falls
/// back to Box for the whole sub-box otherwise (switching surfaces,
/// overrides, interval coefficients on state terms, balls reaching the
/// boundary of the domain). Unlike Box it does not suffer from wrapping, so
/// it suits long horizons.
enum class Integrator { Box, Ball };

/// Knobs of the integrator. The defaults reproduce the plain single-step
/// scheme x0 + tau * hull(F(B)); substeps split tau into equal steps and
/// subdivide splits each cell into subdivide^n sub-boxes that are integrated
/// separately. Both only tighten the enclosure.
struct IntegrationOptions {
  unsigned substeps = 1;
  unsigned subdivide = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  Integrator method = Integrator::Box;

  friend bool operator==(const IntegrationOptions&, const IntegrationOptions&) = default;
};

/// Everything needed to compute the outer image of a cell.
struct MapConfig {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const PiecewiseInclusion> inclusion;
  Params params;
  double tau = 0.0;
  IntegrationOptions options;
};

/// One validated Euler step from a box.
struct EnclosureStep {
  IntervalVector enclosure;  // a-priori bound B on all solutions over [0, h]
  IntervalVector image;      // box + h * hull(F(B & X)), before clipping to X
  bool exited = false;       // image leaves X
};

/// Picard-style bound: returns B containing `box` with
/// box + [0,h] * hull(F(B & X)) inside B. Inflation multiplies radii by 1.1
/// and adds 1e-12 per round; NoEnclosure after 50 rounds.
IntervalVector a_priori_enclosure(const IntervalVector& box, double h, const PiecewiseInclusion& inclusion,
                                  const Params& params, TimeDirection dir = TimeDirection::Forward);

EnclosureStep enclosure_step(const IntervalVector& box, double h, const PiecewiseInclusion& inclusion,
                             const Params& params, TimeDirection dir = TimeDirection::Forward);

/// Outer image of a box after time `horizon` for solutions that stay in X,
/// using the substep/subdivision settings of `cfg`. Targets are the sorted
/// cells overlapping the clipped images (closed contact only along
/// degenerate axes, which still covers every image point); `exited` is set when any sub-box image
/// left X at some substep.
struct CellImage {
  std::vector<CellId> targets;
  bool exited = false;
};
CellImage flow_image(const IntervalVector& box, double horizon, const MapConfig& cfg,
                     TimeDirection dir = TimeDirection::Forward);

/// Image of one grid cell over one step tau.
CellImage image_boxes(CellId cell, const MapConfig& cfg);

/// Default step: min cell width / (2 * max |F| over X), or 1 for a zero field.
double default_tau(const Grid& grid, const PiecewiseInclusion& inclusion, const Params& params);

/// Directed graph on grid cells, stored as CSR. A cell may have no out-edges:
/// all of its solutions leave X within one step. On a transposed graph the
/// boundary flags keep their original meaning and are read as entry flags.
class BoxMapGraph {
 public:
  BoxMapGraph(std::shared_ptr<const Grid> grid, double tau, Params params, std::vector<std::uint64_t> offsets,
              std::vector<CellId> targets, std::vector<char> boundary_flags, bool transposed = false);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  double tau() const { return tau_; }
  const Params& params() const { return params_; }
  bool transposed() const { return transposed_; }

  std::uint64_t cell_count() const { return grid_->cell_count(); }
  std::uint64_t edge_count() const { return targets_.size(); }
  std::span<const CellId> targets(CellId cell) const {
    return {targets_.data() + offsets_[cell], targets_.data() + offsets_[cell + 1]};
  }
  /// Exit flag on a forward graph, entry flag on a transposed one.
  bool boundary_flag(CellId cell) const { return flags_[cell] != 0; }
  BoxSet flagged_cells() const;

  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  const std::vector<CellId>& all_targets() const { return targets_; }
  const std::vector<char>& flags() const { return flags_; }

  friend bool operator==(const BoxMapGraph& a, const BoxMapGraph& b);

 private:
  std::shared_ptr<const Grid> grid_;
  double tau_;
  Params params_;
  std::vector<std::uint64_t> offsets_;
  std::vector<CellId> targets_;
  std::vector<char> flags_;
  bool transposed_;
};

/// Per-cell images over a worker pool, merged in cell order. A failing cell
/// is reported with its id (the lowest failing id when several fail).
BoxMapGraph build_graph(const MapConfig& cfg);

BoxMapGraph transpose(const BoxMapGraph& graph);

/// Shrinks a set known to contain an invariant set K. Every point of K is
/// the time-T image (forward and backward) of another point of K, so
///   I <- I & cells(Image_T(I)) & cells(Image_-T(I))
/// keeps K covered; iterated to a fixed point. Either condition alone is
/// also sound, so each direction can be switched off. Stages run in order on
/// the survivors of the previous one, typically a cheap coarse pass and then
/// a finer one.
struct SharpenOptions {
  double horizon = 0.0;  // 0 disables
  std::vector<IntegrationOptions> stages{{50, 1, 0, Integrator::Ball}, {100, 2, 0, Integrator::Ball}};
  bool forward = true;
  bool backward = true;
  unsigned max_rounds = 64;

  friend bool operator==(const SharpenOptions&, const SharpenOptions&) = default;
};
BoxSet sharpen_invariant(const MapConfig& cfg, const BoxSet& set, const SharpenOptions& options);

/// Text edge list: "# cells N", "# tau <value>", "# exit <ids...>" (or
/// "# entry" when transposed), then one "src dst" line per edge.
void write_edge_list(std::ostream& os, const BoxMapGraph& graph);

/// Binary adjacency, all integers little-endian u64, doubles as IEEE-754
/// bit patterns in u64:
///   magic "ARCGRAPH" (8 bytes), version (=1), dim, subdivisions[dim],
///   domain lo[dim], domain hi[dim], tau, lambda lo, lambda hi, transposed,
///   cell count N, then N records: boundary flag, k, k target ids.
void write_binary(std::ostream& os, const BoxMapGraph& graph);
BoxMapGraph read_binary(std::istream& is);

}  // namespace arcert

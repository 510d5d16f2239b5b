#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "arcert/boxmap.hpp"
#include "arcert/boxset.hpp"

namespace arcert {

/// A box-map graph with every edge that leaves the carrier removed. Orbits
/// are followed one step at a time only while they stay in the carrier.
class RestrictedGraph {
 public:
  RestrictedGraph(BoxSet carrier, std::vector<std::uint64_t> offsets, std::vector<CellId> targets, double tau,
                  Params params, bool transposed);

  const Grid& grid() const { return carrier_.grid(); }
  const std::shared_ptr<const Grid>& grid_ptr() const { return carrier_.grid_ptr(); }
  const BoxSet& carrier() const { return carrier_; }
  double tau() const { return tau_; }
  const Params& params() const { return params_; }
  bool transposed() const { return transposed_; }

  std::uint64_t edge_count() const { return targets_.size(); }
  std::span<const CellId> targets(CellId cell) const {
    return {targets_.data() + offsets_[cell], targets_.data() + offsets_[cell + 1]};
  }
  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  const std::vector<CellId>& all_targets() const { return targets_; }

  /// One-step image of a set (cells of the set outside the carrier contribute nothing).
  BoxSet image(const BoxSet& set) const;
  /// Cells reachable from the set by paths of length >= 0 (the set itself included).
  BoxSet forward_reach(const BoxSet& set) const;

  friend bool operator==(const RestrictedGraph& a, const RestrictedGraph& b);

 private:
  BoxSet carrier_;
  std::vector<std::uint64_t> offsets_;  // one slot per grid cell
  std::vector<CellId> targets_;
  double tau_;
  Params params_;
  bool transposed_;
};

RestrictedGraph restrict(const BoxMapGraph& graph, const BoxSet& carrier);
RestrictedGraph restrict(const RestrictedGraph& graph, const BoxSet& carrier);
RestrictedGraph transpose(const RestrictedGraph& graph);

/// Cells lying on a cycle (including self-loops) of the graph restricted to `within`.
BoxSet recurrent_cells(const RestrictedGraph& graph, const BoxSet& within);

/// Cells of N on some bi-infinite path inside N: reachable from and reaching
/// the recurrent part of the N-restricted graph.
BoxSet invariant_part(const BoxMapGraph& graph, const BoxSet& n);
BoxSet invariant_part(const RestrictedGraph& graph, const BoxSet& n);

/// Inv of the forward reach of U; alpha_limit is the same on the transpose.
BoxSet omega_limit(const RestrictedGraph& graph, const BoxSet& u);
BoxSet alpha_limit(const RestrictedGraph& graph, const BoxSet& u);

struct IsolationCertificate {
  BoxSet n;
  BoxSet inv;
  bool moat_verified = false;
  Interval lambda;
};

/// Passes iff the one-cell dilation of Inv(N) stays inside N, counting the
/// (virtual) cells past the domain boundary as outside N.
IsolationCertificate is_isolating(const BoxMapGraph& graph, const BoxSet& n);

struct AttractorCertificate {
  BoxSet a;
  std::uint64_t k_star = 0;
};

/// Default step bound: four times the carrier size (at least 1).
std::uint64_t default_k_max(const RestrictedGraph& graph);

/// Smallest k <= k_max whose k-step image of the dilation of U (relative to
/// the carrier) lies in the erosion of U, with A = omega_limit(U), which must
/// also lie in that erosion. Returns nothing when no such k exists. The scan
/// stops early once the image sequence becomes stationary. k_max = 0 selects
/// the default bound.
std::optional<AttractorCertificate> attractor_from(const RestrictedGraph& graph, const BoxSet& u,
                                                   std::uint64_t k_max = 0);

/// R = Inv(carrier \ W), W the forward reach of the k*-step image of U.
/// Throws PreconditionViolated when (U, k*) is not an attractor certificate.
BoxSet dual_repeller(const RestrictedGraph& graph, const BoxSet& u, std::uint64_t k_star);

struct ConnectionCheck {
  bool forward_ok = false;   // recurrent cells downstream of C lie near A
  bool backward_ok = false;  // recurrent cells upstream of C lie near R
  BoxSet forward_stray;      // offending recurrent cells, if any
  BoxSet backward_stray;
};

struct ARDecomposition {
  BoxSet s;
  BoxSet a;
  BoxSet r;
  BoxSet c;
  BoxSet u;
  BoxSet w;
  std::uint64_t k_star = 0;
  ConnectionCheck connection;
};

struct DecomposeOptions {
  std::uint64_t k_max = 0;  // 0: default_k_max
  std::size_t slack = 2;    // cells of tolerance in the connection check
};

/// attractor_from, dual_repeller and C = S \ (A u R), followed by the
/// connection check. Throws NoAttractor or DecompositionInconsistent.
ARDecomposition decompose(const RestrictedGraph& graph, const BoxSet& u, const DecomposeOptions& options = {});

/// Runs the connection check for given A, R, C on the graph.
ConnectionCheck check_connection(const RestrictedGraph& graph, const BoxSet& a, const BoxSet& r, const BoxSet& c,
                                 std::size_t slack);

/// Shrinks A and R with long-horizon images (see sharpen_invariant) and
/// recomputes C, so the partition of S stays exact.
ARDecomposition sharpen(const MapConfig& cfg, ARDecomposition d, const SharpenOptions& options);

/// "# grid <subdivisions...>" followed by one cell id per line.
void write_boxset(std::ostream& os, const BoxSet& set);
BoxSet read_boxset(std::istream& is, std::shared_ptr<const Grid> grid);
/// Tab-separated columns: id, lo per axis, hi per axis, with a header line.
void write_boxset_table(std::ostream& os, const BoxSet& set);

}  // namespace arcert

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "arcert/boxmap.hpp"
#include "support.hpp"

using namespace arcert;
using testing_support::build;
using testing_support::load_config;
using testing_support::map_config;

namespace {

PiecewiseInclusion scalar(const char* rhs, Interval domain = Interval(0, 1)) {
  return PiecewiseInclusion(IntervalVector{domain}, {RegionPiece{"all", {}, {parse_polynomial(rhs, 1)}}});
}

/// Exact edges of the translation flow x' = 1 on [0,1] with 10 cells and
/// tau = 0.15, in units of 1/20: cell i is (2i, 2i+2) and its image is
/// (2i+3, 2i+5); cell j is a target when the open intervals overlap.
std::set<std::pair<CellId, CellId>> translation_edges() {
  std::set<std::pair<CellId, CellId>> edges;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      if (std::max(2 * i + 3, 2 * j) < std::min(2 * i + 5, 2 * j + 2)) edges.insert({CellId(i), CellId(j)});
    }
  }
  return edges;
}

}  // namespace

TEST(Grid, CellsTileTheDomain) {
  const Grid g(IntervalVector{Interval(-1, 1), Interval(0, 3)}, {4, 3});
  EXPECT_EQ(g.cell_count(), 12u);
  for (CellId id = 0; id < g.cell_count(); ++id) EXPECT_EQ(g.id(g.coords(id)), id);
  EXPECT_EQ(g.cell_box(0), (IntervalVector{Interval(-1, -0.5), Interval(0, 1)}));
  EXPECT_EQ(g.cells_containing({0.0, 1.5}).size(), 2u);
  EXPECT_EQ(g.cells_containing({0.0, 1.0}).size(), 4u);
}

TEST(Grid, OverlapIgnoresFacetContact) {
  const Grid g(IntervalVector{Interval(0, 1)}, {10});
  EXPECT_EQ(g.cells_overlapping(IntervalVector{Interval(0.1, 0.2)}), std::vector<CellId>{1});
  EXPECT_EQ(g.cells_meeting(IntervalVector{Interval(0.1, 0.2)}).size(), 3u);
  EXPECT_EQ(g.cells_overlapping(IntervalVector{Interval(0.2)}).size(), 2u);
}

TEST(AprioriEnclosure, ConstantDrift) {
  const auto f = scalar("1");
  const IntervalVector b = a_priori_enclosure(IntervalVector{Interval(0, 0.1)}, 0.1, f, Params::at(0));
  EXPECT_TRUE(b[0].contains(Interval(0, 0.2)));
}

TEST(AprioriEnclosure, SymmetricCone) {
  const auto f = scalar("[-1, 1]");
  const IntervalVector b = a_priori_enclosure(IntervalVector{Interval(0.5)}, 0.5, f, Params::at(0));
  EXPECT_TRUE(b[0].contains(Interval(0, 1)));
}

TEST(AprioriEnclosure, FixedPointInequalityHolds) {
  const auto f = scalar("1 - x1");
  const IntervalVector cell{Interval(0.5, 0.6)};
  const IntervalVector b = a_priori_enclosure(cell, 0.1, f, Params::at(0));
  // cell + [0, 0.1] * (1 - B), evaluated independently with the same hull.
  const Interval slope = Interval(1.0) - b[0];
  const Interval reach = cell[0] + Interval(0, 0.1) * slope;
  EXPECT_TRUE(b[0].contains(reach));
  EXPECT_TRUE(b[0].contains(cell[0]));
}

TEST(AprioriEnclosure, RejectsBadArguments) {
  const auto f = scalar("1");
  EXPECT_THROW(a_priori_enclosure(IntervalVector{Interval(0, 0.1)}, 0.0, f, Params::at(0)), Error);
  EXPECT_THROW(a_priori_enclosure(IntervalVector{Interval(2, 3)}, 0.1, f, Params::at(0)), Error);
}

TEST(AprioriEnclosure, LargeStepsLeaveTheDomainInsteadOfDiverging) {
  // The hull is only evaluated on the domain, so the iteration settles once
  // the candidate box has left it.
  const auto f = scalar("x1^2 + 10", Interval(0, 100));
  const IntervalVector b = a_priori_enclosure(IntervalVector{Interval(99, 100)}, 10.0, f, Params::at(0));
  EXPECT_GT(b[0].hi(), 100.0);
  EXPECT_TRUE(b[0].contains(Interval(99, 100)));
}

TEST(ImageBoxes, TranslationExitsFromTheLastCell) {
  const auto cfg = map_config(load_config("translation"));
  const CellImage last = image_boxes(9, cfg);
  EXPECT_TRUE(last.targets.empty());
  EXPECT_TRUE(last.exited);
  const CellImage first = image_boxes(0, cfg);
  EXPECT_FALSE(first.exited);
  EXPECT_TRUE(std::find(first.targets.begin(), first.targets.end(), 1) != first.targets.end());
  EXPECT_TRUE(std::find(first.targets.begin(), first.targets.end(), 2) != first.targets.end());
  EXPECT_LE(first.targets.size(), 3u);
}

TEST(ImageBoxes, SwitchingNearTheAttractorTargetsTheCellOfOne) {
  auto sc = load_config("switching");
  sc.grid = {64};
  sc.tau = 0.5;
  const auto cfg = map_config(sc);
  const CellId top = 63;  // [0.96875, 1]
  const CellImage img = image_boxes(top, cfg);
  EXPECT_TRUE(std::find(img.targets.begin(), img.targets.end(), top) != img.targets.end());
  // The closed-form image of [0.9375, 1] is about [0.9621, 1]: cells 62 and 63.
  const CellImage lower = image_boxes(62, cfg);
  EXPECT_TRUE(std::find(lower.targets.begin(), lower.targets.end(), 63) != lower.targets.end());
}

TEST(BuildGraph, TranslationEdgesMatchTheExactEnumeration) {
  const BoxMapGraph g = build(load_config("translation"));
  const auto exact = translation_edges();
  EXPECT_EQ(exact.size(), 17u);
  std::set<std::pair<CellId, CellId>> got;
  for (CellId i = 0; i < g.cell_count(); ++i) {
    for (CellId j : g.targets(i)) got.insert({i, j});
  }
  for (const auto& e : exact) EXPECT_TRUE(got.count(e)) << e.first << " -> " << e.second;
  EXPECT_EQ(got, exact);
  EXPECT_TRUE(g.boundary_flag(8));
  EXPECT_TRUE(g.boundary_flag(9));
  EXPECT_FALSE(g.boundary_flag(7));
}

TEST(BuildGraph, QuadraticAtLambdaOneHasNoCycles) {
  auto sc = load_config("quadratic");
  sc.lambda = Interval(1.0);
  const BoxMapGraph g = build(sc);
  const RestrictedGraph rg = restrict(g, BoxSet::all(g.grid_ptr()));
  EXPECT_TRUE(recurrent_cells(rg, rg.carrier()).empty());
  EXPECT_TRUE(invariant_part(g, BoxSet::all(g.grid_ptr())).empty());
}

TEST(BuildGraph, SingleCellZeroFieldIsASelfLoop) {
  auto grid = std::make_shared<const Grid>(IntervalVector{Interval(0, 1)}, std::vector<std::uint64_t>{1});
  auto f = std::make_shared<const PiecewiseInclusion>(scalar("0"));
  const BoxMapGraph g = build_graph(MapConfig{grid, f, Params::at(0), 0.5, {}});
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.targets(0)[0], 0u);
  EXPECT_FALSE(g.boundary_flag(0));
}

TEST(BuildGraph, DeterministicAcrossWorkerCounts) {
  auto sc = load_config("circle");
  sc.grid = {48, 48};
  sc.integration.threads = 1;
  const BoxMapGraph one = build(sc);
  sc.integration.threads = 4;
  const BoxMapGraph four = build(sc);
  EXPECT_EQ(one, four);
  std::ostringstream a, b;
  write_edge_list(a, one);
  write_edge_list(b, four);
  EXPECT_EQ(a.str(), b.str());
}

TEST(BuildGraph, ErrorsNameTheCell) {
  auto grid = std::make_shared<const Grid>(IntervalVector{Interval(0, 1)}, std::vector<std::uint64_t>{4});
  auto f = std::make_shared<const PiecewiseInclusion>(
      IntervalVector{Interval(0, 1)},
      std::vector<RegionPiece>{RegionPiece{"half", {AffineGuard{{1.0}, -0.5}}, {parse_polynomial("0", 1)}}});
  try {
    build_graph(MapConfig{grid, f, Params::at(0), 0.1, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UncoveredRegion);
    EXPECT_NE(std::string(e.what()).find("cell "), std::string::npos);
  }
}

TEST(Transpose, ReversesEdgesAndIsAnInvolution) {
  const BoxMapGraph g = build(load_config("translation"));
  const BoxMapGraph t = transpose(g);
  EXPECT_EQ(t.edge_count(), g.edge_count());
  EXPECT_TRUE(t.transposed());
  const auto down = t.targets(2);
  EXPECT_EQ(std::vector<CellId>(down.begin(), down.end()), (std::vector<CellId>{0, 1}));
  EXPECT_EQ(transpose(t), g);
  EXPECT_TRUE(t.boundary_flag(9));
}

TEST(Transpose, SwitchingCellOfOneReachesBackIntoTheRightHalf) {
  const BoxMapGraph g = build(load_config("switching"));
  const BoxMapGraph t = transpose(g);
  const auto back = t.targets(127);
  EXPECT_GT(back.size(), 1u);
  for (CellId c : back) EXPECT_GE(c, 64u);
  for (CellId i = 0; i < g.cell_count(); ++i) {
    for (CellId j : g.targets(i)) {
      const auto r = t.targets(j);
      EXPECT_TRUE(std::binary_search(r.begin(), r.end(), i));
    }
  }
}

TEST(Serialization, BinaryRoundTrip) {
  const BoxMapGraph g = build(load_config("switching"));
  std::stringstream buf;
  write_binary(buf, g);
  EXPECT_EQ(read_binary(buf), g);
  std::stringstream bad("NOTAGRAPH");
  EXPECT_THROW(read_binary(bad), Error);
}

TEST(Serialization, EdgeListHeader) {
  std::ostringstream os;
  write_edge_list(os, build(load_config("translation")));
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("# cells 10\n# tau 0.15\n# exit 8 9\n0 1\n0 2\n", 0), 0u);
}

TEST(DefaultTau, HalfACellAtMaximalSpeed) {
  const Grid grid(IntervalVector{Interval(0, 1)}, {10});
  EXPECT_DOUBLE_EQ(default_tau(grid, scalar("2"), Params::at(0)), 0.025);
  EXPECT_EQ(default_tau(grid, scalar("0"), Params::at(0)), 1.0);
}

TEST(Sharpen, ShrinksSwitchingAttractorToTheCellOfOne) {
  const auto sc = load_config("switching");
  const auto cfg = map_config(sc);
  const BoxSet candidate = BoxSet::covering(cfg.grid, IntervalVector{Interval(0.90625, 1)});
  SharpenOptions opt;
  opt.horizon = 1.0;
  opt.backward = false;
  const BoxSet a = sharpen_invariant(cfg, candidate, opt);
  EXPECT_TRUE(a.contains(127));
  EXPECT_TRUE(a.subset_of(candidate));
  EXPECT_LE(a.size(), 2u);
}

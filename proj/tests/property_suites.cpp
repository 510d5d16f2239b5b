#include "property_suites.hpp"

#include <functional>
#include <sstream>

#include "random_graphs.hpp"
#include "support.hpp"

namespace testing_support {

using namespace arcert;

namespace {

class Recorder {
 public:
  explicit Recorder(std::string name) { result_.name = std::move(name); }

  void check(bool ok, const std::function<std::string()>& describe) {
    ++result_.cases;
    if (ok) return;
    if (result_.failures++ == 0) result_.detail = describe();
  }
  std::size_t cases() const { return result_.cases; }
  SuiteResult result() const { return result_; }

 private:
  SuiteResult result_;
};

/// |fine| inside |coarse| as point sets (fine refines coarse).
bool union_within(const BoxSet& fine, const BoxSet& coarse) {
  for (CellId id : fine.ids()) {
    for (CellId c : coarse.grid().cells_overlapping(fine.grid().cell_box(id))) {
      if (!coarse.contains(c)) return false;
    }
  }
  return true;
}

std::string describe_sets(const char* what, const BoxSet& a, const BoxSet& b) {
  std::ostringstream os;
  os << what << ": " << a.size() << " vs " << b.size() << " cells";
  return os.str();
}

struct GraphSuites {
  Recorder limit_inside{"omega(U) inside U implies Inv(U) = omega(U)"};
  Recorder duality{"alpha/omega transposition duality"};
  Recorder idempotence{"invariant_part idempotence"};
  Recorder nonempty{"omega-limit nonempty and invariant"};
  Recorder partition{"decomposition partition"};
  Recorder dual_dual{"dual-dual containment"};

  void limit_case(const RestrictedGraph& rg, const BoxSet& u) {
    const BoxSet w = omega_limit(rg, u);
    if (!w.subset_of(u)) return;
    const BoxSet inv = invariant_part(rg, u);
    limit_inside.check(inv == w, [&] { return describe_sets("Inv(U) vs omega(U)", inv, w); });
  }

  void duality_case(const RestrictedGraph& rg, const BoxSet& u) {
    const BoxSet a = alpha_limit(rg, u);
    const BoxSet o = omega_limit(transpose(rg), u);
    duality.check(a == o && transpose(transpose(rg)) == rg,
                  [&] { return describe_sets("alpha(U) vs omega on transpose", a, o); });
  }

  void idempotence_case(const BoxMapGraph& g, const RestrictedGraph& rg, const BoxSet& n) {
    const BoxSet i = invariant_part(g, n);
    const BoxSet j = invariant_part(rg, n.intersect(rg.carrier()));
    idempotence.check(invariant_part(g, i) == i && invariant_part(rg, j) == j,
                      [&] { return describe_sets("Inv(Inv(N)) vs Inv(N)", invariant_part(g, i), i); });
  }

  void nonempty_case(const RestrictedGraph& rg, const BoxSet& u) {
    if (u.empty()) return;
    const BoxSet w = omega_limit(rg, u);
    nonempty.check(!w.empty() && invariant_part(rg, w) == w,
                   [&] { return describe_sets("omega(U) vs Inv(omega(U))", w, invariant_part(rg, w)); });
  }

  void decomposition_case(const RestrictedGraph& rg, const BoxSet& u) {
    std::optional<ARDecomposition> d;
    try {
      d = decompose(rg, u);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoAttractor && e.code() != ErrorCode::DecompositionInconsistent) throw;
      return;
    }
    const BoxSet& s = rg.carrier();
    partition.check(d->a.intersect(d->r).empty() && d->a.intersect(d->c).empty() && d->r.intersect(d->c).empty() &&
                        d->a.unite(d->r).unite(d->c) == s,
                    [&] { return describe_sets("A u R u C vs S", d->a.unite(d->r).unite(d->c), s); });
    // Symmetric pipeline on the transpose, from a neighbourhood of R.
    const RestrictedGraph t = transpose(rg);
    const BoxSet ur = d->r.dilate_within(s, 1);
    const auto att = attractor_from(t, ur);
    if (!att) {
      dual_dual.check(false, [&] { return std::string("no attractor for the transpose from N(R)"); });
      return;
    }
    const BoxSet dd = dual_repeller(t, ur, att->k_star);
    dual_dual.check(d->a.subset_of(dd) && dd.subset_of(d->a.dilate(1)),
                    [&] { return describe_sets("dual of dual vs A", dd, d->a); });
  }

  /// Every check on one graph, with U drawn from the generator.
  void run_graph(const BoxMapGraph& g, std::mt19937_64& rng, const std::vector<BoxSet>& extra_u) {
    const auto& grid = g.grid_ptr();
    const BoxSet s = invariant_part(g, BoxSet::all(grid));
    const RestrictedGraph rg = restrict(g, s);
    const double density = uniform(rng, 0.02, 0.6);
    idempotence_case(g, rg, random_subset(grid, rng, density));
    if (s.empty()) return;

    std::vector<BoxSet> us = extra_u;
    us.push_back(random_subset(grid, rng, density).intersect(s));
    const CellId seed = s.ids()[std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng)];
    const BoxSet reach = rg.forward_reach(BoxSet(grid, {seed}));
    us.push_back(reach);
    us.push_back(reach.dilate_within(s, 1));
    us.push_back(s);
    for (const auto& u0 : us) {
      const BoxSet u = u0.intersect(s);
      limit_case(rg, u);
      duality_case(rg, u);
      nonempty_case(rg, u);
    }
    decomposition_case(rg, reach.dilate_within(s, 1));
    decomposition_case(rg, s);
    for (const auto& u : extra_u) decomposition_case(rg, u.intersect(s));
  }

  bool enough(std::size_t n) const {
    for (const Recorder* r : {&limit_inside, &duality, &idempotence, &nonempty, &partition, &dual_dual}) {
      if (r->cases() < n) return false;
    }
    return true;
  }

  std::vector<SuiteResult> results() const {
    return {limit_inside.result(),   duality.result(),   idempotence.result(),
            nonempty.result(), partition.result(), dual_dual.result()};
  }
};

}  // namespace

std::vector<SuiteResult> graph_property_suites(std::uint64_t seed, std::size_t min_random_cases) {
  GraphSuites suites;
  std::mt19937_64 rng(seed);
  for (std::size_t attempt = 0; attempt < 50 * min_random_cases && !suites.enough(min_random_cases); ++attempt) {
    const RandomGraphCase rc = random_graph(rng);
    suites.run_graph(rc.graph, rng, {});
  }
  for (const char* name : {"translation", "switching", "quadratic", "circle"}) {
    const SystemConfig cfg = load_config(name);
    const ResolvedSystem res = resolve(cfg);
    const BoxMapGraph g = build_graph(res.map_config(cfg));
    std::vector<BoxSet> us;
    if (auto u = res.optional_set(cfg, "U")) us.push_back(*u);
    suites.run_graph(g, rng, us);
  }
  return suites.results();
}

namespace {

/// Checks one sampled solution against the graph: if it stays in X its end
/// point lies in a target of every cell containing its start, otherwise those
/// cells carry the exit flag.
void check_sample(Recorder& rec, std::size_t& decided, const BoxMapGraph& g, const std::vector<double>& x0, const Sample& s,
                  const std::string& system) {
  if (s.undecided) return;
  ++decided;
  for (CellId start : g.grid().cells_containing(x0)) {
    bool ok = false;
    if (s.stays) {
      const auto targets = g.targets(start);
      for (CellId c : g.grid().cells_containing(s.end)) {
        ok = ok || std::binary_search(targets.begin(), targets.end(), c);
      }
    } else {
      ok = g.boundary_flag(start);
    }
    rec.check(ok, [&] {
      std::ostringstream os;
      os << system << ": start (";
      for (double v : x0) os << v << ' ';
      os << ") in cell " << start << (s.stays ? " lands outside its targets" : " leaves X without exit flag");
      return os.str();
    });
  }
}

}  // namespace

SuiteResult soundness_suite(std::uint64_t seed, std::size_t min_trajectories) {
  Recorder rec("outer soundness against closed-form trajectories");
  std::mt19937_64 rng(seed);
  std::vector<std::string> notes;
  std::size_t decided = 0;
  auto per_system = [&](const std::string& name, auto&& sample_one) {
    const std::size_t before = rec.cases();
    decided = 0;
    while (decided < min_trajectories) sample_one();
    const std::size_t trajectories = decided;
    notes.push_back(name + " " + std::to_string(trajectories) + " trajectories / " +
                    std::to_string(rec.cases() - before) + " cell checks");
  };

  {
    const SystemConfig cfg = load_config("translation");
    const BoxMapGraph g = build(cfg);
    const double tau = g.tau();
    per_system("translation", [&] {
      const double x0 = uniform(rng, 0, 1);
      check_sample(rec, decided, g, {x0}, translation_flow(x0, tau, 0, 1), "translation");
    });
  }
  {
    const SystemConfig cfg = load_config("switching");
    const BoxMapGraph g = build(cfg);
    const double tau = g.tau();
    per_system("switching", [&] {
      // One in five solutions starts on the switching point and dwells there.
      if (std::uniform_int_distribution<int>(0, 4)(rng) == 0) {
        const double dwell = uniform(rng, 0, 2 * tau);
        check_sample(rec, decided, g, {0.0}, switching_flow(0.0, tau, dwell), "switching (dwell at 0)");
      } else {
        const double x0 = uniform(rng, -1, 1);
        check_sample(rec, decided, g, {x0}, switching_flow(x0, tau, 0), "switching");
      }
    });
  }
  {
    SystemConfig cfg = load_config("quadratic");
    std::vector<BoxMapGraph> graphs;
    for (double l : cfg.samples) {
      cfg.lambda = Interval(l);
      graphs.push_back(build(cfg));
    }
    // Interval mode: one graph valid for every lambda in [0.25, 0.5].
    cfg.lambda = Interval(0.25, 0.5);
    const BoxMapGraph wide = build(cfg);
    const double tau = wide.tau();
    std::size_t k = 0;
    per_system("quadratic", [&] {
      const double x0 = uniform(rng, -1, 1);
      if (k % 6 == 5) {
        const double l = uniform(rng, 0.25, 0.5);
        check_sample(rec, decided, wide, {x0}, quadratic_flow(x0, tau, l), "quadratic (lambda interval)");
      } else {
        const double l = cfg.samples[k % 6 % cfg.samples.size()];
        check_sample(rec, decided, graphs[k % 6 % cfg.samples.size()], {x0}, quadratic_flow(x0, tau, l), "quadratic");
      }
      ++k;
    });
  }
  {
    SystemConfig cfg = load_config("circle");
    std::vector<double> lambdas{-0.2, 0.0, 0.2};
    std::vector<BoxMapGraph> graphs;
    for (double l : lambdas) {
      cfg.lambda = Interval(l);
      graphs.push_back(build(cfg));
    }
    const double tau = graphs[0].tau();
    std::size_t k = 0;
    per_system("circle", [&] {
      const double x0 = uniform(rng, -1.5, 1.5), y0 = uniform(rng, -1.5, 1.5);
      const double l = lambdas[k % 3];
      check_sample(rec, decided, graphs[k % 3], {x0, y0}, circle_flow(x0, y0, tau, l, 1.5), "circle");
      ++k;
    });
  }
  SuiteResult r = rec.result();
  if (r.failures == 0) {
    for (std::size_t i = 0; i < notes.size(); ++i) r.detail += (i ? "; " : "") + notes[i];
  }
  return r;
}

SuiteResult refinement_suite() {
  Recorder rec("refinement (axis doubling): image soundness and monotone Inv, A, R");
  for (const char* name : {"translation", "switching", "quadratic", "circle"}) {
    const SystemConfig coarse_cfg = load_config(name);
    SystemConfig fine_cfg = coarse_cfg;
    fine_cfg.grid[0] *= 2;
    const ResolvedSystem coarse_res = resolve(coarse_cfg);
    const ResolvedSystem fine_res = resolve(fine_cfg);
    const BoxMapGraph coarse = build_graph(coarse_res.map_config(coarse_cfg));
    const BoxMapGraph fine = build_graph(fine_res.map_config(fine_cfg));
    const Grid& cg = coarse.grid();
    const Grid& fg = fine.grid();

    std::size_t bad_cells = 0;
    CellId first_bad = 0;
    for (CellId f = 0; f < fg.cell_count(); ++f) {
      const CellId parent = cg.cells_overlapping(fg.cell_box(f)).front();
      const auto pt = coarse.targets(parent);
      const BoxSet allowed = BoxSet(coarse.grid_ptr(), std::vector<CellId>(pt.begin(), pt.end())).dilate(1);
      const auto ft = fine.targets(f);
      if (!union_within(BoxSet(fine.grid_ptr(), std::vector<CellId>(ft.begin(), ft.end())), allowed)) {
        if (bad_cells++ == 0) first_bad = f;
      }
    }
    rec.check(bad_cells == 0, [&] {
      return std::string(name) + ": " + std::to_string(bad_cells) + " refined cells image outside the dilated parent " +
             "image (first: " + std::to_string(first_bad) + ")";
    });

    const BoxSet sc = invariant_part(coarse, BoxSet::all(coarse.grid_ptr()));
    const BoxSet sf = invariant_part(fine, BoxSet::all(fine.grid_ptr()));
    rec.check(union_within(sf, sc), [&] { return std::string(name) + ": refined Inv not inside coarse Inv"; });

    const auto uc = coarse_res.optional_set(coarse_cfg, "U");
    if (uc && !sc.empty() && !sf.empty()) {
      const BoxSet uf = *fine_res.optional_set(fine_cfg, "U");
      const ARDecomposition dc = decompose(restrict(coarse, sc), *uc, {coarse_cfg.k_max, coarse_cfg.slack});
      const ARDecomposition df = decompose(restrict(fine, sf), uf, {fine_cfg.k_max, fine_cfg.slack});
      rec.check(union_within(df.a, dc.a), [&] { return std::string(name) + ": refined A not inside coarse A"; });
      rec.check(union_within(df.r, dc.r), [&] { return std::string(name) + ": refined R not inside coarse R"; });
    }
  }
  return rec.result();
}

}  // namespace testing_support

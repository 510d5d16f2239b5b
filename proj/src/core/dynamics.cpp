#include "arcert/dynamics.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace arcert {

RestrictedGraph::RestrictedGraph(BoxSet carrier, std::vector<std::uint64_t> offsets, std::vector<CellId> targets,
                                 double tau, Params params, bool transposed)
    : carrier_(std::move(carrier)),
      offsets_(std::move(offsets)),
      targets_(std::move(targets)),
      tau_(tau),
      params_(params),
      transposed_(transposed) {
  if (offsets_.size() != carrier_.grid().cell_count() + 1 || offsets_.back() != targets_.size()) {
    throw Error(ErrorCode::InvalidArgument, "inconsistent restricted adjacency");
  }
}

BoxSet RestrictedGraph::image(const BoxSet& set) const {
  std::vector<char> hit(grid().cell_count(), 0);
  for (CellId id : set.ids()) {
    for (CellId t : targets(id)) hit[t] = 1;
  }
  return BoxSet::from_mask(grid_ptr(), hit);
}

BoxSet RestrictedGraph::forward_reach(const BoxSet& set) const {
  const auto allowed = carrier_.mask();
  std::vector<char> seen(grid().cell_count(), 0);
  std::vector<CellId> stack;
  for (CellId id : set.ids()) {
    if (allowed[id] && !seen[id]) {
      seen[id] = 1;
      stack.push_back(id);
    }
  }
  while (!stack.empty()) {
    const CellId v = stack.back();
    stack.pop_back();
    for (CellId t : targets(v)) {
      if (!seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
    }
  }
  return BoxSet::from_mask(grid_ptr(), seen);
}

bool operator==(const RestrictedGraph& a, const RestrictedGraph& b) {
  return a.carrier_ == b.carrier_ && a.offsets_ == b.offsets_ && a.targets_ == b.targets_ && a.tau_ == b.tau_ &&
         a.params_.lambda == b.params_.lambda && a.transposed_ == b.transposed_;
}

namespace {

template <typename Targets>
RestrictedGraph filter(const BoxSet& carrier, Targets&& targets_of, double tau, const Params& params,
                       bool transposed) {
  const auto n = carrier.grid().cell_count();
  const auto in = carrier.mask();
  std::vector<std::uint64_t> offsets(n + 1, 0);
  std::vector<CellId> targets;
  for (CellId v = 0; v < n; ++v) {
    if (in[v]) {
      for (CellId t : targets_of(v)) {
        if (in[t]) targets.push_back(t);
      }
    }
    offsets[v + 1] = targets.size();
  }
  return RestrictedGraph(carrier, std::move(offsets), std::move(targets), tau, params, transposed);
}

// Iterative Tarjan over the subgraph induced by `in`; marks cells of
// non-trivial components and cells with a self-loop.
std::vector<char> cyclic_mask(const RestrictedGraph& g, const std::vector<char>& in) {
  const auto n = g.grid().cell_count();
  constexpr std::uint64_t kUnvisited = ~std::uint64_t{0};
  std::vector<std::uint64_t> index(n, kUnvisited);
  std::vector<std::uint64_t> low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<char> cyclic(n, 0);
  std::vector<CellId> scc_stack;
  struct Frame {
    CellId v;
    std::size_t next;
  };
  std::vector<Frame> call;
  std::uint64_t counter = 0;

  for (CellId root = 0; root < n; ++root) {
    if (!in[root] || index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    scc_stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto succ = g.targets(f.v);
      if (f.next < succ.size()) {
        const CellId w = succ[f.next++];
        if (!in[w]) continue;
        if (w == f.v) cyclic[w] = 1;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          scc_stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const CellId v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::size_t size = 0;
        const std::size_t top = scc_stack.size();
        while (true) {
          const CellId w = scc_stack[top - 1 - size];
          ++size;
          if (w == v) break;
        }
        for (std::size_t i = 0; i < size; ++i) {
          const CellId w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = 0;
          if (size > 1) cyclic[w] = 1;
        }
      }
    }
  }
  return cyclic;
}

// Marks everything reachable from the seeds within `in`, following
// out-edges (forward) or in-edges given as a reversed CSR.
void flood(const std::vector<std::uint64_t>& offsets, const std::vector<CellId>& targets,
           const std::vector<char>& in, std::vector<char>& mark) {
  std::vector<CellId> stack;
  for (CellId v = 0; v < mark.size(); ++v) {
    if (mark[v]) stack.push_back(v);
  }
  while (!stack.empty()) {
    const CellId v = stack.back();
    stack.pop_back();
    for (std::uint64_t e = offsets[v]; e < offsets[v + 1]; ++e) {
      const CellId t = targets[e];
      if (in[t] && !mark[t]) {
        mark[t] = 1;
        stack.push_back(t);
      }
    }
  }
}

std::vector<char> carrier_and(const RestrictedGraph& g, const BoxSet& set) {
  auto m = set.mask();
  const auto c = g.carrier().mask();
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = m[i] && c[i];
  return m;
}

}  // namespace

RestrictedGraph restrict(const BoxMapGraph& graph, const BoxSet& carrier) {
  if (!(carrier.grid() == graph.grid())) throw Error(ErrorCode::InvalidArgument, "carrier lives on another grid");
  return filter(carrier, [&](CellId v) { return graph.targets(v); }, graph.tau(), graph.params(),
                graph.transposed());
}

RestrictedGraph restrict(const RestrictedGraph& graph, const BoxSet& carrier) {
  const BoxSet inner = carrier.intersect(graph.carrier());
  return filter(inner, [&](CellId v) { return graph.targets(v); }, graph.tau(), graph.params(), graph.transposed());
}

RestrictedGraph transpose(const RestrictedGraph& graph) {
  const auto n = graph.grid().cell_count();
  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (CellId t : graph.all_targets()) ++offsets[t + 1];
  for (std::uint64_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  std::vector<CellId> targets(graph.edge_count());
  std::vector<std::uint64_t> fill(offsets.begin(), offsets.end() - 1);
  for (CellId src = 0; src < n; ++src) {
    for (CellId dst : graph.targets(src)) targets[fill[dst]++] = src;
  }
  return RestrictedGraph(graph.carrier(), std::move(offsets), std::move(targets), graph.tau(), graph.params(),
                         !graph.transposed());
}

BoxSet recurrent_cells(const RestrictedGraph& graph, const BoxSet& within) {
  return BoxSet::from_mask(graph.grid_ptr(), cyclic_mask(graph, carrier_and(graph, within)));
}

BoxSet invariant_part(const RestrictedGraph& graph, const BoxSet& n) {
  const auto in = carrier_and(graph, n);
  const auto cyclic = cyclic_mask(graph, in);
  std::vector<char> fwd = cyclic;
  flood(graph.offsets(), graph.all_targets(), in, fwd);
  const RestrictedGraph rev = transpose(graph);
  std::vector<char> bwd = cyclic;
  flood(rev.offsets(), rev.all_targets(), in, bwd);
  for (std::size_t i = 0; i < fwd.size(); ++i) fwd[i] = fwd[i] && bwd[i];
  return BoxSet::from_mask(graph.grid_ptr(), fwd);
}

BoxSet invariant_part(const BoxMapGraph& graph, const BoxSet& n) { return invariant_part(restrict(graph, n), n); }

BoxSet omega_limit(const RestrictedGraph& graph, const BoxSet& u) {
  return invariant_part(graph, graph.forward_reach(u));
}

BoxSet alpha_limit(const RestrictedGraph& graph, const BoxSet& u) { return omega_limit(transpose(graph), u); }

IsolationCertificate is_isolating(const BoxMapGraph& graph, const BoxSet& n) {
  IsolationCertificate cert{n, invariant_part(graph, n), false, graph.params().lambda};
  // Cells beyond the domain never belong to N, so Inv(N) may not touch the domain boundary either.
  const Grid& grid = graph.grid();
  cert.moat_verified = cert.inv.dilate(1).subset_of(n) &&
                       std::none_of(cert.inv.ids().begin(), cert.inv.ids().end(),
                                    [&](CellId id) { return grid.on_boundary(id); });
  return cert;
}

std::uint64_t default_k_max(const RestrictedGraph& graph) {
  return std::max<std::uint64_t>(1, 4 * graph.carrier().size());
}

namespace {

BoxSet iterate_image(const RestrictedGraph& graph, BoxSet set, std::uint64_t k) {
  for (std::uint64_t i = 0; i < k; ++i) set = graph.image(set);
  return set;
}

}  // namespace

std::optional<AttractorCertificate> attractor_from(const RestrictedGraph& graph, const BoxSet& u,
                                                   std::uint64_t k_max) {
  if (k_max == 0) k_max = default_k_max(graph);
  const BoxSet& carrier = graph.carrier();
  const BoxSet base = u.intersect(carrier);
  const BoxSet closure = base.dilate_within(carrier);
  const BoxSet interior = base.erode_within(carrier);
  BoxSet current = closure;
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    BoxSet next = graph.image(current);
    if (next.subset_of(interior)) {
      BoxSet a = omega_limit(graph, base);
      if (!a.subset_of(interior)) return std::nullopt;
      return AttractorCertificate{std::move(a), k};
    }
    if (next == current) return std::nullopt;
    current = std::move(next);
  }
  return std::nullopt;
}

BoxSet dual_repeller(const RestrictedGraph& graph, const BoxSet& u, std::uint64_t k_star) {
  const BoxSet& carrier = graph.carrier();
  const BoxSet base = u.intersect(carrier);
  if (k_star == 0 ||
      !iterate_image(graph, base.dilate_within(carrier), k_star).subset_of(base.erode_within(carrier))) {
    throw Error(ErrorCode::PreconditionViolated, "no attractor certificate for U at k* = " + std::to_string(k_star));
  }
  const BoxSet w = graph.forward_reach(iterate_image(graph, base, k_star));
  return invariant_part(graph, carrier.minus(w));
}

ConnectionCheck check_connection(const RestrictedGraph& graph, const BoxSet& a, const BoxSet& r, const BoxSet& c,
                                 std::size_t slack) {
  ConnectionCheck check{false, false, BoxSet(graph.grid_ptr()), BoxSet(graph.grid_ptr())};
  const BoxSet& carrier = graph.carrier();
  const BoxSet downstream = graph.forward_reach(c);
  check.forward_stray = recurrent_cells(graph, downstream).minus(a.dilate_within(carrier, slack));
  check.forward_ok = check.forward_stray.empty();
  const RestrictedGraph rev = transpose(graph);
  const BoxSet upstream = rev.forward_reach(c);
  check.backward_stray = recurrent_cells(rev, upstream).minus(r.dilate_within(carrier, slack));
  check.backward_ok = check.backward_stray.empty();
  return check;
}

ARDecomposition decompose(const RestrictedGraph& graph, const BoxSet& u, const DecomposeOptions& options) {
  const BoxSet& s = graph.carrier();
  const BoxSet base = u.intersect(s);
  auto att = attractor_from(graph, base, options.k_max);
  if (!att) throw Error(ErrorCode::NoAttractor, "attractor rule fails for U within the step bound");
  ARDecomposition d{s, att->a, dual_repeller(graph, base, att->k_star), BoxSet(graph.grid_ptr()), base,
                    BoxSet(graph.grid_ptr()), att->k_star,
                    ConnectionCheck{false, false, BoxSet(graph.grid_ptr()), BoxSet(graph.grid_ptr())}};
  d.w = graph.forward_reach(iterate_image(graph, base, att->k_star));
  if (!d.a.intersect(d.r).empty()) {
    throw Error(ErrorCode::DecompositionInconsistent, "attractor and dual repeller overlap");
  }
  d.c = s.minus(d.a.unite(d.r));
  d.connection = check_connection(graph, d.a, d.r, d.c, options.slack);
  if (!d.connection.forward_ok || !d.connection.backward_ok) {
    std::ostringstream msg;
    msg << "connecting region reaches recurrent cells outside the " << options.slack << "-cell slack ("
        << d.connection.forward_stray.size() << " forward, " << d.connection.backward_stray.size()
        << " backward); refine the grid";
    throw Error(ErrorCode::DecompositionInconsistent, msg.str());
  }
  return d;
}

ARDecomposition sharpen(const MapConfig& cfg, ARDecomposition d, const SharpenOptions& options) {
  if (options.horizon <= 0.0) return d;
  // Attractors contract forward and repellers backward; the opposite
  // direction spreads the images and rarely removes anything.
  SharpenOptions attractor = options;
  attractor.backward = false;
  SharpenOptions repeller = options;
  repeller.forward = false;
  d.a = sharpen_invariant(cfg, d.a, attractor);
  d.r = sharpen_invariant(cfg, d.r, repeller);
  d.c = d.s.minus(d.a.unite(d.r));
  return d;
}

void write_boxset(std::ostream& os, const BoxSet& set) {
  os << "# grid";
  for (auto s : set.grid().subdivisions()) os << ' ' << s;
  os << '\n';
  for (CellId id : set.ids()) os << id << '\n';
}

BoxSet read_boxset(std::istream& is, std::shared_ptr<const Grid> grid) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# grid", 0) != 0) throw Error(ErrorCode::Io, "missing '# grid' header");
  std::istringstream head(line.substr(6));
  std::vector<std::uint64_t> subdiv;
  for (std::uint64_t s; head >> s;) subdiv.push_back(s);
  if (subdiv != grid->subdivisions()) throw Error(ErrorCode::Io, "box set header does not match the grid");
  std::vector<CellId> ids;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t used = 0;
    try {
      ids.push_back(std::stoull(line, &used));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Io, "bad cell id '" + line + "'");
    }
  }
  return BoxSet(std::move(grid), std::move(ids));
}

void write_boxset_table(std::ostream& os, const BoxSet& set) {
  const Grid& g = set.grid();
  os << "id";
  for (std::size_t i = 0; i < g.dim(); ++i) os << "\tlo" << i + 1;
  for (std::size_t i = 0; i < g.dim(); ++i) os << "\thi" << i + 1;
  os << '\n';
  for (CellId id : set.ids()) {
    const IntervalVector b = g.cell_box(id);
    os << id;
    for (std::size_t i = 0; i < g.dim(); ++i) os << '\t' << format_double(b[i].lo());
    for (std::size_t i = 0; i < g.dim(); ++i) os << '\t' << format_double(b[i].hi());
    os << '\n';
  }
}

}  // namespace arcert

#include "arcert/boxmap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "parallel.hpp"

namespace arcert {

namespace {

constexpr int kMaxInflations = 50;
constexpr double kInflateFactor = 1.1;
constexpr double kInflateAbs = 1e-12;

IntervalVector signed_hull(const PiecewiseInclusion& inclusion, const IntervalVector& box, const Params& params,
                           TimeDirection dir) {
  IntervalVector f = inclusion.evaluate_hull(box, params);
  if (dir == TimeDirection::Backward) {
    for (std::size_t i = 0; i < f.dim(); ++i) f[i] = -f[i];
  }
  return f;
}

// box + t * f, componentwise, for t an interval of times.
IntervalVector advance(const IntervalVector& box, const Interval& t, const IntervalVector& f) {
  IntervalVector r(box.dim());
  for (std::size_t i = 0; i < box.dim(); ++i) r[i] = box[i] + t * f[i];
  return r;
}

}  // namespace

IntervalVector a_priori_enclosure(const IntervalVector& box, double h, const PiecewiseInclusion& inclusion,
                                  const Params& params, TimeDirection dir) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  const IntervalVector& domain = inclusion.domain();
  if (!domain.contains(box)) throw Error(ErrorCode::InvalidArgument, "enclosure start box must lie in the domain");
  const Interval span(0.0, h);

  IntervalVector b = advance(box, span, signed_hull(inclusion, box, params, dir));
  for (int round = 0; round < kMaxInflations; ++round) {
    const IntervalVector trial = advance(box, span, signed_hull(inclusion, intersect(b, domain), params, dir));
    if (b.contains(trial)) return trial;
    IntervalVector grown = hull(b, trial);
    for (std::size_t i = 0; i < grown.dim(); ++i) grown[i] = grown[i].inflate(kInflateFactor, kInflateAbs);
    b = std::move(grown);
  }
  std::ostringstream msg;
  msg << "a-priori enclosure did not converge for " << box << " with step " << h;
  throw Error(ErrorCode::NoEnclosure, msg.str());
}

EnclosureStep enclosure_step(const IntervalVector& box, double h, const PiecewiseInclusion& inclusion,
                             const Params& params, TimeDirection dir) {
  EnclosureStep step;
  step.enclosure = a_priori_enclosure(box, h, inclusion, params, dir);
  const IntervalVector f = signed_hull(inclusion, intersect(step.enclosure, inclusion.domain()), params, dir);
  step.image = advance(box, Interval(h), f);
  step.exited = !inclusion.domain().contains(step.image);
  return step;
}

namespace {

IntervalVector sub_box(const IntervalVector& box, const std::vector<unsigned>& k, unsigned parts) {
  IntervalVector sub(box.dim());
  for (std::size_t i = 0; i < box.dim(); ++i) {
    const double lo = box[i].lo();
    const double hi = box[i].hi();
    const double a = k[i] == 0 ? lo : lo + (hi - lo) * (static_cast<double>(k[i]) / parts);
    const double b = k[i] + 1 == parts ? hi : lo + (hi - lo) * (static_cast<double>(k[i] + 1) / parts);
    sub[i] = Interval(a, b);
  }
  return sub;
}

// Box scheme; returns the clipped final box, or an empty box when every
// solution has left the domain.
IntervalVector box_flow(IntervalVector cur, double horizon, unsigned steps, const MapConfig& cfg, TimeDirection dir,
                        bool& exited) {
  const double h = horizon / steps;
  const IntervalVector& domain = cfg.inclusion->domain();
  for (unsigned s = 0; s < steps; ++s) {
    EnclosureStep step = enclosure_step(cur, h, *cfg.inclusion, cfg.params, dir);
    if (step.exited) exited = true;
    cur = intersect(step.image, domain);
    if (cur.is_empty()) break;
  }
  return cur;
}

struct Ball {
  std::vector<double> center;
  double radius = 0.0;

  IntervalVector bounds() const {
    IntervalVector b(center.size());
    for (std::size_t i = 0; i < center.size(); ++i) {
      b[i] = Interval(rounding::sub_down(center[i], radius), rounding::add_up(center[i], radius));
    }
    return b;
  }
};

// Upper bound of the 2-norm logarithmic norm over an interval matrix:
// Gershgorin on the symmetric part.
double log_norm_bound(const std::vector<Interval>& j, std::size_t n) {
  double mu = -rounding::kInf;
  for (std::size_t i = 0; i < n; ++i) {
    double row = j[i * n + i].hi();
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const Interval sym = (j[i * n + k] + j[k * n + i]) * Interval(0.5);
      row = rounding::add_up(row, sym.mag());
    }
    mu = std::max(mu, row);
  }
  return mu;
}

double exp_up(double x) { return rounding::next_up(rounding::next_up(std::exp(x))); }

// Ball scheme over the whole horizon; false when it cannot certify a step.
bool ball_flow(Ball& ball, double horizon, unsigned steps, const MapConfig& cfg, TimeDirection dir) {
  const PiecewiseInclusion& inc = *cfg.inclusion;
  const IntervalVector& domain = inc.domain();
  const std::size_t n = domain.dim();
  const double h = horizon / steps;
  const Interval hi(h);
  const Interval half_h2 = Interval(h) * Interval(h) * Interval(0.5);
  const double sign = dir == TimeDirection::Backward ? -1.0 : 1.0;
  for (unsigned s = 0; s < steps; ++s) {
    const IntervalVector start = ball.bounds();
    if (!domain.contains(start)) return false;
    IntervalVector b;
    try {
      b = a_priori_enclosure(start, h, inc, cfg.params, dir);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoEnclosure) return false;
      throw;
    }
    if (!domain.contains(b)) return false;
    const auto piece = inc.sole_piece(b);
    if (!piece || !inc.has_point_state_coefficients(*piece)) return false;

    IntervalVector fb = inc.evaluate_piece(*piece, b, cfg.params);
    IntervalVector fc = inc.evaluate_piece(*piece, IntervalVector::point(ball.center), cfg.params);
    std::vector<Interval> jac = inc.jacobian_hull(*piece, b, cfg.params);
    if (sign < 0) {
      for (std::size_t i = 0; i < n; ++i) {
        fb[i] = -fb[i];
        fc[i] = -fc[i];
      }
      for (auto& v : jac) v = -v;
    }
    const double mu = log_norm_bound(jac, n);
    std::vector<double> next(n);
    double spread2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Interval jf(0.0);
      for (std::size_t k = 0; k < n; ++k) jf += jac[i * n + k] * fb[k];
      const Interval e = Interval(ball.center[i]) + hi * fc[i] + half_h2 * jf;
      next[i] = e.mid();
      const double d = std::max(rounding::sub_up(next[i], e.lo()), rounding::sub_up(e.hi(), next[i]));
      spread2 = rounding::add_up(spread2, rounding::mul_up(d, d));
    }
    const double grown = rounding::mul_up(ball.radius, exp_up(rounding::mul_up(mu, h)));
    ball.center = std::move(next);
    ball.radius = rounding::add_up(grown, rounding::next_up(std::sqrt(spread2)));
  }
  return domain.contains(ball.bounds());
}

// Grid cells meeting a closed ball.
void cells_in_ball(const Grid& grid, const Ball& ball, std::vector<CellId>& out) {
  for (CellId id : grid.cells_meeting(ball.bounds())) {
    const IntervalVector c = grid.cell_box(id);
    Interval d2(0.0);
    for (std::size_t i = 0; i < c.dim(); ++i) {
      const double x = ball.center[i];
      double gap = 0.0;
      if (x < c[i].lo()) gap = c[i].lo() - x;
      if (x > c[i].hi()) gap = x - c[i].hi();
      d2 += Interval(gap).pow(2);
    }
    // Keep the cell unless it is certainly farther than the radius (with a
    // generous margin for the rounding of the gaps).
    if (d2.lo() <= rounding::mul_up(rounding::mul_up(ball.radius, ball.radius), 1.0 + 1e-12)) out.push_back(id);
  }
}

void compact(std::vector<CellId>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

}  // namespace

CellImage flow_image(const IntervalVector& box, double horizon, const MapConfig& cfg, TimeDirection dir) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  const unsigned steps = std::max(1u, cfg.options.substeps);
  const unsigned parts = std::max(1u, cfg.options.subdivide);
  const std::size_t n = box.dim();

  CellImage out;
  std::vector<unsigned> k(n, 0);
  for (;;) {
    const IntervalVector sub = sub_box(box, k, parts);
    bool done = false;
    if (cfg.options.method == Integrator::Ball) {
      Ball ball{sub.midpoint(), 0.0};
      double r2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::max(rounding::sub_up(ball.center[i], sub[i].lo()),
                                  rounding::sub_up(sub[i].hi(), ball.center[i]));
        r2 = rounding::add_up(r2, rounding::mul_up(d, d));
      }
      ball.radius = rounding::next_up(std::sqrt(r2));
      if (ball_flow(ball, horizon, steps, cfg, dir)) {
        cells_in_ball(*cfg.grid, ball, out.targets);
        done = true;
      }
    }
    if (!done) {
      const IntervalVector end = box_flow(sub, horizon, steps, cfg, dir, out.exited);
      if (!end.is_empty()) {
        const auto hit = cfg.grid->cells_overlapping(end);
        out.targets.insert(out.targets.end(), hit.begin(), hit.end());
      }
    }
    if (out.targets.size() > 4 * cfg.grid->cell_count()) compact(out.targets);
    std::size_t axis = 0;
    while (axis < n && k[axis] + 1 == parts) k[axis++] = 0;
    if (axis == n) break;
    ++k[axis];
  }
  compact(out.targets);
  return out;
}

CellImage image_boxes(CellId cell, const MapConfig& cfg) {
  if (cell >= cfg.grid->cell_count()) throw Error(ErrorCode::InvalidArgument, "cell id outside the grid");
  if (!(cfg.tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
  return flow_image(cfg.grid->cell_box(cell), cfg.tau, cfg);
}

double default_tau(const Grid& grid, const PiecewiseInclusion& inclusion, const Params& params) {
  const IntervalVector f = inclusion.evaluate_hull(inclusion.domain(), params);
  double m = 0.0;
  for (const auto& fi : f) m = std::max(m, fi.mag());
  if (m == 0.0) return 1.0;
  return grid.min_cell_width() / (2.0 * m);
}

BoxMapGraph::BoxMapGraph(std::shared_ptr<const Grid> grid, double tau, Params params,
                         std::vector<std::uint64_t> offsets, std::vector<CellId> targets,
                         std::vector<char> boundary_flags, bool transposed)
    : grid_(std::move(grid)),
      tau_(tau),
      params_(params),
      offsets_(std::move(offsets)),
      targets_(std::move(targets)),
      flags_(std::move(boundary_flags)),
      transposed_(transposed) {
  const auto n = grid_->cell_count();
  if (offsets_.size() != n + 1 || flags_.size() != n || offsets_.front() != 0 || offsets_.back() != targets_.size()) {
    throw Error(ErrorCode::InvalidArgument, "inconsistent graph adjacency");
  }
  for (CellId t : targets_) {
    if (t >= n) throw Error(ErrorCode::InvalidArgument, "edge target outside the grid");
  }
}

BoxSet BoxMapGraph::flagged_cells() const { return BoxSet::from_mask(grid_, flags_); }

bool operator==(const BoxMapGraph& a, const BoxMapGraph& b) {
  return a.grid() == b.grid() && a.tau_ == b.tau_ && a.params_.lambda == b.params_.lambda &&
         a.offsets_ == b.offsets_ && a.targets_ == b.targets_ && a.flags_ == b.flags_ &&
         a.transposed_ == b.transposed_;
}

BoxMapGraph build_graph(const MapConfig& cfg) {
  if (!cfg.grid || !cfg.inclusion) throw Error(ErrorCode::InvalidArgument, "map config needs a grid and an inclusion");
  if (!(cfg.tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
  if (!(cfg.grid->domain() == cfg.inclusion->domain())) {
    throw Error(ErrorCode::InvalidArgument, "grid must cover the inclusion domain");
  }
  const auto n = cfg.grid->cell_count();
  std::vector<CellImage> images(n);
  detail::parallel_for(
      n, cfg.options.threads, [&](std::size_t i) { images[i] = image_boxes(i, cfg); },
      [](std::size_t i, std::exception_ptr e) {
        try {
          std::rethrow_exception(e);
        } catch (const Error& err) {
          throw Error(err.code(), "cell " + std::to_string(i) + ": " + err.what());
        }
      });

  std::vector<std::uint64_t> offsets(n + 1, 0);
  std::vector<char> flags(n, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    offsets[i + 1] = offsets[i] + images[i].targets.size();
    flags[i] = images[i].exited ? 1 : 0;
  }
  std::vector<CellId> targets;
  targets.reserve(offsets[n]);
  for (auto& img : images) targets.insert(targets.end(), img.targets.begin(), img.targets.end());
  return BoxMapGraph(cfg.grid, cfg.tau, cfg.params, std::move(offsets), std::move(targets), std::move(flags));
}

BoxMapGraph transpose(const BoxMapGraph& graph) {
  const auto n = graph.cell_count();
  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (CellId t : graph.all_targets()) ++offsets[t + 1];
  for (std::uint64_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  std::vector<CellId> targets(graph.edge_count());
  std::vector<std::uint64_t> fill(offsets.begin(), offsets.end() - 1);
  // Sources are visited in increasing order, so every reversed list comes out sorted.
  for (CellId src = 0; src < n; ++src) {
    for (CellId dst : graph.targets(src)) targets[fill[dst]++] = src;
  }
  return BoxMapGraph(graph.grid_ptr(), graph.tau(), graph.params(), std::move(offsets), std::move(targets),
                     graph.flags(), !graph.transposed());
}

namespace {

BoxSet sharpen_stage(const MapConfig& cfg, const BoxSet& set, const SharpenOptions& options,
                     const IntegrationOptions& stage) {
  MapConfig local = cfg;
  local.options = stage;
  if (local.options.threads == 0) local.options.threads = cfg.options.threads;

  const auto& ids = set.ids();
  std::vector<CellImage> fwd(options.forward ? ids.size() : 0);
  std::vector<CellImage> bwd(options.backward ? ids.size() : 0);
  detail::parallel_for(
      ids.size(), local.options.threads,
      [&](std::size_t i) {
        const IntervalVector box = cfg.grid->cell_box(ids[i]);
        if (options.forward) fwd[i] = flow_image(box, options.horizon, local, TimeDirection::Forward);
        if (options.backward) bwd[i] = flow_image(box, options.horizon, local, TimeDirection::Backward);
      },
      [&](std::size_t i, std::exception_ptr e) {
        try {
          std::rethrow_exception(e);
        } catch (const Error& err) {
          throw Error(err.code(), "sharpening cell " + std::to_string(ids[i]) + ": " + err.what());
        }
      });

  std::vector<char> alive = set.mask();
  for (unsigned round = 0; round < options.max_rounds; ++round) {
    std::vector<char> hit_f(alive.size(), 0);
    std::vector<char> hit_b(alive.size(), 0);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!alive[ids[i]]) continue;
      if (options.forward) {
        for (CellId t : fwd[i].targets) hit_f[t] = 1;
      }
      if (options.backward) {
        for (CellId t : bwd[i].targets) hit_b[t] = 1;
      }
    }
    bool changed = false;
    for (CellId id : ids) {
      if (alive[id] && ((options.forward && !hit_f[id]) || (options.backward && !hit_b[id]))) {
        alive[id] = 0;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return BoxSet::from_mask(set.grid_ptr(), alive);
}

}  // namespace

BoxSet sharpen_invariant(const MapConfig& cfg, const BoxSet& set, const SharpenOptions& options) {
  if (options.horizon <= 0.0 || (!options.forward && !options.backward)) return set;
  BoxSet current = set;
  for (const auto& stage : options.stages) {
    if (current.empty()) break;
    current = sharpen_stage(cfg, current, options, stage);
  }
  return current;
}

void write_edge_list(std::ostream& os, const BoxMapGraph& graph) {
  os << "# cells " << graph.cell_count() << '\n';
  os << "# tau " << format_double(graph.tau()) << '\n';
  os << (graph.transposed() ? "# entry" : "# exit");
  for (CellId i = 0; i < graph.cell_count(); ++i) {
    if (graph.boundary_flag(i)) os << ' ' << i;
  }
  os << '\n';
  for (CellId i = 0; i < graph.cell_count(); ++i) {
    for (CellId t : graph.targets(i)) os << i << ' ' << t << '\n';
  }
}

namespace {

constexpr char kMagic[8] = {'A', 'R', 'C', 'G', 'R', 'A', 'P', 'H'};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error(ErrorCode::Io, "truncated binary graph");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_binary(std::ostream& os, const BoxMapGraph& graph) {
  const Grid& g = graph.grid();
  os.write(kMagic, 8);
  put_u64(os, 1);
  put_u64(os, g.dim());
  for (auto s : g.subdivisions()) put_u64(os, s);
  for (std::size_t i = 0; i < g.dim(); ++i) put_f64(os, g.domain()[i].lo());
  for (std::size_t i = 0; i < g.dim(); ++i) put_f64(os, g.domain()[i].hi());
  put_f64(os, graph.tau());
  put_f64(os, graph.params().lambda.lo());
  put_f64(os, graph.params().lambda.hi());
  put_u64(os, graph.transposed() ? 1 : 0);
  put_u64(os, graph.cell_count());
  for (CellId i = 0; i < graph.cell_count(); ++i) {
    put_u64(os, graph.boundary_flag(i) ? 1 : 0);
    const auto t = graph.targets(i);
    put_u64(os, t.size());
    for (CellId c : t) put_u64(os, c);
  }
}

BoxMapGraph read_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw Error(ErrorCode::Io, "not a binary box-map graph");
  if (get_u64(is) != 1) throw Error(ErrorCode::Io, "unsupported binary graph version");
  const auto dim = get_u64(is);
  if (dim == 0 || dim > Polynomial::kMaxStateDim) throw Error(ErrorCode::Io, "bad dimension in binary graph");
  std::vector<std::uint64_t> subdiv(dim);
  for (auto& s : subdiv) s = get_u64(is);
  std::vector<double> lo(dim), hi(dim);
  for (auto& v : lo) v = get_f64(is);
  for (auto& v : hi) v = get_f64(is);
  const double tau = get_f64(is);
  const double llo = get_f64(is);
  const double lhi = get_f64(is);
  const bool transposed = get_u64(is) != 0;
  auto grid = std::make_shared<const Grid>(IntervalVector::from_bounds(lo, hi), subdiv);
  const auto n = get_u64(is);
  if (n != grid->cell_count()) throw Error(ErrorCode::Io, "cell count does not match the grid");
  std::vector<std::uint64_t> offsets(n + 1, 0);
  std::vector<char> flags(n, 0);
  std::vector<CellId> targets;
  for (CellId i = 0; i < n; ++i) {
    flags[i] = get_u64(is) ? 1 : 0;
    const auto k = get_u64(is);
    if (k > n) throw Error(ErrorCode::Io, "corrupt adjacency list length");
    for (std::uint64_t j = 0; j < k; ++j) targets.push_back(get_u64(is));
    offsets[i + 1] = targets.size();
  }
  return BoxMapGraph(std::move(grid), tau, Params{Interval(llo, lhi)}, std::move(offsets), std::move(targets),
                     std::move(flags), transposed);
}

}  // namespace arcert

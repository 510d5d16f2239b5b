#include "arcert/continuation.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace arcert {

void SweepPlan::validate() const {
  if (!grid || !inclusion) throw Error(ErrorCode::ValidationError, "sweep needs a grid and an inclusion");
  if (!(tau > 0.0)) throw Error(ErrorCode::ValidationError, "tau must be positive");
  if (lambdas.empty()) throw Error(ErrorCode::ValidationError, "sweep needs at least one lambda sample");
  const Interval& family = inclusion->lambda_range();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!family.contains(lambdas[i])) {
      throw Error(ErrorCode::ValidationError, "lambda sample " + format_double(lambdas[i]) + " outside the family interval");
    }
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) {
      throw Error(ErrorCode::ValidationError, "lambda samples must be strictly increasing");
    }
  }
  bool anchor_found = false;
  for (double l : lambdas) anchor_found = anchor_found || l == anchor;
  if (!anchor_found) throw Error(ErrorCode::ValidationError, "anchor " + format_double(anchor) + " is not a sample");
  if (!(n.grid() == *grid)) throw Error(ErrorCode::ValidationError, "N lives on another grid");
  if (n_a && !n_a->subset_of(n)) throw Error(ErrorCode::ValidationError, "N_A must lie inside N");
  if (n_r && !n_r->subset_of(n)) throw Error(ErrorCode::ValidationError, "N_R must lie inside N");
}

const char* to_string(DecompositionStatus status) {
  switch (status) {
    case DecompositionStatus::NotRun:
      return "not-run";
    case DecompositionStatus::Ok:
      return "ok";
    case DecompositionStatus::ContinuedToEmpty:
      return "continued-to-empty";
    case DecompositionStatus::Breakdown:
      return "breakdown";
  }
  return "unknown";
}

bool LambdaRecord::isolating() const {
  return iso_n.moat_verified && (!iso_a || iso_a->moat_verified) && (!iso_r || iso_r->moat_verified);
}

bool LambdaRecord::partition_ok() const {
  if (!decomposition) return true;
  const ARDecomposition& d = *decomposition;
  return d.a.intersect(d.r).empty() && d.a.intersect(d.c).empty() && d.r.intersect(d.c).empty() &&
         d.a.unite(d.r).unite(d.c) == d.s;
}

namespace {

void decompose_into(LambdaRecord& rec, const BoxMapGraph& graph, const MapConfig& cfg, const SweepPlan& plan,
                    const BoxSet& u) {
  const BoxSet& s = rec.s();
  if (s.empty()) {
    const BoxSet none(plan.grid);
    rec.decomposition = ARDecomposition{s, none, none, none, u.intersect(s), none, 0,
                                        ConnectionCheck{true, true, none, none}};
    rec.status = DecompositionStatus::ContinuedToEmpty;
    return;
  }
  const RestrictedGraph rg = restrict(graph, s);
  try {
    rec.decomposition = sharpen(cfg, decompose(rg, u, plan.decompose), plan.sharpen);
    rec.status = rec.partition_ok() ? DecompositionStatus::Ok : DecompositionStatus::Breakdown;
    if (rec.status == DecompositionStatus::Breakdown) rec.failure = "partition: A, R, C do not partition S";
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoAttractor) {
      rec.failure = std::string("attractor rule: ") + e.what();
    } else if (e.code() == ErrorCode::DecompositionInconsistent) {
      rec.failure = std::string("connection check: ") + e.what();
    } else {
      throw;
    }
    rec.status = DecompositionStatus::Breakdown;
  }
}

std::string lambda_text(const Interval& l) {
  if (l.is_point()) return format_double(l.lo());
  return "[" + format_double(l.lo()) + ", " + format_double(l.hi()) + "]";
}

std::vector<Params> sweep_params(const SweepPlan& plan, std::size_t& anchor_index) {
  std::vector<Params> out;
  const auto& l = plan.lambdas;
  if (plan.mode == SweepMode::Interval && l.size() > 1) {
    anchor_index = l.size();
    for (std::size_t i = 0; i + 1 < l.size(); ++i) {
      out.push_back(Params::over(l[i], l[i + 1]));
      if (anchor_index == l.size() && l[i] <= plan.anchor && plan.anchor <= l[i + 1]) anchor_index = i;
    }
  } else {
    for (std::size_t i = 0; i < l.size(); ++i) {
      out.push_back(Params::at(l[i]));
      if (l[i] == plan.anchor) anchor_index = i;
    }
  }
  return out;
}

void mark_run(SweepReport& report) {
  const std::size_t a = report.anchor_index;
  if (!report.records[a].isolating()) {
    report.run_begin = report.run_end = a;
    return;
  }
  std::size_t b = a;
  while (b > 0 && report.records[b - 1].isolating()) --b;
  std::size_t e = a + 1;
  while (e < report.records.size() && report.records[e].isolating()) ++e;
  report.run_begin = b;
  report.run_end = e;
}

SweepReport run_sweep(const SweepPlan& plan, const BoxSet* u) {
  plan.validate();
  SweepReport report;
  const auto params = sweep_params(plan, report.anchor_index);
  std::vector<std::optional<LambdaRecord>> records(params.size());
  // Anchor first, so an unusable anchor fails before the expensive samples.
  std::vector<std::size_t> order{report.anchor_index};
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i != report.anchor_index) order.push_back(i);
  }
  for (std::size_t i : order) {
    records[i] = analyze(plan, params[i], u);
    if (u && i == report.anchor_index) {
      const LambdaRecord& anchor = *records[i];
      if (!anchor.isolating()) {
        throw Error(ErrorCode::AnchorFailure, "isolation fails at the anchor lambda " + lambda_text(anchor.lambda));
      }
      if (anchor.status == DecompositionStatus::Breakdown) {
        throw Error(ErrorCode::AnchorFailure, "decomposition fails at the anchor lambda " +
                                                  lambda_text(anchor.lambda) + ": " + anchor.failure);
      }
    }
  }
  for (auto& rec : records) report.records.push_back(std::move(*rec));
  mark_run(report);
  const auto& anchor = report.records[report.anchor_index];
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    LambdaRecord& rec = report.records[i];
    if (!u) continue;
    if (!report.in_run(i)) {
      rec.decomposition.reset();
      rec.status = DecompositionStatus::NotRun;
      rec.failure.clear();
      continue;
    }
    if (rec.decomposition && anchor.decomposition && !rec.decomposition->a.empty() &&
        !anchor.decomposition->a.empty()) {
      rec.drift = box_hausdorff(rec.decomposition->a, anchor.decomposition->a);
    }
  }
  return report;
}

}  // namespace

LambdaRecord analyze(const SweepPlan& plan, const Params& params, const BoxSet* u) {
  const MapConfig cfg{plan.grid, plan.inclusion, params, plan.tau, plan.options};
  std::optional<BoxMapGraph> graph;
  try {
    graph.emplace(build_graph(cfg));
  } catch (const Error& e) {
    throw Error(e.code(), "lambda " + lambda_text(params.lambda) + ": " + e.what());
  }
  return analyze(plan, cfg, *graph, u);
}

LambdaRecord analyze(const SweepPlan& plan, const MapConfig& cfg, const BoxMapGraph& graph, const BoxSet* u) {
  LambdaRecord rec{cfg.params.lambda, is_isolating(graph, plan.n), std::nullopt, std::nullopt,
                   DecompositionStatus::NotRun, {}, std::nullopt, std::nullopt};
  if (plan.n_a) rec.iso_a = is_isolating(graph, *plan.n_a);
  if (plan.n_r) rec.iso_r = is_isolating(graph, *plan.n_r);
  if (u) decompose_into(rec, graph, cfg, plan, *u);
  return rec;
}

SweepReport sweep_isolating(const SweepPlan& plan) { return run_sweep(plan, nullptr); }

SweepReport continue_decomposition(const SweepPlan& plan, const BoxSet& u) { return run_sweep(plan, &u); }

bool semicontinuity_check(const SweepReport& report, double anchor, double slope) {
  const LambdaRecord* base = nullptr;
  for (const auto& rec : report.records) {
    if (rec.lambda.contains(anchor)) {
      base = &rec;
      break;
    }
  }
  if (!base) return false;
  for (std::size_t i = report.run_begin; i < report.run_end; ++i) {
    const LambdaRecord& rec = report.records[i];
    const double gap = std::max(std::fabs(rec.lambda.lo() - anchor), std::fabs(rec.lambda.hi() - anchor));
    const auto layers = 1 + static_cast<std::size_t>(std::ceil(slope * gap));
    if (!rec.s().subset_of(base->s().dilate(layers))) return false;
  }
  return true;
}

namespace {

const char* pass(bool ok) { return ok ? "pass" : "fail"; }

}  // namespace

void write_sweep_report(std::ostream& os, const SweepReport& report) {
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const LambdaRecord& r = report.records[i];
    os << "lambda " << lambda_text(r.lambda) << (i == report.anchor_index ? " (anchor)" : "")
       << (report.in_run(i) ? " verified" : "") << '\n';
    os << "  isolating N: " << pass(r.iso_n.moat_verified) << " |Inv(N)| = " << r.iso_n.inv.size() << '\n';
    if (r.iso_a) os << "  isolating N_A: " << pass(r.iso_a->moat_verified) << " |Inv| = " << r.iso_a->inv.size() << '\n';
    if (r.iso_r) os << "  isolating N_R: " << pass(r.iso_r->moat_verified) << " |Inv| = " << r.iso_r->inv.size() << '\n';
    os << "  decomposition: " << to_string(r.status);
    if (!r.failure.empty()) os << " (" << r.failure << ')';
    os << '\n';
    if (r.decomposition) {
      const ARDecomposition& d = *r.decomposition;
      os << "  |S| = " << d.s.size() << " |A| = " << d.a.size() << " |R| = " << d.r.size() << " |C| = " << d.c.size()
         << " k* = " << d.k_star << '\n';
    }
    if (r.drift) os << "  drift of A from anchor: " << format_double(*r.drift) << '\n';
  }
}

void write_sweep_table(std::ostream& os, const SweepReport& report) {
  os << "lambda_lo\tlambda_hi\tS\tA\tR\tC\tiso_N\tiso_NA\tiso_NR\tverified\tstatus\n";
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const LambdaRecord& r = report.records[i];
    auto size = [&](const BoxSet ARDecomposition::*m) -> std::string {
      return r.decomposition ? std::to_string(((*r.decomposition).*m).size()) : "-";
    };
    auto flag = [](const std::optional<IsolationCertificate>& c) -> std::string {
      return c ? (c->moat_verified ? "1" : "0") : "-";
    };
    os << format_double(r.lambda.lo()) << '\t' << format_double(r.lambda.hi()) << '\t' << r.s().size() << '\t'
       << size(&ARDecomposition::a) << '\t' << size(&ARDecomposition::r) << '\t' << size(&ARDecomposition::c) << '\t'
       << (r.iso_n.moat_verified ? 1 : 0) << '\t' << flag(r.iso_a) << '\t' << flag(r.iso_r) << '\t'
       << (report.in_run(i) ? 1 : 0) << '\t' << to_string(r.status) << '\n';
  }
}

}  // namespace arcert

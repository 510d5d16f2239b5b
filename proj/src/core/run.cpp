#include "arcert/run.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "arcert/dynamics.hpp"
#include "arcert/error.hpp"
#include "json.hpp"

namespace arcert {

const char* to_string(Command command) {
  switch (command) {
    case Command::BuildMap:
      return "build-map";
    case Command::Invariant:
      return "invariant";
    case Command::Isolate:
      return "isolate";
    case Command::Decompose:
      return "decompose";
    case Command::Sweep:
      return "sweep";
    case Command::Continue:
      return "continue";
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::BuildMap, Command::Invariant, Command::Isolate, Command::Decompose, Command::Sweep,
                    Command::Continue}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

json interval_json(const Interval& x) { return json::array({x.lo(), x.hi()}); }

json box_json(const IntervalVector& box) {
  if (box.is_empty()) return nullptr;
  json out = json::array();
  for (std::size_t i = 0; i < box.dim(); ++i) out.push_back(interval_json(box[i]));
  return out;
}

/// Collects every export in memory; nothing touches the disk until flush().
class Exports {
 public:
  void add(std::string path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }

  json set(const std::string& dir, const std::string& name, const BoxSet& s) {
    std::ostringstream ids;
    write_boxset(ids, s);
    std::ostringstream table;
    write_boxset_table(table, s);
    const std::string base = dir + name;
    add(base + ".txt", ids.str());
    add(base + ".tsv", table.str());
    return json{{"cells", s.size()}, {"bounding_box", box_json(s.bounding_box())}, {"file", base + ".txt"},
                {"table", base + ".tsv"}};
  }

  std::vector<std::string> flush(const std::string& out_dir) const {
    std::vector<std::string> written;
    for (const auto& [path, content] : files_) {
      written.push_back(path);
      if (out_dir.empty()) continue;
      const std::filesystem::path full = std::filesystem::path(out_dir) / path;
      std::error_code ec;
      std::filesystem::create_directories(full.parent_path(), ec);
      if (ec) throw Error(ErrorCode::Io, "cannot create directory " + full.parent_path().string() + ": " + ec.message());
      std::ofstream f(full, std::ios::binary);
      f << content;
      if (!f) throw Error(ErrorCode::Io, "cannot write " + full.string());
    }
    return written;
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

class Timer {
 public:
  template <class F>
  auto time(const std::string& stage, F&& fn) {
    const auto t0 = Clock::now();
    auto result = fn();
    stages_[stage] = std::chrono::duration<double>(Clock::now() - t0).count();
    return result;
  }
  json& stages() { return stages_; }

 private:
  json stages_ = json::object();
};

json isolation_json(const IsolationCertificate& c) {
  return json{{"pass", c.moat_verified}, {"inv_cells", c.inv.size()}};
}

json record_isolation_json(const LambdaRecord& r) {
  json out{{"N", isolation_json(r.iso_n)}};
  if (r.iso_a) out["N_A"] = isolation_json(*r.iso_a);
  if (r.iso_r) out["N_R"] = isolation_json(*r.iso_r);
  return out;
}

json decomposition_json(const LambdaRecord& r, Exports& ex, const std::string& dir, json& sets) {
  json out{{"status", to_string(r.status)}, {"failure", r.failure}};
  if (!r.decomposition) return out;
  const ARDecomposition& d = *r.decomposition;
  out["k_star"] = d.k_star;
  out["partition_ok"] = r.partition_ok();
  out["connection"] = json{{"forward_ok", d.connection.forward_ok},
                           {"backward_ok", d.connection.backward_ok},
                           {"forward_stray_cells", d.connection.forward_stray.size()},
                           {"backward_stray_cells", d.connection.backward_stray.size()}};
  sets["U"] = ex.set(dir, "U", d.u);
  sets["A"] = ex.set(dir, "A", d.a);
  sets["R"] = ex.set(dir, "R", d.r);
  sets["C"] = ex.set(dir, "C", d.c);
  sets["W"] = ex.set(dir, "W", d.w);
  return out;
}

std::string lambda_label(const Interval& l) {
  if (l.is_point()) return format_double(l.lo());
  return "[" + format_double(l.lo()) + ", " + format_double(l.hi()) + "]";
}

json system_json(const SystemConfig& c, const ResolvedSystem& r) {
  json grid = json::array();
  for (auto g : c.grid) grid.push_back(g);
  return json{{"dim", c.dim},
              {"domain", box_json(c.domain)},
              {"grid", grid},
              {"cells", r.grid->cell_count()},
              {"tau", r.tau},
              {"lambda", interval_json(c.lambda)},
              {"lambda_range", interval_json(c.lambda_range)},
              {"substeps", c.integration.substeps},
              {"subdivide", c.integration.subdivide},
              {"integrator", c.integration.method == Integrator::Ball ? "ball" : "box"},
              {"pieces", c.pieces.size()},
              {"overrides", c.overrides.size()}};
}

/// A plan for one lambda, used by the single-lambda commands.
SweepPlan single_plan(const SystemConfig& c, const ResolvedSystem& r) {
  return SweepPlan{r.grid,
                   r.inclusion,
                   r.tau,
                   c.integration,
                   {},
                   c.find_set("N") ? r.set(c, "N") : BoxSet::all(r.grid),
                   r.optional_set(c, "N_A"),
                   r.optional_set(c, "N_R"),
                   0.0,
                   c.mode,
                   DecomposeOptions{c.k_max, c.slack},
                   c.sharpen,
                   c.slope};
}

BoxSet required_u(const SystemConfig& c, const ResolvedSystem& r, Command command) {
  if (!c.find_set("U")) {
    throw Error(ErrorCode::ValidationError, std::string(to_string(command)) + " requires a set U");
  }
  return r.set(c, "U");
}

void write_lines(std::ostringstream& os, const std::vector<std::string>& lines) {
  for (const auto& l : lines) os << l << '\n';
}

std::string pass_text(bool ok) { return ok ? "pass" : "fail"; }

}  // namespace

RunReport run(const SystemConfig& config, Command command, const std::string& out_dir) {
  validate_config(config);
  const auto t_start = Clock::now();
  Timer timer;
  Exports ex;
  std::vector<std::string> summary;
  bool certificates_pass = true;

  const ResolvedSystem res = resolve(config);
  json report{{"schema", "arcert-report/1"}, {"command", to_string(command)}, {"system", system_json(config, res)}};
  summary.push_back(std::string("command: ") + to_string(command));
  summary.push_back("grid: " + std::to_string(res.grid->cell_count()) + " cells, tau = " + format_double(res.tau) +
                    ", lambda = " + lambda_label(config.lambda));

  if (command == Command::Sweep || command == Command::Continue) {
    const SweepPlan plan = res.plan(config);
    std::optional<BoxSet> u;
    if (command == Command::Continue) u = required_u(config, res, command);
    const SweepReport sweep = timer.time("sweep", [&] {
      return command == Command::Continue ? continue_decomposition(plan, *u) : sweep_isolating(plan);
    });
    json sets = json::object();
    sets["N"] = ex.set("sets/", "N", plan.n);
    if (plan.n_a) sets["N_A"] = ex.set("sets/", "N_A", *plan.n_a);
    if (plan.n_r) sets["N_R"] = ex.set("sets/", "N_R", *plan.n_r);
    report["sets"] = sets;

    json records = json::array();
    bool all_isolating = true;
    bool no_breakdown = true;
    for (std::size_t i = 0; i < sweep.records.size(); ++i) {
      const LambdaRecord& r = sweep.records[i];
      const std::string dir = "lambda_" + std::to_string(i) + "/";
      json rec_sets = json::object();
      rec_sets["S"] = ex.set(dir, "S", r.s());
      json rec{{"lambda", interval_json(r.lambda)},
               {"anchor", i == sweep.anchor_index},
               {"verified", sweep.in_run(i)},
               {"isolation", record_isolation_json(r)}};
      if (command == Command::Continue) {
        rec["decomposition"] = decomposition_json(r, ex, dir, rec_sets);
        rec["drift"] = r.drift ? json(*r.drift) : json(nullptr);
      }
      rec["sets"] = rec_sets;
      records.push_back(rec);
      all_isolating = all_isolating && r.isolating();
      no_breakdown = no_breakdown && r.status != DecompositionStatus::Breakdown;

      std::string line = "lambda " + lambda_label(r.lambda) + ": isolation " + pass_text(r.isolating()) +
                         ", |S| = " + std::to_string(r.s().size());
      if (command == Command::Continue) {
        line += ", decomposition " + std::string(to_string(r.status));
        if (r.decomposition) {
          line += " (|A| = " + std::to_string(r.decomposition->a.size()) +
                  ", |R| = " + std::to_string(r.decomposition->r.size()) +
                  ", |C| = " + std::to_string(r.decomposition->c.size()) + ")";
        }
        if (!r.failure.empty()) line += ": " + r.failure;
      }
      summary.push_back(line + " [" + dir + "]");
    }
    std::ostringstream text;
    write_sweep_report(text, sweep);
    std::ostringstream table;
    write_sweep_table(table, sweep);
    ex.add("sweep.txt", text.str());
    ex.add("sweep.tsv", table.str());

    json sweep_json{{"mode", plan.mode == SweepMode::Interval ? "interval" : "sampled"},
                    {"anchor", plan.anchor},
                    {"verified_run", nullptr},
                    {"records", records},
                    {"report", "sweep.txt"},
                    {"table", "sweep.tsv"}};
    if (sweep.run_end > sweep.run_begin) {
      sweep_json["verified_run"] =
          json::array({sweep.records[sweep.run_begin].lambda.lo(), sweep.records[sweep.run_end - 1].lambda.hi()});
      summary.push_back("verified run: lambda in [" + format_double(sweep.records[sweep.run_begin].lambda.lo()) +
                        ", " + format_double(sweep.records[sweep.run_end - 1].lambda.hi()) + "]");
    } else {
      summary.push_back("verified run: empty");
    }
    certificates_pass = all_isolating;
    if (command == Command::Continue) {
      const bool semi = semicontinuity_check(sweep, plan.anchor, plan.slope);
      sweep_json["semicontinuity"] = json{{"slope", plan.slope}, {"pass", semi}};
      summary.push_back("semicontinuity (slope " + format_double(plan.slope) + "): " + pass_text(semi));
      certificates_pass = certificates_pass && no_breakdown && semi;
    }
    report["sweep"] = sweep_json;
  } else {
    const MapConfig cfg = res.map_config(config);
    const BoxMapGraph graph = timer.time("build_graph", [&] { return build_graph(cfg); });
    std::ostringstream edges;
    write_edge_list(edges, graph);
    ex.add("graph.edges", edges.str());
    const std::size_t exits = graph.flagged_cells().size();
    report["graph"] = json{{"edges", graph.edge_count()}, {"exit_cells", exits}, {"file", "graph.edges"}};
    summary.push_back("graph: " + std::to_string(graph.edge_count()) + " edges, " + std::to_string(exits) +
                      " exit cells [graph.edges]");

    if (command != Command::BuildMap) {
      const SweepPlan plan = single_plan(config, res);
      json sets = json::object();
      sets["N"] = ex.set("sets/", "N", plan.n);
      if (command == Command::Invariant) {
        const BoxSet s = timer.time("invariant_part", [&] { return invariant_part(graph, plan.n); });
        sets["S"] = ex.set("sets/", "S", s);
        summary.push_back("invariant part of N: " + std::to_string(s.size()) + " cells [sets/S.txt]");
      } else {
        std::optional<BoxSet> u;
        if (command == Command::Decompose) u = required_u(config, res, command);
        const LambdaRecord rec =
            timer.time("analyze", [&] { return analyze(plan, cfg, graph, u ? &*u : nullptr); });
        if (plan.n_a) sets["N_A"] = ex.set("sets/", "N_A", *plan.n_a);
        if (plan.n_r) sets["N_R"] = ex.set("sets/", "N_R", *plan.n_r);
        sets["S"] = ex.set("sets/", "S", rec.s());
        report["isolation"] = record_isolation_json(rec);
        summary.push_back("isolation of N: " + pass_text(rec.iso_n.moat_verified) +
                          ", |Inv(N)| = " + std::to_string(rec.s().size()) + " [sets/S.txt]");
        if (rec.iso_a) summary.push_back("isolation of N_A: " + pass_text(rec.iso_a->moat_verified));
        if (rec.iso_r) summary.push_back("isolation of N_R: " + pass_text(rec.iso_r->moat_verified));
        // A decomposition needs S invariant, not isolated, so isolation gates only `isolate`.
        certificates_pass = command != Command::Isolate || rec.isolating();
        if (command == Command::Decompose) {
          report["decomposition"] = decomposition_json(rec, ex, "sets/", sets);
          std::string line = std::string("decomposition: ") + to_string(rec.status);
          if (rec.decomposition) {
            const ARDecomposition& d = *rec.decomposition;
            line += ", |A| = " + std::to_string(d.a.size()) + ", |R| = " + std::to_string(d.r.size()) +
                    ", |C| = " + std::to_string(d.c.size()) + ", k* = " + std::to_string(d.k_star) +
                    " [sets/A.txt, sets/R.txt, sets/C.txt]";
          }
          if (!rec.failure.empty()) line += ": " + rec.failure;
          summary.push_back(line);
          certificates_pass = certificates_pass && rec.status != DecompositionStatus::Breakdown;
        }
      }
      report["sets"] = sets;
    }
  }

  RunReport out;
  out.exit_code = certificates_pass ? kExitOk : kExitCertificateFailed;
  report["certificates_pass"] = certificates_pass;
  report["exit_code"] = out.exit_code;
  summary.push_back("certificates: " + pass_text(certificates_pass) + ", exit code " + std::to_string(out.exit_code));

  timer.stages()["total"] = std::chrono::duration<double>(Clock::now() - t_start).count();
  out.json = report.dump(2) + "\n";
  std::ostringstream sum;
  write_lines(sum, summary);
  out.summary = sum.str();
  out.timings = timer.stages().dump(2) + "\n";
  ex.add("report.json", out.json);
  ex.add("summary.txt", out.summary);
  ex.add("timings.json", out.timings);
  out.files = ex.flush(out_dir);
  return out;
}

}  // namespace arcert

#include "arcert/arcert.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "arcert/config.hpp"
#include "arcert/dynamics.hpp"
#include "arcert/error.hpp"
#include "arcert/run.hpp"

struct arcert_config {
  arcert::SystemConfig config;
};

struct arcert_result {
  arcert::RunReport report;
};

struct arcert_graph {
  std::optional<arcert::BoxMapGraph> graph;
};

namespace {

thread_local std::string last_error;

arcert_status status_of(arcert::ErrorCode code) {
  return static_cast<arcert_status>(static_cast<int>(code) + 1);
}

arcert_status fail(arcert_status status, const std::string& msg) {
  last_error = msg;
  return status;
}

/// Runs fn, turning exceptions into status codes and the thread-local message.
template <class F>
arcert_status guarded(F&& fn) {
  try {
    fn();
    last_error.clear();
    return ARCERT_OK;
  } catch (const arcert::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ARCERT_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(ARCERT_INTERNAL_ERROR, e.what());
  }
}

arcert_status null_argument(const char* what) {
  return fail(ARCERT_INVALID_ARGUMENT, std::string(what) + " must not be null");
}

/// Applies a change to a copy, validates it and commits only on success.
template <class F>
arcert_status modify(arcert_config* config, F&& change) {
  if (!config) return null_argument("config");
  return guarded([&] {
    arcert::SystemConfig next = config->config;
    change(next);
    arcert::validate_config(next);
    config->config = std::move(next);
  });
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* arcert_version(void) { return "1.0.0"; }

const char* arcert_status_name(arcert_status status) {
  switch (status) {
    case ARCERT_OK:
      return "Ok";
    case ARCERT_INTERNAL_ERROR:
      return "InternalError";
    default:
      if (status > ARCERT_OK && status < ARCERT_INTERNAL_ERROR) {
        return arcert::to_string(static_cast<arcert::ErrorCode>(static_cast<int>(status) - 1));
      }
      return "Unknown";
  }
}

const char* arcert_last_error(void) { return last_error.c_str(); }

void arcert_string_free(char* text) { std::free(text); }
void arcert_ids_free(uint64_t* ids) { std::free(ids); }

arcert_status arcert_config_parse(const char* text, arcert_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new arcert_config{arcert::parse_config(text)}; });
}

arcert_status arcert_config_load(const char* path, arcert_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw arcert::Error(arcert::ErrorCode::Io, std::string("cannot read ") + path);
    std::ostringstream text;
    text << f.rdbuf();
    try {
      *out = new arcert_config{arcert::parse_config(text.str())};
    } catch (const arcert::Error& e) {
      throw arcert::Error(e.code(), std::string(path) + ": " + e.what());
    }
  });
}

void arcert_config_free(arcert_config* config) { delete config; }

arcert_status arcert_config_print(const arcert_config* config, char** out_text) {
  if (!config) return null_argument("config");
  if (!out_text) return null_argument("out_text");
  return guarded([&] { *out_text = duplicate(arcert::print_config(config->config)); });
}

size_t arcert_config_dim(const arcert_config* config) { return config ? config->config.dim : 0; }

arcert_status arcert_config_set_lambda(arcert_config* config, double lambda) {
  return modify(config, [&](arcert::SystemConfig& c) { c.lambda = arcert::Interval(lambda); });
}

arcert_status arcert_config_set_tau(arcert_config* config, double tau) {
  return modify(config, [&](arcert::SystemConfig& c) { c.tau = tau; });
}

arcert_status arcert_config_set_grid(arcert_config* config, const uint64_t* subdivisions, size_t count) {
  if (!subdivisions) return null_argument("subdivisions");
  return modify(config, [&](arcert::SystemConfig& c) {
    if (count == 1) {
      c.grid.assign(c.dim, subdivisions[0]);
    } else {
      c.grid.assign(subdivisions, subdivisions + count);
    }
  });
}

arcert_status arcert_config_set_threads(arcert_config* config, unsigned threads) {
  return modify(config, [&](arcert::SystemConfig& c) { c.integration.threads = threads; });
}

arcert_status arcert_config_evaluate_hull(const arcert_config* config, const double* lo, const double* hi,
                                          double lambda, double* out_lo, double* out_hi) {
  if (!config || !lo || !hi || !out_lo || !out_hi) return null_argument("every argument");
  return guarded([&] {
    const arcert::SystemConfig& c = config->config;
    std::vector<arcert::Interval> box;
    for (std::size_t i = 0; i < c.dim; ++i) {
      if (!(lo[i] <= hi[i])) throw arcert::Error(arcert::ErrorCode::InvalidArgument, "box with lo > hi");
      box.emplace_back(lo[i], hi[i]);
    }
    const arcert::PiecewiseInclusion inclusion(c.domain, c.pieces, c.overrides, c.lambda_range);
    const auto hull = inclusion.evaluate_hull(arcert::IntervalVector(std::move(box)), arcert::Params::at(lambda));
    for (std::size_t i = 0; i < c.dim; ++i) {
      out_lo[i] = hull[i].lo();
      out_hi[i] = hull[i].hi();
    }
  });
}

arcert_status arcert_run(const arcert_config* config, const char* command, const char* out_dir,
                         arcert_result** out) {
  if (!config) return null_argument("config");
  if (!command) return null_argument("command");
  if (!out) return null_argument("out");
  *out = nullptr;
  const auto cmd = arcert::parse_command(command);
  if (!cmd) return fail(ARCERT_INVALID_ARGUMENT, std::string("unknown command '") + command + "'");
  return guarded([&] {
    *out = new arcert_result{arcert::run(config->config, *cmd, out_dir ? out_dir : "")};
  });
}

int arcert_result_exit_code(const arcert_result* result) {
  return result ? result->report.exit_code : ARCERT_EXIT_ERROR;
}
const char* arcert_result_json(const arcert_result* result) { return result ? result->report.json.c_str() : ""; }
const char* arcert_result_summary(const arcert_result* result) {
  return result ? result->report.summary.c_str() : "";
}
const char* arcert_result_timings(const arcert_result* result) {
  return result ? result->report.timings.c_str() : "";
}
void arcert_result_free(arcert_result* result) { delete result; }

arcert_status arcert_graph_build(const arcert_config* config, arcert_graph** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const arcert::ResolvedSystem res = arcert::resolve(config->config);
    auto* g = new arcert_graph;
    try {
      g->graph.emplace(arcert::build_graph(res.map_config(config->config)));
    } catch (...) {
      delete g;
      throw;
    }
    *out = g;
  });
}

void arcert_graph_free(arcert_graph* graph) { delete graph; }

uint64_t arcert_graph_cell_count(const arcert_graph* graph) { return graph ? graph->graph->cell_count() : 0; }
uint64_t arcert_graph_edge_count(const arcert_graph* graph) { return graph ? graph->graph->edge_count() : 0; }

arcert_status arcert_graph_targets(const arcert_graph* graph, uint64_t cell, const uint64_t** targets,
                                   size_t* count) {
  if (!graph || !targets || !count) return null_argument("every argument");
  if (cell >= graph->graph->cell_count()) return fail(ARCERT_INVALID_ARGUMENT, "cell id out of range");
  const auto span = graph->graph->targets(cell);
  *targets = span.data();
  *count = span.size();
  last_error.clear();
  return ARCERT_OK;
}

int arcert_graph_exited(const arcert_graph* graph, uint64_t cell) {
  if (!graph || cell >= graph->graph->cell_count()) return -1;
  return graph->graph->boundary_flag(cell) ? 1 : 0;
}

arcert_status arcert_graph_write_edges(const arcert_graph* graph, const char* path) {
  if (!graph) return null_argument("graph");
  if (!path) return null_argument("path");
  return guarded([&] {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw arcert::Error(arcert::ErrorCode::Io, std::string("cannot write ") + path);
    arcert::write_edge_list(f, *graph->graph);
    if (!f) throw arcert::Error(arcert::ErrorCode::Io, std::string("cannot write ") + path);
  });
}

arcert_status arcert_graph_invariant_part(const arcert_graph* graph, const uint64_t* n_ids, size_t n_count,
                                          uint64_t** out_ids, size_t* out_count) {
  if (!graph || !out_ids || !out_count) return null_argument("graph, out_ids and out_count");
  if (n_count > 0 && !n_ids) return null_argument("n_ids");
  *out_ids = nullptr;
  *out_count = 0;
  return guarded([&] {
    const auto& g = *graph->graph;
    std::vector<arcert::CellId> ids(n_ids, n_ids + n_count);
    for (auto id : ids) {
      if (id >= g.cell_count()) throw arcert::Error(arcert::ErrorCode::InvalidArgument, "cell id out of range");
    }
    const arcert::BoxSet inv = arcert::invariant_part(g, arcert::BoxSet(g.grid_ptr(), std::move(ids)));
    auto* buf = static_cast<uint64_t*>(std::malloc(std::max<std::size_t>(1, inv.size()) * sizeof(uint64_t)));
    if (!buf) throw std::bad_alloc();
    std::copy(inv.ids().begin(), inv.ids().end(), buf);
    *out_ids = buf;
    *out_count = inv.size();
  });
}

}  // extern "C"

#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arcert/boxmap.hpp"
#include "arcert/dynamics.hpp"

namespace arcert {

/// Sampled: one graph per lambda sample. Interval: one graph per pair of
/// consecutive samples, built with lambda ranging over the whole segment, so
/// its certificates hold for every lambda in between.
enum class SweepMode { Sampled, Interval };

struct SweepPlan {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const PiecewiseInclusion> inclusion;
  double tau = 0.0;
  IntegrationOptions options;
  std::vector<double> lambdas;  // strictly increasing
  BoxSet n;
  std::optional<BoxSet> n_a;
  std::optional<BoxSet> n_r;
  double anchor = 0.0;  // must be one of the samples
  SweepMode mode = SweepMode::Sampled;
  DecomposeOptions decompose;
  SharpenOptions sharpen;
  double slope = 0.0;  // semicontinuity budget in cells per unit of lambda

  /// Checks samples (increasing, inside the family interval, anchor present)
  /// and N_A, N_R inside N. Throws ValidationError.
  void validate() const;
};

enum class DecompositionStatus {
  NotRun,            // outside the verified run, or isolation sweep only
  Ok,                // attractor rule, connection check and partition passed
  ContinuedToEmpty,  // S is empty: the empty decomposition
  Breakdown,         // a certificate failed; see failure
};

const char* to_string(DecompositionStatus status);

struct LambdaRecord {
  Interval lambda;
  IsolationCertificate iso_n;
  std::optional<IsolationCertificate> iso_a;
  std::optional<IsolationCertificate> iso_r;
  DecompositionStatus status = DecompositionStatus::NotRun;
  std::string failure;  // names the failing certificate on breakdown
  std::optional<ARDecomposition> decomposition;
  std::optional<double> drift;  // Hausdorff distance of A from the anchor's A

  const BoxSet& s() const { return iso_n.inv; }
  bool isolating() const;
  /// A, R, C partition S exactly (vacuous when there is no decomposition).
  bool partition_ok() const;
};

struct SweepReport {
  std::vector<LambdaRecord> records;  // ordered by lambda
  std::size_t anchor_index = 0;
  // Maximal contiguous run [run_begin, run_end) of isolating records that
  // contains the anchor; empty when the anchor itself fails.
  std::size_t run_begin = 0;
  std::size_t run_end = 0;

  bool in_run(std::size_t i) const { return i >= run_begin && i < run_end; }
};

/// The single-lambda pipeline: build the graph, certify isolation of N
/// (and N_A, N_R), S = Inv(N), and when U is given decompose S and sharpen
/// A and R. Certificate failures are recorded, not thrown.
LambdaRecord analyze(const SweepPlan& plan, const Params& params, const BoxSet* u);
/// The same on an already built graph; cfg must be the graph's configuration.
LambdaRecord analyze(const SweepPlan& plan, const MapConfig& cfg, const BoxMapGraph& graph, const BoxSet* u);

/// Isolation certificates at every sample plus the verified run. Graph
/// build failures are rethrown with the lambda value attached.
SweepReport sweep_isolating(const SweepPlan& plan);

/// sweep_isolating followed by a decomposition with the fixed U at every
/// sample of the verified run. Throws AnchorFailure when the anchor fails.
SweepReport continue_decomposition(const SweepPlan& plan, const BoxSet& u);

/// Every S in the verified run lies in the dilation of the anchor's S by
/// 1 + ceil(slope * |lambda - anchor|) cells.
bool semicontinuity_check(const SweepReport& report, double anchor, double slope);

/// One block per lambda: certificates, set sizes, drift from the anchor.
void write_sweep_report(std::ostream& os, const SweepReport& report);
/// Tab-separated: lambda_lo, lambda_hi, |S|, |A|, |R|, |C|, pass flags, status.
void write_sweep_table(std::ostream& os, const SweepReport& report);

}  // namespace arcert

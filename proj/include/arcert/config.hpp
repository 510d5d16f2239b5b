#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arcert/boxmap.hpp"
#include "arcert/boxset.hpp"
#include "arcert/continuation.hpp"
#include "arcert/inclusion.hpp"

namespace arcert {

/// One signed term of a set definition. Boxes select the cells they overlap
/// with positive measure (a degenerate box selects the cells containing it);
/// rings select cells whose centre lies at distance [r_lo, r_hi] from a point.
struct SetTerm {
  enum class Kind { All, Box, Cells, Ring };
  bool subtract = false;
  Kind kind = Kind::All;
  IntervalVector box;
  std::vector<CellId> cells;
  std::vector<double> centre;
  double r_lo = 0.0;
  double r_hi = 0.0;

  friend bool operator==(const SetTerm&, const SetTerm&) = default;
};

/// Terms are applied left to right, starting from the empty set.
struct SetDefinition {
  std::string name;
  std::vector<SetTerm> terms;

  friend bool operator==(const SetDefinition&, const SetDefinition&) = default;
};

/// A parsed configuration file. Holds the declarations as written (after
/// normalization), so print_config / parse_config round-trip exactly.
struct SystemConfig {
  std::size_t dim = 0;
  IntervalVector domain;
  std::vector<std::uint64_t> grid;
  std::optional<double> tau;  // unset: default_tau
  Interval lambda{0.0};       // single-lambda commands
  Interval lambda_range{-1.0, 1.0};
  IntegrationOptions integration;
  std::vector<RegionPiece> pieces;
  std::vector<Override> overrides;
  std::vector<SetDefinition> sets;

  std::uint64_t k_max = 0;
  std::size_t slack = 2;
  std::vector<double> samples;
  std::optional<double> anchor;  // unset: 0 if sampled, else the first sample
  SweepMode mode = SweepMode::Sampled;
  double slope = 0.0;
  SharpenOptions sharpen;

  const SetDefinition* find_set(std::string_view name) const;

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

/// Throws ParseError (line, column) on malformed text and ValidationError on
/// a well-formed configuration that violates an invariant.
SystemConfig parse_config(std::string_view text);
/// Canonical text; parse_config(print_config(c)) == c.
std::string print_config(const SystemConfig& config);
/// Checks every invariant parse_config guarantees: coverage of the domain,
/// sets inside the domain, samples inside the family interval. Needed again
/// after command-line overrides.
void validate_config(const SystemConfig& config);

/// Materialized objects for a configuration.
struct ResolvedSystem {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const PiecewiseInclusion> inclusion;
  double tau = 0.0;

  BoxSet set(const SystemConfig& config, std::string_view name) const;
  std::optional<BoxSet> optional_set(const SystemConfig& config, std::string_view name) const;
  MapConfig map_config(const SystemConfig& config) const;
  /// Sweep plan over the configured samples; N defaults to the whole grid.
  SweepPlan plan(const SystemConfig& config) const;
};

ResolvedSystem resolve(const SystemConfig& config);
BoxSet evaluate_set(const SetDefinition& def, const std::shared_ptr<const Grid>& grid);

}  // namespace arcert

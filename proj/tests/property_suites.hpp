#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace testing_support {

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;     // checked instances (random graphs, trajectories, cells)
  std::size_t failures = 0;
  std::string detail;        // first failure, or a short note

  bool passed(std::size_t min_cases) const { return failures == 0 && cases >= min_cases; }
};

/// Graph-theoretic properties on random graphs plus the example systems.
std::vector<SuiteResult> graph_property_suites(std::uint64_t seed, std::size_t min_random_cases);

/// Outer soundness of the box map against closed-form trajectories, at least
/// `min_trajectories` per example system.
SuiteResult soundness_suite(std::uint64_t seed, std::size_t min_trajectories);

/// Axis-doubling refinement on every example: image refinement soundness
/// and monotone Inv / A / R.
SuiteResult refinement_suite();

}  // namespace testing_support

#include <gtest/gtest.h>

#include "property_suites.hpp"

using testing_support::SuiteResult;

namespace {

void expect_passed(const SuiteResult& r, std::size_t min_cases) {
  EXPECT_EQ(r.failures, 0u) << r.name << ": " << r.detail;
  EXPECT_GE(r.cases, min_cases) << r.name;
}

}  // namespace

TEST(GraphProperties, HoldOnRandomGraphsAndExamples) {
  for (const auto& r : testing_support::graph_property_suites(20240601, 200)) {
    SCOPED_TRACE(r.name);
    expect_passed(r, 200);
  }
}

TEST(Soundness, ClosedFormTrajectoriesLandInTheirImages) {
  expect_passed(testing_support::soundness_suite(99, 1000), 4000);
}

TEST(Refinement, FinerGridsNeverEnlargeTheSets) {
  expect_passed(testing_support::refinement_suite(), 8);
}

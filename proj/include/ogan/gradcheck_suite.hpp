#ifndef OGAN_GRADCHECK_SUITE_HPP
#define OGAN_GRADCHECK_SUITE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ogan/gradcheck.hpp"

namespace ogan {

struct GradCheckSuiteResult {
  double max_rel_err = 0.0;
  bool pass = false;
  int checks = 0;
  std::vector<std::string> failures;
};

/// Finite-difference conformance of every differentiable primitive over
/// randomized instances, plus full loss-E / loss-G graphs of all four
/// objective variants on 4-sample batches. Deterministic under the seed.
GradCheckSuiteResult run_gradcheck_suite(double tolerance = 1e-4, std::uint64_t seed = 99);

}  // namespace ogan

#endif  // OGAN_GRADCHECK_SUITE_HPP

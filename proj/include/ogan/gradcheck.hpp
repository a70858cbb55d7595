#ifndef OGAN_GRADCHECK_HPP
#define OGAN_GRADCHECK_HPP

#include <vector>

#include "ogan/graph.hpp"

namespace ogan {

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = false;
};

/// Compare the analytic gradient of a scalar graph root w.r.t. one leaf
/// against central finite differences computed coordinate-wise in the
/// 64-bit shadow evaluator. Relative error uses a max(1, |analytic|)
/// denominator. Runs its own forward/backward pass.
GradCheckReport grad_check(Graph& g, Var root, Var leaf, double step = 1e-3,
                           double tolerance = 1e-4, const Graph::Feeds& feeds = {});

/// grad_check over several leaves; reports the worst.
GradCheckReport grad_check_all(Graph& g, Var root, const std::vector<Var>& leaves,
                               double step = 1e-3, double tolerance = 1e-4,
                               const Graph::Feeds& feeds = {});

}  // namespace ogan

#endif  // OGAN_GRADCHECK_HPP

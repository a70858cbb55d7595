#include "ogan/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace ogan {

GradCheckReport grad_check(Graph& g, Var root, Var leaf, double step, double tolerance,
                           const Graph::Feeds& feeds) {
  if (step <= 0.0) throw std::invalid_argument("grad_check: step must be positive");
  if (g.node(leaf.id).op != Op::kLeaf) {
    throw std::invalid_argument("grad_check: target is not a leaf");
  }
  g.forward(root, feeds);
  g.backward(root);
  const Tensor analytic = g.grad(leaf);

  GradCheckReport report;
  for (std::int64_t i = 0; i < analytic.size(); ++i) {
    // eval_scalar_f64 throws NonFiniteError if a perturbed output is NaN/Inf
    const double up = g.eval_scalar_f64(root, feeds, leaf, i, step);
    const double dn = g.eval_scalar_f64(root, feeds, leaf, i, -step);
    const double fd = (up - dn) / (2.0 * step);
    const double a = analytic.at(i);
    const double rel = std::abs(fd - a) / std::max(1.0, std::abs(a));
    if (rel > report.max_rel_err) report.max_rel_err = rel;
  }
  report.pass = report.max_rel_err <= tolerance;
  return report;
}

GradCheckReport grad_check_all(Graph& g, Var root, const std::vector<Var>& leaves, double step,
                               double tolerance, const Graph::Feeds& feeds) {
  GradCheckReport worst;
  worst.pass = true;
  for (Var leaf : leaves) {
    const GradCheckReport r = grad_check(g, root, leaf, step, tolerance, feeds);
    if (r.max_rel_err > worst.max_rel_err) worst.max_rel_err = r.max_rel_err;
    worst.pass = worst.pass && r.pass;
  }
  return worst;
}

}  // namespace ogan

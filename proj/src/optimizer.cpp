#include "ogan/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace ogan {

OptState make_opt_state(const std::vector<Tensor*>& params) {
  OptState opt;
  for (const Tensor* p : params) opt.acc.emplace_back(p->shape());
  return opt;
}

void rmsprop_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
                  const std::vector<std::string>& names, OptState& opt, float lr, float decay,
                  float eps) {
  if (params.size() != grads.size() || params.size() != opt.acc.size()) {
    throw std::invalid_argument("rmsprop_step: parameter / gradient / state count mismatch");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = grads[i];
    Tensor& a = opt.acc[i];
    if (!p.same_shape(g) || !p.same_shape(a)) {
      throw ShapeError("rmsprop_step: shape mismatch for " +
                       (i < names.size() ? names[i] : std::to_string(i)));
    }
    if (!g.all_finite()) {
      throw NonFiniteError("rmsprop_step: non-finite gradient for " +
                           (i < names.size() ? names[i] : std::to_string(i)));
    }
    for (std::int64_t j = 0; j < p.size(); ++j) {
      const float gj = g.at(j);
      a.at(j) = decay * a.at(j) + (1.0f - decay) * gj * gj;
      p.at(j) -= lr * gj / (std::sqrt(a.at(j)) + eps);
    }
  }
  ++opt.step;
}

}  // namespace ogan

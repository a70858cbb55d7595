#ifndef OGAN_OPTIMIZER_HPP
#define OGAN_OPTIMIZER_HPP

#include <string>
#include <vector>

#include "ogan/tensor.hpp"

namespace ogan {

/// Per-parameter squared-gradient accumulators for RMSprop, aligned with a
/// flat parameter tensor list.
struct OptState {
  std::vector<Tensor> acc;
  std::int64_t step = 0;
};

OptState make_opt_state(const std::vector<Tensor*>& params);

/// acc <- decay * acc + (1 - decay) * g^2; param <- param - lr * g / (sqrt(acc) + eps).
/// Throws NonFiniteError naming the parameter if a gradient is NaN/Inf.
void rmsprop_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
                  const std::vector<std::string>& names, OptState& opt, float lr, float decay,
                  float eps);

}  // namespace ogan

#endif  // OGAN_OPTIMIZER_HPP

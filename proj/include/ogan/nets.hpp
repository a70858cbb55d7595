#ifndef OGAN_NETS_HPP
#define OGAN_NETS_HPP

#include <string>
#include <vector>

#include "ogan/graph.hpp"
#include "ogan/rng.hpp"
#include "ogan/tensor.hpp"

namespace ogan {

enum class Activation : std::uint8_t { kLinear, kRelu, kLeakyRelu, kTanh };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// Weight draw: glorot is uniform +-sqrt(6 / (fan_in + fan_out)), he is
/// uniform +-sqrt(6 / fan_in). Biases start at zero either way.
enum class InitScheme : std::uint8_t { kGlorotUniform, kHeUniform };

/// Shape and initialisation recipe of a fully-connected net.
struct NetSpec {
  int input_dim = 0;
  std::vector<int> hidden;
  int output_dim = 0;
  Activation hidden_act = Activation::kRelu;
  Activation output_act = Activation::kLinear;
  InitScheme init = InitScheme::kGlorotUniform;
};

/// Slope used by every leaky-relu in the project.
inline constexpr float kLeakySlope = 0.2f;

struct Layer {
  Tensor w;  // [in x out]
  Tensor b;  // [out]
  Activation act = Activation::kLinear;
};

struct MlpParams {
  std::vector<Layer> layers;

  int input_dim() const { return layers.front().w.dim(0); }
  int output_dim() const { return layers.back().w.dim(1); }
  std::int64_t param_count() const;
  /// Flat view of all parameter tensors, [W0, b0, W1, b1, ...].
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  std::vector<std::string> tensor_names(const std::string& prefix) const;
};

/// Build an MLP from a spec; bit-reproducible for a given rng state.
MlpParams build_mlp(const NetSpec& spec, Rng& rng);

/// Parameter leaves of one net inside a graph, reused across applications
/// so gradients from every use accumulate on the same nodes.
struct MlpVars {
  std::vector<std::pair<Var, Var>> wb;  // per layer: (W, b)
  const MlpParams* params = nullptr;

  std::vector<Var> flat() const;
};

MlpVars mlp_leaves(Graph& g, const MlpParams& params, const std::string& prefix);

/// Apply the net to x ([B x in] or [in]), returning the output var.
Var mlp_apply_g(Graph& g, const MlpVars& net, Var x);

/// Convenience: run the net forward on a plain tensor (builds a throwaway
/// graph; gradients are not needed on this path).
Tensor mlp_apply(const MlpParams& params, const Tensor& x);

/// Generator: relu hidden layers, tanh output head.
NetSpec generator_spec(int n_z, std::vector<int> hidden, int n_x);
/// Encoder: leaky-relu(0.2) hidden layers, linear output head.
NetSpec encoder_spec(int n_x, std::vector<int> hidden, int n_z);
/// Scoring head T for the explicit-T variants: one linear layer n_z -> 1.
MlpParams make_t_head(int n_z, Rng& rng);
/// T realising avg() exactly: weights 1/n_z, zero bias.
MlpParams make_avg_t_head(int n_z);

}  // namespace ogan

#endif  // OGAN_NETS_HPP

#include "ogan/nets.hpp"

#include <cmath>
#include <stdexcept>

namespace ogan {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kLinear: return "linear";
    case Activation::kRelu: return "relu";
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kTanh: return "tanh";
  }
  return "?";
}

Activation activation_from_name(const std::string& name) {
  if (name == "linear") return Activation::kLinear;
  if (name == "relu") return Activation::kRelu;
  if (name == "leaky_relu") return Activation::kLeakyRelu;
  if (name == "tanh") return Activation::kTanh;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

std::int64_t MlpParams::param_count() const {
  std::int64_t n = 0;
  for (const Layer& l : layers) n += l.w.size() + l.b.size();
  return n;
}

std::vector<Tensor*> MlpParams::tensors() {
  std::vector<Tensor*> out;
  for (Layer& l : layers) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  return out;
}

std::vector<const Tensor*> MlpParams::tensors() const {
  std::vector<const Tensor*> out;
  for (const Layer& l : layers) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  return out;
}

std::vector<std::string> MlpParams::tensor_names(const std::string& prefix) const {
  std::vector<std::string> out;
  for (size_t i = 0; i < layers.size(); ++i) {
    out.push_back(prefix + std::to_string(i) + ".W");
    out.push_back(prefix + std::to_string(i) + ".b");
  }
  return out;
}

MlpParams build_mlp(const NetSpec& spec, Rng& rng) {
  if (spec.input_dim < 1 || spec.output_dim < 1) {
    throw std::invalid_argument("build_mlp: dims must be >= 1");
  }
  if (spec.hidden.empty()) {
    throw std::invalid_argument("build_mlp: hidden layer list must be non-empty");
  }
  for (int h : spec.hidden) {
    if (h < 1) throw std::invalid_argument("build_mlp: zero-dim hidden layer");
  }
  std::vector<int> dims;
  dims.push_back(spec.input_dim);
  dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
  dims.push_back(spec.output_dim);

  MlpParams params;
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    const int fan_in = dims[i], fan_out = dims[i + 1];
    const float bound = spec.init == InitScheme::kHeUniform
                            ? std::sqrt(6.0f / static_cast<float>(fan_in))
                            : std::sqrt(6.0f / static_cast<float>(fan_in + fan_out));
    Layer layer;
    layer.w = Tensor({fan_in, fan_out});
    rng.fill_uniform(layer.w, -bound, bound);
    layer.b = Tensor({fan_out});
    layer.act = (i + 2 == dims.size()) ? spec.output_act : spec.hidden_act;
    params.layers.push_back(std::move(layer));
  }
  return params;
}

std::vector<Var> MlpVars::flat() const {
  std::vector<Var> out;
  for (const auto& [w, b] : wb) {
    out.push_back(w);
    out.push_back(b);
  }
  return out;
}

MlpVars mlp_leaves(Graph& g, const MlpParams& params, const std::string& prefix) {
  MlpVars vars;
  vars.params = &params;
  for (size_t i = 0; i < params.layers.size(); ++i) {
    Var w = g.leaf(params.layers[i].w, prefix + std::to_string(i) + ".W");
    Var b = g.leaf(params.layers[i].b, prefix + std::to_string(i) + ".b");
    vars.wb.emplace_back(w, b);
  }
  return vars;
}

namespace {

Var activate(Graph& g, Var x, Activation act) {
  switch (act) {
    case Activation::kLinear: return x;
    case Activation::kRelu: return g.relu(x);
    case Activation::kLeakyRelu: return g.leaky_relu(x, kLeakySlope);
    case Activation::kTanh: return g.tanh(x);
  }
  return x;
}

}  // namespace

Var mlp_apply_g(Graph& g, const MlpVars& net, Var x) {
  const bool batched = g.shape_of(x).size() == 2;
  Var h = x;
  for (size_t i = 0; i < net.wb.size(); ++i) {
    const auto& [w, b] = net.wb[i];
    Var z = g.matmul(h, w);
    z = batched ? g.add_bias(z, b) : g.add(z, b);
    h = activate(g, z, net.params->layers[i].act);
  }
  return h;
}

Tensor mlp_apply(const MlpParams& params, const Tensor& x) {
  Graph g;
  Var in = g.leaf(x, "x");
  MlpVars vars = mlp_leaves(g, params, "net.");
  Var out = mlp_apply_g(g, vars, in);
  g.forward(out);
  return g.value(out);
}

NetSpec generator_spec(int n_z, std::vector<int> hidden, int n_x) {
  NetSpec spec;
  spec.input_dim = n_z;
  spec.hidden = std::move(hidden);
  spec.output_dim = n_x;
  spec.hidden_act = Activation::kRelu;
  spec.output_act = Activation::kTanh;
  return spec;
}

NetSpec encoder_spec(int n_x, std::vector<int> hidden, int n_z) {
  NetSpec spec;
  spec.input_dim = n_x;
  spec.hidden = std::move(hidden);
  spec.output_dim = n_z;
  spec.hidden_act = Activation::kLeakyRelu;
  spec.output_act = Activation::kLinear;
  return spec;
}

MlpParams make_t_head(int n_z, Rng& rng) {
  const float bound = std::sqrt(6.0f / static_cast<float>(n_z + 1));
  Layer layer;
  layer.w = Tensor({n_z, 1});
  rng.fill_uniform(layer.w, -bound, bound);
  layer.b = Tensor({1});
  layer.act = Activation::kLinear;
  MlpParams params;
  params.layers.push_back(std::move(layer));
  return params;
}

MlpParams make_avg_t_head(int n_z) {
  Layer layer;
  layer.w = Tensor::full({n_z, 1}, 1.0f / static_cast<float>(n_z));
  layer.b = Tensor({1});
  layer.act = Activation::kLinear;
  MlpParams params;
  params.layers.push_back(std::move(layer));
  return params;
}

}  // namespace ogan

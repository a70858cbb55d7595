#include "ogan/gradcheck_suite.hpp"

#include <cmath>
#include <limits>

#include "ogan/nets.hpp"
#include "ogan/objectives.hpp"
#include "ogan/rng.hpp"

namespace ogan {

namespace {

struct Suite {
  double tolerance;
  GradCheckSuiteResult result;

  void record(const std::string& what, const GradCheckReport& report) {
    ++result.checks;
    if (report.max_rel_err > result.max_rel_err) result.max_rel_err = report.max_rel_err;
    if (!report.pass) result.failures.push_back(what);
  }
};

Tensor random_tensor(Rng& rng, Shape shape, float lo, float hi) {
  Tensor t(std::move(shape));
  rng.fill_uniform(t, lo, hi);
  return t;
}

// Uniform with |v| >= margin, for inputs that must stay away from a kink
// or a singularity.
Tensor random_tensor_margin(Rng& rng, Shape shape, float margin, float hi) {
  Tensor t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) {
    const float mag = rng.next_uniform(margin, hi);
    t.at(i) = rng.next_unit() < 0.5 ? -mag : mag;
  }
  return t;
}

using Builder = Var (*)(Graph&, Var, Var);

void check_binary(Suite& s, Rng& rng, const char* name, Builder build, bool positive_b) {
  const std::vector<std::pair<Shape, Shape>> shapes = {
      {{5}, {5}}, {{3, 4}, {3, 4}}, {{3, 4}, {3, 1}}, {{3, 4}, {1, 4}}, {{3, 4}, {}}, {{}, {2, 3}},
  };
  for (const auto& [sa, sb] : shapes) {
    Graph g;
    Var a = g.leaf(random_tensor(rng, sa, -2.0f, 2.0f), "a");
    Var b = g.leaf(positive_b ? random_tensor_margin(rng, sb, 0.5f, 2.0f)
                              : random_tensor(rng, sb, -2.0f, 2.0f),
                   "b");
    Var root = g.sum(build(g, a, b));
    s.record(std::string(name) + " " + shape_str(sa) + " x " + shape_str(sb),
             grad_check_all(g, root, {a, b}, 1e-3, s.tolerance));
  }
}

using Unary = Var (*)(Graph&, Var);

void check_unary(Suite& s, Rng& rng, const char* name, Unary build, float lo, float hi,
                 float margin = 0.0f) {
  for (const Shape& shape : {Shape{6}, Shape{3, 4}}) {
    Graph g;
    Tensor in = margin > 0.0f ? random_tensor_margin(rng, shape, margin, hi)
                              : random_tensor(rng, shape, lo, hi);
    Var x = g.leaf(std::move(in), "x");
    Var root = g.sum(build(g, x));
    s.record(std::string(name) + " " + shape_str(shape), grad_check(g, root, x, 1e-3, s.tolerance));
  }
}

// Smallest preactivation magnitude of any relu / leaky-relu node; a batch
// whose margin is below the finite-difference footprint would make the
// check measure the kink, not the gradient.
float kink_margin(const Graph& g) {
  float margin = std::numeric_limits<float>::max();
  for (int id = 0; id < g.node_count(); ++id) {
    const Graph::Node& n = g.node(id);
    if (n.op != Op::kRelu && n.op != Op::kLeakyRelu) continue;
    const Graph::Node& input = g.node(n.in[0]);
    if (!input.evaluated) continue;
    for (std::int64_t i = 0; i < input.value.size(); ++i) {
      margin = std::min(margin, std::abs(input.value.at(i)));
    }
  }
  return margin;
}

void check_losses(Suite& s, Rng& rng) {
  const int n_x = 2, n_z = 4, batch = 4;
  for (VariantKind kind : {VariantKind::kOganSimplest, VariantKind::kAblationMse,
                           VariantKind::kOganWithT, VariantKind::kVanilla}) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      Rng g_init = rng.stream(rng.next_u64());
      Rng e_init = rng.stream(rng.next_u64());
      Rng t_init = rng.stream(rng.next_u64());
      MlpParams gen = build_mlp(generator_spec(n_z, {8}, n_x), g_init);
      MlpParams enc = build_mlp(encoder_spec(n_x, {8}, n_z), e_init);
      MlpParams t_head = make_t_head(n_z, t_init);
      Tensor x = random_tensor(rng, {batch, n_x}, -0.9f, 0.9f);
      Tensor z({batch, n_z});
      rng.fill_gaussian(z);
      ObjectiveVariant variant = ObjectiveVariant::defaults(kind, n_x);
      LossBundle b = build_losses(kind, enc, &t_head, gen, x, z, variant);
      b.forward_loss_e();
      b.graph.forward_more(b.loss_g);
      if (kink_margin(b.graph) < 2e-3f) continue;  // redraw away from kinks

      std::vector<Var> leaves = b.e_params;
      for (Var v : b.g_params) leaves.push_back(v);
      s.record(std::string("loss_E[") + variant_name(kind) + "]",
               grad_check_all(b.graph, b.loss_e, b.e_params, 1e-4, s.tolerance));
      s.record(std::string("loss_G[") + variant_name(kind) + "]",
               grad_check_all(b.graph, b.loss_g, leaves, 1e-4, s.tolerance));
      break;
    }
  }
}

}  // namespace

GradCheckSuiteResult run_gradcheck_suite(double tolerance, std::uint64_t seed) {
  Suite s{tolerance, {}};
  Rng rng(seed);

  for (int round = 0; round < 4; ++round) {
    check_binary(s, rng, "add", [](Graph& g, Var a, Var b) { return g.add(a, b); }, false);
    check_binary(s, rng, "sub", [](Graph& g, Var a, Var b) { return g.sub(a, b); }, false);
    check_binary(s, rng, "mul", [](Graph& g, Var a, Var b) { return g.mul(a, b); }, false);
    check_binary(s, rng, "div", [](Graph& g, Var a, Var b) { return g.div(a, b); }, true);

    for (const auto& [sa, sb] : std::vector<std::pair<Shape, Shape>>{
             {{3, 4}, {4, 2}}, {{3, 4}, {4}}, {{4}, {4, 2}}}) {
      Graph g;
      Var a = g.leaf(random_tensor(rng, sa, -1.5f, 1.5f), "a");
      Var b = g.leaf(random_tensor(rng, sb, -1.5f, 1.5f), "b");
      Var root = g.sum(g.matmul(a, b));
      s.record("matmul " + shape_str(sa) + " x " + shape_str(sb),
               grad_check_all(g, root, {a, b}, 1e-3, tolerance));
    }

    {
      Graph g;
      Var m = g.leaf(random_tensor(rng, {4, 3}, -2.0f, 2.0f), "m");
      Var bias = g.leaf(random_tensor(rng, {3}, -1.0f, 1.0f), "bias");
      Var root = g.sum(g.add_bias(m, bias));
      s.record("add_bias", grad_check_all(g, root, {m, bias}, 1e-3, tolerance));
    }

    check_unary(s, rng, "sum", [](Graph& g, Var x) { return g.sum(x); }, -2.0f, 2.0f);
    check_unary(s, rng, "mean", [](Graph& g, Var x) { return g.mean(x); }, -2.0f, 2.0f);
    check_unary(s, rng, "square", [](Graph& g, Var x) { return g.square(x); }, -2.0f, 2.0f);
    check_unary(s, rng, "sqrt", [](Graph& g, Var x) { return g.sqrt(x); }, 0.3f, 2.5f);
    check_unary(s, rng, "exp", [](Graph& g, Var x) { return g.exp(x); }, -2.0f, 2.0f);
    check_unary(s, rng, "softplus", [](Graph& g, Var x) { return g.softplus(x); }, -3.0f, 3.0f);
    check_unary(s, rng, "relu", [](Graph& g, Var x) { return g.relu(x); }, 0.0f, 2.0f, 0.1f);
    check_unary(s, rng, "leaky_relu",
                [](Graph& g, Var x) { return g.leaky_relu(x, kLeakySlope); }, 0.0f, 2.0f, 0.1f);
    check_unary(s, rng, "tanh", [](Graph& g, Var x) { return g.tanh(x); }, -2.0f, 2.0f);

    {
      Graph g;
      Var x = g.leaf(random_tensor(rng, {6, 3}, -2.0f, 2.0f), "x");
      Var root = g.sum(g.square(g.slice_rows(x, 1, 4)));
      s.record("slice_rows [6x3]", grad_check(g, root, x, 1e-3, tolerance));
      Graph g1;
      Var v = g1.leaf(random_tensor(rng, {8}, -2.0f, 2.0f), "v");
      Var root1 = g1.sum(g1.square(g1.slice_rows(v, 2, 5)));
      s.record("slice_rows [8]", grad_check(g1, root1, v, 1e-3, tolerance));
    }
    {
      Graph g;
      Var a = g.leaf(random_tensor(rng, {2, 3}, -2.0f, 2.0f), "a");
      Var b = g.leaf(random_tensor(rng, {3, 3}, -2.0f, 2.0f), "b");
      Var root = g.sum(g.square(g.concat_rows(a, b)));
      s.record("concat_rows", grad_check_all(g, root, {a, b}, 1e-3, tolerance));
    }
  }

  check_losses(s, rng);

  s.result.pass = s.result.failures.empty();
  return s.result;
}

}  // namespace ogan

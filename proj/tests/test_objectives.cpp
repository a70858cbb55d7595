#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ogan/objectives.hpp"
#include "ogan/optimizer.hpp"
#include "ogan/ortho.hpp"
#include "ogan/rng.hpp"

using namespace ogan;

namespace {

MlpParams zero_net(int in, int hidden, int out, Activation hidden_act, Activation out_act) {
  MlpParams p;
  p.layers.push_back({Tensor({in, hidden}), Tensor({hidden}), hidden_act});
  p.layers.push_back({Tensor({hidden, out}), Tensor({out}), out_act});
  return p;
}

// single linear layer acting as the identity map
MlpParams identity_net(int n) {
  MlpParams p;
  Tensor w({n, n});
  for (int i = 0; i < n; ++i) w.at2(i, i) = 1.0f;
  p.layers.push_back({std::move(w), Tensor({n}), Activation::kLinear});
  return p;
}

struct Nets {
  MlpParams gen, enc, t_head;
};

Nets random_nets(std::uint64_t seed, int n_z = 8, int n_x = 2) {
  Rng root(seed);
  Rng g_init = root.stream(1), e_init = root.stream(2), t_init = root.stream(3);
  Nets n;
  n.gen = build_mlp(generator_spec(n_z, {16, 16}, n_x), g_init);
  n.enc = build_mlp(encoder_spec(n_x, {16, 16}, n_z), e_init);
  n.t_head = make_t_head(n_z, t_init);
  return n;
}

std::pair<Tensor, Tensor> random_batches(std::uint64_t seed, int b, int n_x, int n_z) {
  Rng rng(seed);
  Tensor x({b, n_x});
  rng.fill_uniform(x, -0.9f, 0.9f);
  Tensor z({b, n_z});
  rng.fill_gaussian(z);
  return {x, z};
}

float eval_scalar(LossBundle& bundle, Var v) {
  bundle.graph.forward_more(v);
  return bundle.graph.value(v).at(0);
}

}  // namespace

TEST_CASE("vanilla losses at D == 0 hit the ideal-state values") {
  const MlpParams enc = zero_net(2, 8, 4, Activation::kLeakyRelu, Activation::kLinear);
  MlpParams t;
  t.layers.push_back({Tensor({4, 1}), Tensor({1}), Activation::kLinear});
  Nets nets = random_nets(1, 4, 2);
  auto [x, z] = random_batches(2, 8, 2, 4);
  LossBundle b = vanilla_losses(enc, t, nets.gen, x, z, ObjectiveVariant::defaults(VariantKind::kVanilla, 2));
  b.forward_loss_e();
  CHECK(b.graph.value(b.loss_e).at(0) == doctest::Approx(2.0f * std::log(2.0f)).epsilon(1e-6));
  b.forward_loss_g();
  CHECK(b.graph.value(b.loss_g).at(0) == doctest::Approx(std::log(2.0f)).epsilon(1e-6));
}

TEST_CASE("vanilla loss vanishes when D separates perfectly") {
  // a T head with a huge bias drives sp(-D(x)) and the fake branch needs
  // the score negative; emulate by evaluating the softplus limits directly
  Graph g;
  Var big = g.leaf(Tensor::scalar(40.0f));
  Var loss = g.add(g.softplus(g.sub(g.constant(0.0f), big)), g.softplus(g.sub(g.constant(0.0f), big)));
  g.forward(loss);
  CHECK(g.value(loss).at(0) < 1e-6f);
}

TEST_CASE("rho_term: exact cases") {
  Rng rng(3);
  Tensor z({4, 8});
  rng.fill_gaussian(z);

  {
    Graph g;
    Var zv = g.leaf(z), cv = g.leaf(z);
    Var rho = rho_term(g, zv, cv);
    g.forward(rho);
    CHECK(g.value(rho).at(0) == doctest::Approx(1.0f).epsilon(1e-5));
  }
  {
    // antisymmetric rows: reversal is exact negation
    Tensor za({3, 5});
    for (int r = 0; r < 3; ++r) {
      const float a = 1.0f + r, b = 0.5f + r;
      const float vals[5] = {a, b, 0.0f, -b, -a};
      for (int c = 0; c < 5; ++c) za.at2(r, c) = vals[c];
    }
    Tensor rev({3, 5});
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 5; ++c) rev.at2(r, c) = za.at2(r, 4 - c);
    }
    Graph g;
    Var rho = rho_term(g, g.leaf(za), g.leaf(rev));
    g.forward(rho);
    CHECK(g.value(rho).at(0) == doctest::Approx(-1.0f).epsilon(1e-5));
  }
  {
    Tensor affine(z.shape());
    for (std::int64_t i = 0; i < z.size(); ++i) affine.at(i) = 3.0f * z.at(i) + 7.0f;
    Graph g;
    Var rho = rho_term(g, g.leaf(z), g.leaf(affine));
    g.forward(rho);
    CHECK(g.value(rho).at(0) == doctest::Approx(1.0f).epsilon(1e-5));
  }
}

TEST_CASE("regularizer_r: exact cases") {
  {
    // equal scores
    Graph g;
    Var s = g.leaf(Tensor::matrix(3, 1, {1, 2, 3}));
    Var x = g.leaf(Tensor::matrix(3, 2, {0, 0, 1, 1, -1, 0}));
    Var gx = g.leaf(Tensor::matrix(3, 2, {1, 0, 0, 1, 0, 0}));
    Var r = regularizer_r(g, s, s, x, gx, 0.0f);
    g.forward(r);
    CHECK(g.value(r).at(0) == 0.0f);
  }
  {
    // n_x = 1 closed form: (1-0)^2 / (1-0)^2 = 1
    Graph g;
    Var sr = g.leaf(Tensor::matrix(1, 1, {1}));
    Var sf = g.leaf(Tensor::matrix(1, 1, {0}));
    Var x = g.leaf(Tensor::matrix(1, 1, {1}));
    Var gx = g.leaf(Tensor::matrix(1, 1, {0}));
    Var r = regularizer_r(g, sr, sf, x, gx, 0.0f);
    g.forward(r);
    CHECK(g.value(r).at(0) == doctest::Approx(1.0f));
  }
  {
    // x == G(z): the eps guard keeps the ratio finite
    Graph g;
    Var sr = g.leaf(Tensor::matrix(2, 1, {1, 2}));
    Var sf = g.leaf(Tensor::matrix(2, 1, {0, 0}));
    Var x = g.leaf(Tensor::matrix(2, 2, {0.5f, 0.5f, -0.5f, 0.25f}));
    Var r = regularizer_r(g, sr, sf, x, x, 1e-8f);
    g.forward(r);
    CHECK(std::isfinite(g.value(r).at(0)));
    CHECK(g.value(r).at(0) > 1e6f);
  }
}

TEST_CASE("ogan_simplest with lambda1 = lambda2 = 0 is the bare adversarial pair") {
  Nets nets = random_nets(11);
  auto [x, z] = random_batches(12, 16, 2, 8);
  ObjectiveVariant v = ObjectiveVariant::defaults(VariantKind::kOganSimplest, 2);
  v.lambda1 = 0.0f;
  v.lambda2 = 0.0f;
  LossBundle b = ogan_simplest_losses(nets.enc, nets.gen, x, z, v);
  b.forward_loss_e();

  const Tensor codes_real = mlp_apply(nets.enc, x);
  const Tensor codes_fake = mlp_apply(nets.enc, mlp_apply(nets.gen, z));
  double sr = 0.0, sf = 0.0;
  for (int r = 0; r < 16; ++r) {
    sr += ortho::avg(codes_real.row(r));
    sf += ortho::avg(codes_fake.row(r));
  }
  CHECK(b.graph.value(b.loss_e).at(0) == doctest::Approx((sr - sf) / 16.0).epsilon(1e-5));

  b.forward_loss_g();
  CHECK(b.graph.value(b.loss_g).at(0) == doctest::Approx(sf / 16.0).epsilon(1e-5));
}

TEST_CASE("ogan_simplest with a zero encoder degenerates to zero loss") {
  const MlpParams enc = zero_net(2, 8, 8, Activation::kLeakyRelu, Activation::kLinear);
  Nets nets = random_nets(21);
  auto [x, z] = random_batches(22, 8, 2, 8);
  LossBundle b = ogan_simplest_losses(enc, nets.gen, x, z,
                                      ObjectiveVariant::defaults(VariantKind::kOganSimplest, 2));
  b.forward_loss_e();
  CHECK(b.graph.value(b.loss_e).at(0) == doctest::Approx(0.0f).epsilon(1e-6));
  CHECK(eval_scalar(b, b.rho_batch) == 0.0f);
  CHECK(eval_scalar(b, b.r_batch) == 0.0f);
}

TEST_CASE("one rmsprop step on loss_E decreases loss_E on the same batch") {
  Nets nets = random_nets(31);
  auto [x, z] = random_batches(32, 16, 2, 8);
  const ObjectiveVariant v = ObjectiveVariant::defaults(VariantKind::kOganSimplest, 2);

  float before;
  {
    LossBundle b = ogan_simplest_losses(nets.enc, nets.gen, x, z, v);
    b.forward_loss_e();
    before = b.graph.value(b.loss_e).at(0);
    b.graph.backward(b.loss_e);
    std::vector<Tensor> grads;
    for (Var p : b.e_params) grads.push_back(b.graph.grad(p));
    OptState opt = make_opt_state(nets.enc.tensors());
    rmsprop_step(nets.enc.tensors(), grads, nets.enc.tensor_names("E."), opt, 1e-4f, 0.99f, 1e-8f);
  }
  LossBundle after_bundle = ogan_simplest_losses(nets.enc, nets.gen, x, z, v);
  after_bundle.forward_loss_e();
  CHECK(after_bundle.graph.value(after_bundle.loss_e).at(0) < before);
}

TEST_CASE("with-T and simplest bundles coincide for T = avg over 100 instances") {
  for (int trial = 0; trial < 100; ++trial) {
    Nets nets = random_nets(100 + static_cast<std::uint64_t>(trial));
    auto [x, z] = random_batches(200 + static_cast<std::uint64_t>(trial), 6, 2, 8);
    const ObjectiveVariant v = ObjectiveVariant::defaults(VariantKind::kOganWithT, 2);
    const MlpParams t_avg = make_avg_t_head(8);

    LossBundle bt = ogan_with_t_losses(nets.enc, t_avg, nets.gen, x, z, v);
    LossBundle bs = ogan_simplest_losses(nets.enc, nets.gen, x, z, v);
    bt.forward_loss_e();
    bs.forward_loss_e();
    CHECK(std::abs(bt.graph.value(bt.loss_e).at(0) - bs.graph.value(bs.loss_e).at(0)) <= 1e-6f);
    bt.forward_loss_g();
    bs.forward_loss_g();
    CHECK(std::abs(bt.graph.value(bt.loss_g).at(0) - bs.graph.value(bs.loss_g).at(0)) <= 1e-6f);
  }
}

TEST_CASE("with-T at lambda2 = 0 is a plain GAN with composite discriminator") {
  Nets nets = random_nets(41);
  auto [x, z] = random_batches(42, 8, 2, 8);
  ObjectiveVariant v = ObjectiveVariant::defaults(VariantKind::kOganWithT, 2);
  v.lambda2 = 0.0f;
  LossBundle b = ogan_with_t_losses(nets.enc, nets.t_head, nets.gen, x, z, v);
  b.forward_loss_e();
  const float sr = eval_scalar(b, b.score_real);
  const float sf = eval_scalar(b, b.score_fake);
  const float r = eval_scalar(b, b.r_batch);
  CHECK(b.graph.value(b.loss_e).at(0) ==
        doctest::Approx(sr - sf + v.lambda1 * r).epsilon(1e-5));
  b.forward_loss_g();
  CHECK(b.graph.value(b.loss_g).at(0) == doctest::Approx(sf).epsilon(1e-5));
}

TEST_CASE("ablation mse: exact identity-net cases") {
  const int n = 4;
  const MlpParams gen = identity_net(n);
  ObjectiveVariant v = ObjectiveVariant::defaults(VariantKind::kAblationMse, n);
  auto [x, z] = random_batches(52, 8, n, n);

  {
    // E(G(z)) = z exactly: the mse term contributes nothing
    const MlpParams enc = identity_net(n);
    LossBundle b = ablation_mse_losses(enc, gen, x, z, v);
    b.forward_loss_g();
    double mean_avg = 0.0;
    for (int r = 0; r < 8; ++r) mean_avg += ortho::avg(z.row(r));
    CHECK(b.graph.value(b.loss_g).at(0) == doctest::Approx(mean_avg / 8.0).epsilon(1e-5));
  }
  {
    // codes = z + c: mse = c^2 while the correlation stays exactly 1
    const float c = 0.75f;
    MlpParams enc = identity_net(n);
    for (int i = 0; i < n; ++i) enc.layers[0].b.at(i) = c;
    LossBundle b = ablation_mse_losses(enc, gen, x, z, v);
    b.forward_loss_g();
    double mean_avg = 0.0;
    for (int r = 0; r < 8; ++r) mean_avg += ortho::avg(z.row(r));
    CHECK(b.graph.value(b.loss_g).at(0) ==
          doctest::Approx(mean_avg / 8.0 + c + v.lambda2 * c * c).epsilon(1e-4));
    CHECK(eval_scalar(b, b.rho_batch) == doctest::Approx(1.0f).epsilon(1e-5));
  }
}

TEST_CASE("score-shift freedom: constant code offsets change nothing that matters") {
  Nets nets = random_nets(61);
  auto [x, z] = random_batches(62, 16, 2, 8);
  const ObjectiveVariant v = ObjectiveVariant::defaults(VariantKind::kOganSimplest, 2);

  LossBundle b0 = ogan_simplest_losses(nets.enc, nets.gen, x, z, v);
  b0.forward_loss_e();
  const float adv0 = eval_scalar(b0, b0.score_real) - eval_scalar(b0, b0.score_fake);
  const float rho0 = eval_scalar(b0, b0.rho_batch);

  const float c = 0.37f;
  MlpParams shifted = nets.enc;
  Tensor& bias = shifted.layers.back().b;
  for (std::int64_t i = 0; i < bias.size(); ++i) bias.at(i) += c;

  LossBundle b1 = ogan_simplest_losses(shifted, nets.gen, x, z, v);
  b1.forward_loss_e();
  const float adv1 = eval_scalar(b1, b1.score_real) - eval_scalar(b1, b1.score_fake);
  const float rho1 = eval_scalar(b1, b1.rho_batch);

  CHECK(std::abs(adv1 - adv0) < 1e-5f);
  CHECK(std::abs(rho1 - rho0) < 1e-5f);
  // the scores themselves move by exactly the shift
  CHECK(eval_scalar(b1, b1.score_real) - eval_scalar(b0, b0.score_real) ==
        doctest::Approx(c).epsilon(1e-4));
}

TEST_CASE("E-step gradients never reach the generator") {
  for (VariantKind kind : {VariantKind::kOganSimplest, VariantKind::kAblationMse,
                           VariantKind::kOganWithT, VariantKind::kVanilla}) {
    Nets nets = random_nets(71);
    auto [x, z] = random_batches(72, 8, 2, 8);
    LossBundle b = build_losses(kind, nets.enc, &nets.t_head, nets.gen, x, z,
                                ObjectiveVariant::defaults(kind, 2));
    b.forward_loss_e();
    b.graph.backward(b.loss_e);
    for (Var p : b.g_params) {
      const Tensor grad = b.graph.grad(p);
      for (std::int64_t i = 0; i < grad.size(); ++i) CHECK(grad.at(i) == 0.0f);
    }
    // and the G objective does reach it
    b.forward_loss_g();
    b.graph.backward(b.loss_g);
    float total = 0.0f;
    for (Var p : b.g_params) {
      const Tensor grad = b.graph.grad(p);
      for (std::int64_t i = 0; i < grad.size(); ++i) total += std::abs(grad.at(i));
    }
    CHECK(total > 0.0f);
  }
}

TEST_CASE("batch size mismatch is rejected") {
  Nets nets = random_nets(81);
  Tensor x({4, 2}), z({5, 8});
  CHECK_THROWS_AS(ogan_simplest_losses(nets.enc, nets.gen, x, z,
                                       ObjectiveVariant::defaults(VariantKind::kOganSimplest, 2)),
                  ShapeError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ogan/eval.hpp"
#include "ogan/ortho.hpp"

using namespace ogan;

namespace {

MlpParams identity_net(int n) {
  MlpParams p;
  Tensor w({n, n});
  for (int i = 0; i < n; ++i) w.at2(i, i) = 1.0f;
  p.layers.push_back({std::move(w), Tensor({n}), Activation::kLinear});
  return p;
}

// linear decoder u -> s*u + m, the exact inverse of N on rows with
// avg m and std s
MlpParams affine_net(int n, float scale, float mean) {
  MlpParams p;
  Tensor w({n, n});
  for (int i = 0; i < n; ++i) w.at2(i, i) = scale;
  Tensor b({n});
  for (int i = 0; i < n; ++i) b.at(i) = mean;
  p.layers.push_back({std::move(w), std::move(b), Activation::kLinear});
  return p;
}

// rows re-scaled to exact avg m and std s
Tensor rows_with_stats(Rng& rng, int rows, int cols, float m, float s) {
  Tensor x({rows, cols});
  rng.fill_gaussian(x);
  for (int r = 0; r < rows; ++r) {
    const Tensor nr = ortho::normalize(x.row(r), 0.0f);
    for (int c = 0; c < cols; ++c) x.at2(r, c) = s * nr.at(c) + m;
  }
  return x;
}

}  // namespace

TEST_CASE("reconstruction inverts a constructed linear pair") {
  const int n = 4;
  Rng rng(1);
  const float m = 0.3f, s = 0.2f;
  const Tensor x = rows_with_stats(rng, 16, n, m, s);
  const MlpParams enc = identity_net(n);
  const MlpParams gen = affine_net(n, s, m);
  const Tensor xhat = reconstruction(enc, gen, x, 1e-8f);
  for (std::int64_t i = 0; i < x.size(); ++i) {
    CHECK(xhat.at(i) == doctest::Approx(x.at(i)).epsilon(1e-5));
  }
}

TEST_CASE("reconstruction through random nets stays in the generator range") {
  Rng root(2);
  Rng g_init = root.stream(1), e_init = root.stream(2);
  const MlpParams gen = build_mlp(generator_spec(8, {16}, 2), g_init);
  const MlpParams enc = build_mlp(encoder_spec(2, {16}, 8), e_init);
  Tensor x({32, 2});
  root.fill_uniform(x, -0.9f, 0.9f);
  const Tensor xhat = reconstruction(enc, gen, x);
  CHECK(xhat.all_finite());
  for (std::int64_t i = 0; i < xhat.size(); ++i) {
    CHECK(xhat.at(i) > -1.0f);
    CHECK(xhat.at(i) < 1.0f);
  }
}

TEST_CASE("reconstruction is invariant to constant code shifts") {
  Rng root(3);
  Rng g_init = root.stream(1), e_init = root.stream(2);
  const MlpParams gen = build_mlp(generator_spec(8, {16}, 2), g_init);
  MlpParams enc = build_mlp(encoder_spec(2, {16}, 8), e_init);
  Tensor x({8, 2});
  root.fill_uniform(x, -0.9f, 0.9f);
  const Tensor base = reconstruction(enc, gen, x);

  Tensor& bias = enc.layers.back().b;
  for (std::int64_t i = 0; i < bias.size(); ++i) bias.at(i) += 2.5f;
  const Tensor shifted = reconstruction(enc, gen, x);
  for (std::int64_t i = 0; i < base.size(); ++i) {
    CHECK(shifted.at(i) == doctest::Approx(base.at(i)).epsilon(1e-5));
  }
}

TEST_CASE("recon_rho: identity composition scores 1, constant encoder 0") {
  const int n = 8;
  const MlpParams gen = identity_net(n);
  const MlpParams enc = identity_net(n);
  Rng rng(4);
  CHECK(recon_rho(enc, gen, rng, 256) == doctest::Approx(1.0f).epsilon(1e-5));

  MlpParams constant;
  constant.layers.push_back({Tensor({n, n}), Tensor::full({n}, 3.0f), Activation::kLinear});
  Rng rng2(4);
  CHECK(recon_rho(constant, gen, rng2, 256) == 0.0f);

  Rng rng3(4);
  CHECK_THROWS_AS(recon_rho(enc, gen, rng3, 50), std::invalid_argument);
}

TEST_CASE("latent_stats: zero encoder and whitened identity") {
  const int n = 6;
  MlpParams zero;
  zero.layers.push_back({Tensor({n, n}), Tensor({n}), Activation::kLinear});
  Rng rng(5);
  Tensor x({64, n});
  rng.fill_gaussian(x);
  auto [avg0, std0] = latent_stats(zero, x);
  CHECK(avg0 == 0.0f);
  CHECK(std0 == 0.0f);

  const Tensor whitened = rows_with_stats(rng, 64, n, 0.0f, 1.0f);
  auto [avg1, std1] = latent_stats(identity_net(n), whitened);
  CHECK(std::abs(avg1) < 1e-5f);
  CHECK(std::abs(std1 - 1.0f) < 1e-4f);
}

TEST_CASE("mode coverage: constant generator covers exactly one mode") {
  DatasetSpec spec;
  spec.kind = DatasetKind::kGaussianMixture;
  spec.modes = 8;
  spec.sigma = 0.05f;
  const auto centers = mixture_centers(8, 0.7f);

  MlpParams gen;
  Tensor w({4, 2});
  Tensor b({2});
  b.at(0) = std::atanh(centers[2][0]);
  b.at(1) = std::atanh(centers[2][1]);
  gen.layers.push_back({std::move(w), std::move(b), Activation::kTanh});

  Rng rng(6);
  const Coverage cov = mode_coverage(gen, spec, rng, 2000);
  CHECK(cov.covered == 1);
  CHECK(cov.fractions[2] == doctest::Approx(1.0f));
}

TEST_CASE("mode coverage: the oracle sampler covers every mode, K <= 16") {
  for (int k : {2, 8, 16}) {
    DatasetSpec spec;
    spec.kind = DatasetKind::kGaussianMixture;
    spec.modes = k;
    spec.sigma = 0.05f;
    Rng rng(7);
    const Batch batch = sample_mixture(spec, rng, 10000);
    const Coverage cov =
        coverage_from_points(batch.x, mixture_centers(k, spec.radius), spec.sigma);
    CHECK(cov.covered == k);
    for (float f : cov.fractions) {
      CHECK(f > 0.7f / static_cast<float>(k));
      CHECK(f < 1.3f / static_cast<float>(k));
    }
  }
}

TEST_CASE("density ratio check: exact log-ratio and degenerate cases") {
  // p = N(0,1), q = N(0.5,1): log p - log q = 0.125 - 0.5 x
  const auto exact = [](float x) { return 0.125f - 0.5f * x; };
  const DensityRatioResult good = density_ratio_check(exact, 0.0f, 1.0f, 0.5f, 1.0f);
  CHECK(!good.degenerate);
  CHECK(good.corr == doctest::Approx(1.0f).epsilon(1e-6));

  const DensityRatioResult flat = density_ratio_check([](float) { return 2.0f; }, 0.0f, 1.0f,
                                                      0.5f, 1.0f);
  CHECK(flat.degenerate);
  CHECK(flat.corr == 0.0f);

  const DensityRatioResult anti = density_ratio_check([](float x) { return 0.5f * x; }, 0.0f,
                                                      1.0f, 0.5f, 1.0f);
  CHECK(anti.corr == doctest::Approx(-1.0f).epsilon(1e-6));
}

TEST_CASE("interpolate: endpoint contract and constant paths") {
  Rng root(8);
  Rng g_init = root.stream(1), e_init = root.stream(2);
  const MlpParams gen = build_mlp(generator_spec(8, {16}, 2), g_init);
  const MlpParams enc = build_mlp(encoder_spec(2, {16}, 8), e_init);
  const Tensor xa = Tensor::vec({0.4f, -0.2f});
  const Tensor xb = Tensor::vec({-0.6f, 0.3f});

  const Tensor path = interpolate(enc, gen, xa, xb, 7);
  REQUIRE(path.dim(0) == 7);

  const Tensor ra = reconstruction(enc, gen, xa.reshaped({1, 2}));
  const Tensor rb = reconstruction(enc, gen, xb.reshaped({1, 2}));
  for (int c = 0; c < 2; ++c) {
    CHECK(path.at2(0, c) == ra.at2(0, c));      // bit-exact
    CHECK(path.at2(6, c) == rb.at2(0, c));
  }

  const Tensor two = interpolate(enc, gen, xa, xb, 2);
  for (int c = 0; c < 2; ++c) {
    CHECK(two.at2(0, c) == ra.at2(0, c));
    CHECK(two.at2(1, c) == rb.at2(0, c));
  }

  const Tensor constant = interpolate(enc, gen, xa, xa, 5);
  for (int s = 1; s < 5; ++s) {
    for (int c = 0; c < 2; ++c) CHECK(constant.at2(s, c) == constant.at2(0, c));
  }

  CHECK_THROWS_AS(interpolate(enc, gen, xa, xb, 1), std::invalid_argument);
}

TEST_CASE("interpolation paths from smooth nets are continuous") {
  Rng root(9);
  Rng g_init = root.stream(1), e_init = root.stream(2);
  const MlpParams gen = build_mlp(generator_spec(8, {32}, 2), g_init);
  const MlpParams enc = build_mlp(encoder_spec(2, {32}, 8), e_init);
  const Tensor path =
      interpolate(enc, gen, Tensor::vec({0.7f, 0.0f}), Tensor::vec({-0.7f, 0.1f}), 32);
  for (int s = 1; s < 32; ++s) {
    const float dx = path.at2(s, 0) - path.at2(s - 1, 0);
    const float dy = path.at2(s, 1) - path.at2(s - 1, 1);
    CHECK(std::hypot(dx, dy) < 0.5f);
  }
}

TEST_CASE("oracle discriminator training recovers the log-ratio shape") {
  OracleTrainOptions opts;
  opts.steps = 600;  // short sanity run; the full 5k-step run is in acceptance
  opts.batch_size = 128;
  const Discriminator1D d = train_vanilla_discriminator_1d(opts);
  const DensityRatioResult r = density_ratio_check([&](float x) { return d.score(x); }, opts.p_mu,
                                                   opts.p_sigma, opts.q_mu, opts.q_sigma);
  CHECK(!r.degenerate);
  CHECK(r.corr > 0.5f);
}

TEST_CASE("run_eval produces a self-consistent report") {
  TrainConfig cfg;
  cfg.n_z = 4;
  cfg.gen_hidden = {8};
  cfg.enc_hidden = {8};
  cfg.batch_size = 8;
  cfg.iterations = 0;
  TrainState st = init_train_state(cfg);
  EvalOptions opts;
  opts.recon_samples = 128;
  opts.latent_samples = 256;
  opts.coverage_samples = 1000;
  const EvalReport report = run_eval(st, opts);
  CHECK(report.recon_rho >= -1.0f);
  CHECK(report.recon_rho <= 1.0f);
  CHECK(report.modes_covered >= 0);
  CHECK(report.modes_covered <= 8);
  CHECK(report.coverage_fractions.size() == 8);
  const std::string kv = report.to_kv();
  CHECK(kv.find("recon_rho=") != std::string::npos);
  CHECK(kv.find("modes_covered=") != std::string::npos);
  CHECK(report.to_annotation().rfind("#eval ", 0) == 0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ogan/gradcheck.hpp"
#include "ogan/ortho.hpp"
#include "ogan/rng.hpp"

using namespace ogan;

namespace {

Tensor random_vec(Rng& rng, int n) {
  Tensor t({n});
  rng.fill_gaussian(t);
  return t;
}

}  // namespace

TEST_CASE("avg: arithmetic mean") {
  CHECK(ortho::avg(Tensor::vec({1, 2, 3})) == doctest::Approx(2.0f).epsilon(1e-6));
  CHECK(ortho::avg(Tensor::vec({0, 0, 0, 0})) == doctest::Approx(0.0f));
  CHECK(ortho::avg(Tensor::vec({-1, 1})) == doctest::Approx(0.0f));
  CHECK_THROWS_AS(Tensor({0}), ShapeError);  // empty vectors are unconstructible
  CHECK_THROWS_AS(ortho::avg(Tensor::matrix(1, 2, {1, 2})), ShapeError);
}

TEST_CASE("std: population standard deviation with 1/n divisor") {
  CHECK(ortho::stddev(Tensor::vec({1, 2, 3})) == doctest::Approx(0.8164966f).epsilon(1e-6));
  CHECK(ortho::stddev(Tensor::vec({5, 5, 5})) == 0.0f);
  for (float a : {0.0f, 0.5f, 2.0f, 7.25f}) {
    CHECK(ortho::stddev(Tensor::vec({-a, a})) == doctest::Approx(a).epsilon(1e-6));
  }
}

TEST_CASE("normalize: exact values and fixed point") {
  const Tensor n = ortho::normalize(Tensor::vec({1, 2, 3}), 0.0f);
  CHECK(n.at(0) == doctest::Approx(-1.2247449f).epsilon(1e-6));
  CHECK(n.at(1) == doctest::Approx(0.0f));
  CHECK(n.at(2) == doctest::Approx(1.2247449f).epsilon(1e-6));

  // a vector already at avg 0, std 1 is its own normalization
  const Tensor again = ortho::normalize(n, 0.0f);
  for (std::int64_t i = 0; i < n.size(); ++i) {
    CHECK(again.at(i) == doctest::Approx(n.at(i)).epsilon(1e-6));
  }

  CHECK_THROWS_AS(ortho::normalize(Tensor::vec({7, 7, 7}), 0.0f), SingularityError);
  CHECK_THROWS(ortho::normalize(Tensor::vec({1, 2}), 0.0f));  // length < 3
}

TEST_CASE("normalize output statistics at eps 1e-8") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor v = random_vec(rng, 8);
    const Tensor n = ortho::normalize(v, 1e-8f);
    CHECK(std::abs(ortho::avg(n)) < 1e-5f);
    CHECK(std::abs(ortho::stddev(n) - 1.0f) < 1e-3f);
  }
}

TEST_CASE("pearson: exact values") {
  CHECK(ortho::pearson(Tensor::vec({1, 2, 3}), Tensor::vec({2, 4, 6}), 0.0f) ==
        doctest::Approx(1.0f).epsilon(1e-6));
  CHECK(ortho::pearson(Tensor::vec({1, 2, 3}), Tensor::vec({3, 2, 1}), 0.0f) ==
        doctest::Approx(-1.0f).epsilon(1e-6));
  CHECK(ortho::pearson(Tensor::vec({1, 0, -1}), Tensor::vec({0, 1, 0}), 0.0f) ==
        doctest::Approx(0.0f));
}

TEST_CASE("pearson: error contracts") {
  CHECK_THROWS_AS(ortho::pearson(Tensor::vec({1, 2, 3}), Tensor::vec({1, 2, 3, 4}), 0.0f),
                  ShapeError);
  CHECK_THROWS_AS(ortho::pearson(Tensor::vec({4, 4, 4}), Tensor::vec({4, 4, 4}), 0.0f),
                  SingularityError);
  // eps rule: constant inputs give 0 instead of erroring
  CHECK(ortho::pearson(Tensor::vec({4, 4, 4}), Tensor::vec({1, 2, 3}), 1e-8f) == 0.0f);
  CHECK(ortho::pearson(Tensor::vec({4, 4, 4}), Tensor::vec({4, 4, 4}), 1e-8f) == 0.0f);
}

TEST_CASE("normalized_mse: exact values and the 2n(1-rho) identity") {
  CHECK(ortho::normalized_mse(Tensor::vec({1, 2, 3}), Tensor::vec({3, 2, 1})) ==
        doctest::Approx(12.0f).epsilon(1e-6));
  const Tensor z = Tensor::vec({0.5f, -1.25f, 2.0f, 0.25f});
  CHECK(ortho::normalized_mse(z, z) == doctest::Approx(0.0f).epsilon(1e-6));

  Rng rng(17);
  const Tensor a = random_vec(rng, 8);
  const Tensor b = random_vec(rng, 8);
  const float rho = ortho::pearson(a, b, 0.0f);
  CHECK(ortho::normalized_mse(a, b) == doctest::Approx(16.0f * (1.0f - rho)).epsilon(1e-5));
}

TEST_CASE("identity holds over 1000 random pairs within 1e-4") {
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_index(14));
    const Tensor z = random_vec(rng, n);
    const Tensor h = random_vec(rng, n);
    const float rho = ortho::pearson(z, h, 0.0f);
    const float lhs = ortho::normalized_mse(z, h);
    const float rhs = 2.0f * static_cast<float>(n) * (1.0f - rho);
    CHECK(std::abs(lhs - rhs) < 1e-4f);
  }
}

TEST_CASE("affine invariance of pearson") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const Tensor z = random_vec(rng, 8);
    const Tensor h = random_vec(rng, 8);
    const float rho = ortho::pearson(z, h, 0.0f);
    const float a = rng.next_uniform(0.1f, 4.0f);
    const float c = rng.next_uniform(-5.0f, 5.0f);
    Tensor scaled({8});
    for (int i = 0; i < 8; ++i) scaled.at(i) = a * h.at(i) + c;
    CHECK(std::abs(ortho::pearson(z, scaled, 0.0f) - rho) < 1e-5f);
    for (int i = 0; i < 8; ++i) scaled.at(i) = -a * h.at(i) + c;
    CHECK(std::abs(ortho::pearson(z, scaled, 0.0f) + rho) < 1e-5f);
  }
}

TEST_CASE("pearson range stays within [-1, 1] up to eps error") {
  Rng rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const Tensor z = random_vec(rng, 6);
    const Tensor h = random_vec(rng, 6);
    const float rho = ortho::pearson(z, h, ortho::kDefaultEps);
    CHECK(rho >= -1.0f - 1e-5f);
    CHECK(rho <= 1.0f + 1e-5f);
  }
}

TEST_CASE("pearson gradient passes grad_check for both arguments") {
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    Graph g;
    Var z = g.leaf(random_vec(rng, 8), "z");
    Var h = g.leaf(random_vec(rng, 8), "h");
    Var rho = ortho::pearson_g(g, z, h, ortho::kDefaultEps);
    CHECK(grad_check_all(g, rho, {z, h}, 1e-3, 1e-4).pass);
  }
}

TEST_CASE("correlation decays as independent noise grows") {
  Rng rng(55);
  double mean_rho[3] = {0, 0, 0};
  const float sigmas[3] = {0.1f, 1.0f, 4.0f};
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const Tensor z = random_vec(rng, 16);
    for (int s = 0; s < 3; ++s) {
      Tensor noisy({16});
      for (int i = 0; i < 16; ++i) noisy.at(i) = z.at(i) + sigmas[s] * rng.next_gaussian();
      mean_rho[s] += ortho::pearson(z, noisy, 0.0f);
    }
  }
  for (double& m : mean_rho) m /= trials;
  CHECK(mean_rho[0] > mean_rho[1]);
  CHECK(mean_rho[1] > mean_rho[2]);
}

TEST_CASE("graph builders agree with the plain evaluators") {
  Rng rng(63);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor z = random_vec(rng, 8);
    const Tensor h = random_vec(rng, 8);
    Graph g;
    Var zv = g.leaf(z), hv = g.leaf(h);
    Var a = ortho::avg_g(g, zv);
    Var s = ortho::std_g(g, zv);
    Var rho = ortho::pearson_g(g, zv, hv, 1e-8f);
    g.forward(rho);
    g.forward_more(a);
    g.forward_more(s);
    CHECK(g.value(a).at(0) == doctest::Approx(ortho::avg(z)).epsilon(1e-5));
    CHECK(g.value(s).at(0) == doctest::Approx(ortho::stddev(z)).epsilon(1e-5));
    CHECK(g.value(rho).at(0) == doctest::Approx(ortho::pearson(z, h, 1e-8f)).epsilon(1e-5));
  }
}

TEST_CASE("row-wise builders match per-row plain evaluation") {
  Rng rng(70);
  Tensor zm({5, 8}), hm({5, 8});
  rng.fill_gaussian(zm);
  rng.fill_gaussian(hm);
  Graph g;
  Var z = g.leaf(zm), h = g.leaf(hm);
  Var ravg = ortho::row_avg(g, z);
  Var rstd = ortho::row_std(g, z);
  Var rnorm = ortho::row_normalize(g, z, 1e-8f);
  Var rrho = ortho::row_pearson(g, z, h, 1e-8f);
  g.forward(rrho);
  g.forward_more(ravg);
  g.forward_more(rstd);
  g.forward_more(rnorm);
  for (int r = 0; r < 5; ++r) {
    const Tensor zr = zm.row(r), hr = hm.row(r);
    CHECK(g.value(ravg).at(r) == doctest::Approx(ortho::avg(zr)).epsilon(1e-5));
    CHECK(g.value(rstd).at(r) == doctest::Approx(ortho::stddev(zr)).epsilon(1e-5));
    CHECK(g.value(rrho).at(r) == doctest::Approx(ortho::pearson(zr, hr, 1e-8f)).epsilon(1e-5));
    const Tensor nr = ortho::normalize(zr, 1e-8f);
    for (int c = 0; c < 8; ++c) {
      CHECK(g.value(rnorm).at2(r, c) == doctest::Approx(nr.at(c)).epsilon(1e-5));
    }
  }
}

#ifndef OGAN_OBJECTIVES_HPP
#define OGAN_OBJECTIVES_HPP

#include <string>
#include <vector>

#include "ogan/graph.hpp"
#include "ogan/nets.hpp"
#include "ogan/ortho.hpp"

namespace ogan {

enum class VariantKind : std::uint8_t { kVanilla, kOganWithT, kOganSimplest, kAblationMse };

const char* variant_name(VariantKind k);
VariantKind variant_from_name(const std::string& name);

/// Loss-variant selection plus its weights. lambda1 defaults to 0.25/n_x
/// and lambda2 to 0.5; eps_r guards the regularizer denominator and
/// rho_eps the correlation denominators.
struct ObjectiveVariant {
  VariantKind kind = VariantKind::kOganSimplest;
  float lambda1 = 0.0f;
  float lambda2 = 0.5f;
  float eps_r = 1e-8f;
  float rho_eps = ortho::kDefaultEps;

  static ObjectiveVariant defaults(VariantKind kind, int n_x);
};

/// The two optimisation targets of one alternating step plus scalar
/// diagnostics, all rooted in one shared graph. loss_e treats the
/// generated batch as data (G is behind a stop-gradient on that branch),
/// loss_g differentiates through the live generator; the trainer applies
/// each root's gradients to its own parameter set only.
struct LossBundle {
  Graph graph;
  Var loss_e;  // encoder (+T) objective
  Var loss_g;  // generator objective
  // scalar diagnostics
  Var score_real;
  Var score_fake;
  Var rho_batch;
  Var r_batch;
  Var std_code_real;
  // parameter leaves, aligned with MlpParams::tensors() order
  std::vector<Var> e_params;  // encoder tensors, then T tensors when present
  std::vector<Var> g_params;

  void forward_loss_e() { graph.forward(loss_e); }
  void forward_loss_g() { graph.forward(loss_g); }
  float scalar(Var v) {
    graph.forward_more(v);
    return graph.value(v).at(0);
  }
};

/// Mean over batch rows of pearson(z_i, code_i).
Var rho_term(Graph& g, Var z, Var codes, float eps = ortho::kDefaultEps);

/// Mean over rows of (score_real_i - score_fake_i)^2 / (||x_i - gx_i||^2 + eps_r).
/// Scores are [B x 1] rows paired by batch index.
Var regularizer_r(Graph& g, Var score_real_rows, Var score_fake_rows, Var x, Var gx, float eps_r);

/// Vanilla GAN (softplus objective) with D = T(E(.)).
LossBundle vanilla_losses(const MlpParams& enc, const MlpParams& t_head, const MlpParams& gen,
                          const Tensor& x, const Tensor& z, const ObjectiveVariant& variant);

/// Discriminator-only vanilla bundle with a frozen fake batch; used by the
/// optimal-discriminator oracle where the generator is a fixed sampler.
LossBundle vanilla_d_only(const MlpParams& enc, const MlpParams& t_head, const Tensor& x_real,
                          const Tensor& x_fake);

/// O-GAN with explicit scoring head T (linear objective, R regularizer,
/// correlation term on both sides).
LossBundle ogan_with_t_losses(const MlpParams& enc, const MlpParams& t_head, const MlpParams& gen,
                              const Tensor& x, const Tensor& z, const ObjectiveVariant& variant);

/// The simplest O-GAN: avg(E(.)) is the discriminator.
LossBundle ogan_simplest_losses(const MlpParams& enc, const MlpParams& gen, const Tensor& x,
                                const Tensor& z, const ObjectiveVariant& variant);

/// Ablation: the correlation term replaced by +lambda2 * ||z - E(G(z))||^2 / n_z.
LossBundle ablation_mse_losses(const MlpParams& enc, const MlpParams& gen, const Tensor& x,
                               const Tensor& z, const ObjectiveVariant& variant);

/// Dispatch on variant.kind; t_head may be null for the simplest/mse kinds.
LossBundle build_losses(VariantKind kind, const MlpParams& enc, const MlpParams* t_head,
                        const MlpParams& gen, const Tensor& x, const Tensor& z,
                        const ObjectiveVariant& variant);

}  // namespace ogan

#endif  // OGAN_OBJECTIVES_HPP

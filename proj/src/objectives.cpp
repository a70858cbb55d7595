#include "ogan/objectives.hpp"

#include <stdexcept>

namespace ogan {

const char* variant_name(VariantKind k) {
  switch (k) {
    case VariantKind::kVanilla: return "vanilla";
    case VariantKind::kOganWithT: return "ogan-T";
    case VariantKind::kOganSimplest: return "ogan";
    case VariantKind::kAblationMse: return "mse";
  }
  return "?";
}

VariantKind variant_from_name(const std::string& name) {
  if (name == "vanilla") return VariantKind::kVanilla;
  if (name == "ogan-T") return VariantKind::kOganWithT;
  if (name == "ogan") return VariantKind::kOganSimplest;
  if (name == "mse") return VariantKind::kAblationMse;
  throw std::invalid_argument("unknown objective variant '" + name + "'");
}

ObjectiveVariant ObjectiveVariant::defaults(VariantKind kind, int n_x) {
  ObjectiveVariant v;
  v.kind = kind;
  v.lambda1 = 0.25f / static_cast<float>(n_x);
  v.lambda2 = 0.5f;
  return v;
}

namespace {

Var neg(Graph& g, Var x) { return g.sub(g.constant(0.0f), x); }

Var row_sum(Graph& g, Var m) {
  const int n = g.shape_of(m)[1];
  Var ones = g.leaf(Tensor::full({n, 1}, 1.0f));
  return g.matmul(m, ones);
}

void check_batches(const Tensor& x, const Tensor& z) {
  if (x.ndim() != 2 || z.ndim() != 2) {
    throw ShapeError("losses: batches must be rank-2, got " + shape_str(x.shape()) + " and " +
                     shape_str(z.shape()));
  }
  if (x.dim(0) != z.dim(0)) {
    throw ShapeError("losses: batch sizes differ, " + shape_str(x.shape()) + " vs " +
                     shape_str(z.shape()));
  }
}

// Shared scaffolding of every variant: data leaves, generated batch with a
// stopped copy for the E-side, encoder codes for all three uses.
struct Parts {
  Var x, z;
  Var gx, gx_fixed;
  Var ex, exg_fixed, exg_live;
  MlpVars evars, gvars;
};

Parts build_parts(Graph& g, const MlpParams& enc, const MlpParams& gen, const Tensor& x,
                  const Tensor& z) {
  check_batches(x, z);
  Parts p;
  p.x = g.leaf(x, "x");
  p.z = g.leaf(z, "z");
  p.gvars = mlp_leaves(g, gen, "G.");
  p.gx = mlp_apply_g(g, p.gvars, p.z);
  p.gx_fixed = g.stop_gradient(p.gx);
  p.evars = mlp_leaves(g, enc, "E.");
  p.ex = mlp_apply_g(g, p.evars, p.x);
  p.exg_fixed = mlp_apply_g(g, p.evars, p.gx_fixed);
  p.exg_live = mlp_apply_g(g, p.evars, p.gx);
  return p;
}

}  // namespace

Var rho_term(Graph& g, Var z, Var codes, float eps) {
  return g.mean(ortho::row_pearson(g, z, codes, eps));
}

Var regularizer_r(Graph& g, Var score_real_rows, Var score_fake_rows, Var x, Var gx, float eps_r) {
  Var num = g.square(g.sub(score_real_rows, score_fake_rows));        // [B x 1]
  Var dist = row_sum(g, g.square(g.sub(x, gx)));                      // [B x 1]
  Var denom = g.add(dist, g.constant(eps_r));
  return g.mean(g.div(num, denom));
}

LossBundle ogan_simplest_losses(const MlpParams& enc, const MlpParams& gen, const Tensor& x,
                                const Tensor& z, const ObjectiveVariant& variant) {
  LossBundle b;
  Graph& g = b.graph;
  Parts p = build_parts(g, enc, gen, x, z);

  Var l1 = g.constant(variant.lambda1);
  Var l2 = g.constant(variant.lambda2);

  Var sr_rows = ortho::row_avg(g, p.ex);
  Var sf_rows = ortho::row_avg(g, p.exg_fixed);
  Var adv_e = g.sub(g.mean(sr_rows), g.mean(sf_rows));
  Var r = regularizer_r(g, sr_rows, sf_rows, p.x, p.gx_fixed, variant.eps_r);
  Var rho_fixed = rho_term(g, p.z, p.exg_fixed, variant.rho_eps);
  b.loss_e = g.sub(g.add(adv_e, g.mul(l1, r)), g.mul(l2, rho_fixed));

  Var sf_live = g.mean(ortho::row_avg(g, p.exg_live));
  Var rho_live = rho_term(g, p.z, p.exg_live, variant.rho_eps);
  b.loss_g = g.sub(sf_live, g.mul(l2, rho_live));

  b.score_real = g.mean(sr_rows);
  b.score_fake = g.mean(sf_rows);
  b.rho_batch = rho_fixed;
  b.r_batch = r;
  b.std_code_real = g.mean(ortho::row_std(g, p.ex));
  b.e_params = p.evars.flat();
  b.g_params = p.gvars.flat();
  return b;
}

LossBundle ablation_mse_losses(const MlpParams& enc, const MlpParams& gen, const Tensor& x,
                               const Tensor& z, const ObjectiveVariant& variant) {
  LossBundle b;
  Graph& g = b.graph;
  Parts p = build_parts(g, enc, gen, x, z);

  Var l1 = g.constant(variant.lambda1);
  Var l2 = g.constant(variant.lambda2);

  Var sr_rows = ortho::row_avg(g, p.ex);
  Var sf_rows = ortho::row_avg(g, p.exg_fixed);
  Var adv_e = g.sub(g.mean(sr_rows), g.mean(sf_rows));
  Var r = regularizer_r(g, sr_rows, sf_rows, p.x, p.gx_fixed, variant.eps_r);
  // ||z - code||^2 / n_z averaged over rows is the global mean of the
  // squared difference.
  Var mse_fixed = g.mean(g.square(g.sub(p.z, p.exg_fixed)));
  b.loss_e = g.add(g.add(adv_e, g.mul(l1, r)), g.mul(l2, mse_fixed));

  Var sf_live = g.mean(ortho::row_avg(g, p.exg_live));
  Var mse_live = g.mean(g.square(g.sub(p.z, p.exg_live)));
  b.loss_g = g.add(sf_live, g.mul(l2, mse_live));

  b.score_real = g.mean(sr_rows);
  b.score_fake = g.mean(sf_rows);
  b.rho_batch = rho_term(g, p.z, p.exg_fixed, variant.rho_eps);
  b.r_batch = r;
  b.std_code_real = g.mean(ortho::row_std(g, p.ex));
  b.e_params = p.evars.flat();
  b.g_params = p.gvars.flat();
  return b;
}

LossBundle ogan_with_t_losses(const MlpParams& enc, const MlpParams& t_head, const MlpParams& gen,
                              const Tensor& x, const Tensor& z, const ObjectiveVariant& variant) {
  if (t_head.layers.empty() || t_head.output_dim() != 1) {
    throw std::invalid_argument("ogan_with_t_losses: T must map codes to one score");
  }
  LossBundle b;
  Graph& g = b.graph;
  Parts p = build_parts(g, enc, gen, x, z);
  MlpVars tvars = mlp_leaves(g, t_head, "T.");

  Var l1 = g.constant(variant.lambda1);
  Var l2 = g.constant(variant.lambda2);

  Var sr_rows = mlp_apply_g(g, tvars, p.ex);          // [B x 1]
  Var sf_rows = mlp_apply_g(g, tvars, p.exg_fixed);
  Var adv_e = g.sub(g.mean(sr_rows), g.mean(sf_rows));
  Var r = regularizer_r(g, sr_rows, sf_rows, p.x, p.gx_fixed, variant.eps_r);
  Var rho_fixed = rho_term(g, p.z, p.exg_fixed, variant.rho_eps);
  b.loss_e = g.sub(g.add(adv_e, g.mul(l1, r)), g.mul(l2, rho_fixed));

  Var sf_live = g.mean(mlp_apply_g(g, tvars, p.exg_live));
  Var rho_live = rho_term(g, p.z, p.exg_live, variant.rho_eps);
  b.loss_g = g.sub(sf_live, g.mul(l2, rho_live));

  b.score_real = g.mean(sr_rows);
  b.score_fake = g.mean(sf_rows);
  b.rho_batch = rho_fixed;
  b.r_batch = r;
  b.std_code_real = g.mean(ortho::row_std(g, p.ex));
  b.e_params = p.evars.flat();
  for (Var v : tvars.flat()) b.e_params.push_back(v);
  b.g_params = p.gvars.flat();
  return b;
}

LossBundle vanilla_losses(const MlpParams& enc, const MlpParams& t_head, const MlpParams& gen,
                          const Tensor& x, const Tensor& z, const ObjectiveVariant& variant) {
  if (t_head.layers.empty() || t_head.output_dim() != 1) {
    throw std::invalid_argument("vanilla_losses: T must map codes to one score");
  }
  LossBundle b;
  Graph& g = b.graph;
  Parts p = build_parts(g, enc, gen, x, z);
  MlpVars tvars = mlp_leaves(g, t_head, "T.");

  Var sr_rows = mlp_apply_g(g, tvars, p.ex);
  Var sf_rows = mlp_apply_g(g, tvars, p.exg_fixed);
  b.loss_e = g.mean(g.add(g.softplus(neg(g, sr_rows)), g.softplus(sf_rows)));

  Var sf_live = mlp_apply_g(g, tvars, p.exg_live);
  b.loss_g = g.mean(g.softplus(neg(g, sf_live)));

  b.score_real = g.mean(sr_rows);
  b.score_fake = g.mean(sf_rows);
  b.rho_batch = rho_term(g, p.z, p.exg_fixed, variant.rho_eps);
  b.r_batch = g.constant(0.0f);
  b.std_code_real = g.mean(ortho::row_std(g, p.ex));
  b.e_params = p.evars.flat();
  for (Var v : tvars.flat()) b.e_params.push_back(v);
  b.g_params = p.gvars.flat();
  return b;
}

LossBundle vanilla_d_only(const MlpParams& enc, const MlpParams& t_head, const Tensor& x_real,
                          const Tensor& x_fake) {
  check_batches(x_real, x_fake);
  LossBundle b;
  Graph& g = b.graph;
  Var xr = g.leaf(x_real, "x_real");
  Var xf = g.leaf(x_fake, "x_fake");
  MlpVars evars = mlp_leaves(g, enc, "E.");
  MlpVars tvars = mlp_leaves(g, t_head, "T.");
  Var sr_rows = mlp_apply_g(g, tvars, mlp_apply_g(g, evars, xr));
  Var sf_rows = mlp_apply_g(g, tvars, mlp_apply_g(g, evars, xf));
  b.loss_e = g.mean(g.add(g.softplus(neg(g, sr_rows)), g.softplus(sf_rows)));
  b.loss_g = g.constant(0.0f);
  b.score_real = g.mean(sr_rows);
  b.score_fake = g.mean(sf_rows);
  b.rho_batch = g.constant(0.0f);
  b.r_batch = g.constant(0.0f);
  b.std_code_real = g.constant(0.0f);
  b.e_params = evars.flat();
  for (Var v : tvars.flat()) b.e_params.push_back(v);
  return b;
}

LossBundle build_losses(VariantKind kind, const MlpParams& enc, const MlpParams* t_head,
                        const MlpParams& gen, const Tensor& x, const Tensor& z,
                        const ObjectiveVariant& variant) {
  switch (kind) {
    case VariantKind::kOganSimplest:
      return ogan_simplest_losses(enc, gen, x, z, variant);
    case VariantKind::kAblationMse:
      return ablation_mse_losses(enc, gen, x, z, variant);
    case VariantKind::kOganWithT:
      if (t_head == nullptr) throw std::invalid_argument("ogan-T requires a T head");
      return ogan_with_t_losses(enc, *t_head, gen, x, z, variant);
    case VariantKind::kVanilla:
      if (t_head == nullptr) throw std::invalid_argument("vanilla requires a T head");
      return vanilla_losses(enc, *t_head, gen, x, z, variant);
  }
  throw std::logic_error("build_losses: bad kind");
}

}  // namespace ogan

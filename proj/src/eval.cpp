#include "ogan/eval.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "ogan/objectives.hpp"
#include "ogan/optimizer.hpp"
#include "ogan/ortho.hpp"

namespace ogan {

namespace {

std::string fmt_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Tensor normalize_rows(const Tensor& codes, float eps) {
  Tensor out(codes.shape());
  for (int r = 0; r < codes.dim(0); ++r) {
    const Tensor nrow = ortho::normalize(codes.row(r), eps);
    for (int c = 0; c < codes.dim(1); ++c) out.at2(r, c) = nrow.at(c);
  }
  return out;
}

}  // namespace

std::string EvalReport::to_kv() const {
  std::string s;
  s += "recon_rho=" + fmt_float(recon_rho) + "\n";
  s += "latent_avg=" + fmt_float(latent_avg) + "\n";
  s += "latent_std=" + fmt_float(latent_std) + "\n";
  s += "modes_covered=" + std::to_string(modes_covered) + "\n";
  std::string fracs;
  for (size_t i = 0; i < coverage_fractions.size(); ++i) {
    if (i) fracs += ",";
    fracs += fmt_float(coverage_fractions[i]);
  }
  s += "coverage_fractions=" + fracs + "\n";
  if (has_density_ratio) {
    s += "density_ratio_corr=" + fmt_float(density_ratio_corr) + "\n";
    s += "density_degenerate=" + std::string(density_degenerate ? "1" : "0") + "\n";
  }
  return s;
}

std::string EvalReport::to_annotation() const {
  std::string s = "#eval recon_rho=" + fmt_float(recon_rho) +
                  " latent_avg=" + fmt_float(latent_avg) +
                  " latent_std=" + fmt_float(latent_std) +
                  " modes_covered=" + std::to_string(modes_covered);
  return s;
}

Tensor reconstruction(const MlpParams& enc, const MlpParams& gen, const Tensor& x, float eps) {
  if (x.ndim() != 2) {
    throw ShapeError("reconstruction: batch rank-2 required, got " + shape_str(x.shape()));
  }
  const Tensor codes = mlp_apply(enc, x);
  return mlp_apply(gen, normalize_rows(codes, eps));
}

float recon_rho(const MlpParams& enc, const MlpParams& gen, Rng& rng, int m, float eps) {
  if (m < 100) throw std::invalid_argument("recon_rho: m >= 100 required");
  const Tensor z = sample_prior(rng, m, gen.input_dim());
  const Tensor codes = mlp_apply(enc, mlp_apply(gen, z));
  double acc = 0.0;
  for (int r = 0; r < m; ++r) acc += ortho::pearson(z.row(r), codes.row(r), eps);
  return static_cast<float>(acc / m);
}

std::pair<float, float> latent_stats(const MlpParams& enc, const Tensor& xs) {
  if (xs.ndim() != 2 || xs.dim(0) < 1) {
    throw std::invalid_argument("latent_stats: non-empty rank-2 dataset required");
  }
  const Tensor codes = mlp_apply(enc, xs);
  double avg_acc = 0.0, std_acc = 0.0;
  for (int r = 0; r < codes.dim(0); ++r) {
    const Tensor row = codes.row(r);
    avg_acc += ortho::avg(row);
    std_acc += ortho::stddev(row);
  }
  const double n = codes.dim(0);
  return {static_cast<float>(avg_acc / n), static_cast<float>(std_acc / n)};
}

Coverage coverage_from_points(const Tensor& points,
                              const std::vector<std::array<float, 2>>& centers, float sigma,
                              float share_threshold) {
  if (points.ndim() != 2 || points.dim(1) != 2) {
    throw ShapeError("coverage: 2-D points required, got " + shape_str(points.shape()));
  }
  const int m = points.dim(0);
  std::vector<std::int64_t> counts(centers.size(), 0);
  const float radius = 3.0f * sigma;
  for (int i = 0; i < m; ++i) {
    const float px = points.at2(i, 0), py = points.at2(i, 1);
    int best = 0;
    float best_d2 = std::numeric_limits<float>::max();
    for (size_t k = 0; k < centers.size(); ++k) {
      const float dx = px - centers[k][0], dy = py - centers[k][1];
      const float d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = static_cast<int>(k);
      }
    }
    if (best_d2 <= radius * radius) ++counts[static_cast<size_t>(best)];
  }
  Coverage cov;
  cov.fractions.resize(centers.size());
  for (size_t k = 0; k < centers.size(); ++k) {
    cov.fractions[k] = static_cast<float>(counts[k]) / static_cast<float>(m);
    if (cov.fractions[k] >= share_threshold) ++cov.covered;
  }
  return cov;
}

Coverage mode_coverage(const MlpParams& gen, const DatasetSpec& spec, Rng& rng, int m,
                       float share_threshold) {
  if (spec.kind != DatasetKind::kGaussianMixture) {
    throw std::invalid_argument("mode_coverage: labeled mixture spec required");
  }
  if (m < 1000) throw std::invalid_argument("mode_coverage: m >= 1000 required");
  const Tensor z = sample_prior(rng, m, gen.input_dim());
  const Tensor gx = mlp_apply(gen, z);
  return coverage_from_points(gx, mixture_centers(spec.modes, spec.radius), spec.sigma,
                              share_threshold);
}

DensityRatioResult density_ratio_check(const std::function<float(float)>& d, float p_mu,
                                       float p_sigma, float q_mu, float q_sigma, int grid_n,
                                       float lo, float hi) {
  if (grid_n < 3) throw std::invalid_argument("density_ratio_check: grid_n >= 3 required");
  Tensor dv({grid_n});
  Tensor ratio({grid_n});
  for (int i = 0; i < grid_n; ++i) {
    const float x = lo + (hi - lo) * static_cast<float>(i) / static_cast<float>(grid_n - 1);
    dv.at(i) = d(x);
    const float zp = (x - p_mu) / p_sigma;
    const float zq = (x - q_mu) / q_sigma;
    ratio.at(i) = -0.5f * zp * zp - std::log(p_sigma) + 0.5f * zq * zq + std::log(q_sigma);
  }
  DensityRatioResult result;
  result.degenerate = ortho::stddev(dv) == 0.0f;
  result.corr = ortho::pearson(dv, ratio, ortho::kDefaultEps);
  return result;
}

Tensor interpolate(const MlpParams& enc, const MlpParams& gen, const Tensor& x_a,
                   const Tensor& x_b, int steps, float eps) {
  if (steps < 2) throw std::invalid_argument("interpolate: steps >= 2 required");
  if (x_a.shape() != x_b.shape() || x_a.ndim() != 1) {
    throw ShapeError("interpolate: equal rank-1 endpoints required");
  }
  const int n_x = x_a.dim(0);
  const Tensor ca = ortho::normalize(mlp_apply(enc, x_a.reshaped({1, n_x})).row(0), eps);
  const Tensor cb = ortho::normalize(mlp_apply(enc, x_b.reshaped({1, n_x})).row(0), eps);
  const int n_z = ca.dim(0);
  Tensor codes({steps, n_z});
  for (int s = 0; s < steps; ++s) {
    const float t = static_cast<float>(s) / static_cast<float>(steps - 1);
    for (int c = 0; c < n_z; ++c) {
      // keep the endpoints bit-exact reconstructions
      const float v = (s == 0) ? ca.at(c)
                   : (s == steps - 1) ? cb.at(c)
                                      : (1.0f - t) * ca.at(c) + t * cb.at(c);
      codes.at2(s, c) = v;
    }
  }
  return mlp_apply(gen, codes);
}

float Discriminator1D::score(float x) const {
  const Tensor in({1, 1}, {x});
  return mlp_apply(t_head, mlp_apply(enc, in)).at(0);
}

Discriminator1D train_vanilla_discriminator_1d(const OracleTrainOptions& opts) {
  Rng root(opts.seed);
  Rng e_init = root.stream(1);
  Rng t_init = root.stream(2);
  Rng data_rng = root.stream(3);

  Discriminator1D d;
  d.enc = build_mlp(encoder_spec(1, opts.hidden, opts.n_z), e_init);
  d.t_head = make_t_head(opts.n_z, t_init);

  std::vector<Tensor*> params = d.enc.tensors();
  for (Tensor* t : d.t_head.tensors()) params.push_back(t);
  std::vector<std::string> names = d.enc.tensor_names("E.");
  for (const std::string& n : d.t_head.tensor_names("T.")) names.push_back(n);
  OptState opt = make_opt_state(params);

  for (std::int64_t step = 0; step < opts.steps; ++step) {
    Tensor xr({opts.batch_size, 1});
    Tensor xf({opts.batch_size, 1});
    for (int i = 0; i < opts.batch_size; ++i) {
      xr.at(i) = opts.p_mu + opts.p_sigma * data_rng.next_gaussian();
      xf.at(i) = opts.q_mu + opts.q_sigma * data_rng.next_gaussian();
    }
    LossBundle b = vanilla_d_only(d.enc, d.t_head, xr, xf);
    b.forward_loss_e();
    b.graph.backward(b.loss_e);
    std::vector<Tensor> grads;
    grads.reserve(b.e_params.size());
    for (Var v : b.e_params) grads.push_back(b.graph.grad(v));
    rmsprop_step(params, grads, names, opt, opts.learning_rate, opts.rms_decay, opts.opt_eps);
  }
  return d;
}

EvalReport run_eval(const TrainState& state, const EvalOptions& opts) {
  EvalReport report;
  Rng rng(opts.seed);
  Rng recon_rng = rng.stream(1);
  Rng data_rng = rng.stream(2);
  Rng cover_rng = rng.stream(3);

  report.recon_rho =
      recon_rho(state.enc, state.gen, recon_rng, opts.recon_samples, state.cfg.rho_eps);

  Rng sample_rng = data_rng;
  const Batch data = sample_dataset(state.cfg.dataset, sample_rng, opts.latent_samples,
                                    state.image_rows.empty() ? nullptr : &state.image_rows);
  const auto [lavg, lstd] = latent_stats(state.enc, data.x);
  report.latent_avg = lavg;
  report.latent_std = lstd;

  if (state.cfg.dataset.kind == DatasetKind::kGaussianMixture) {
    const Coverage cov = mode_coverage(state.gen, state.cfg.dataset, cover_rng,
                                       opts.coverage_samples, opts.coverage_threshold);
    report.modes_covered = cov.covered;
    report.coverage_fractions = cov.fractions;
  }
  return report;
}

}  // namespace ogan

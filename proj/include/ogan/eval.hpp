#ifndef OGAN_EVAL_HPP
#define OGAN_EVAL_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ogan/data.hpp"
#include "ogan/nets.hpp"
#include "ogan/rng.hpp"
#include "ogan/trainer.hpp"

namespace ogan {

/// Quantitative summary of a trained model.
struct EvalReport {
  float recon_rho = 0.0f;            // mean pearson(z, E(G(z))) over fresh z
  float latent_avg = 0.0f;           // mean over rows of avg(E(x))
  float latent_std = 0.0f;           // mean over rows of std(E(x))
  int modes_covered = 0;             // of dataset modes (mixtures only)
  std::vector<float> coverage_fractions;
  bool has_density_ratio = false;
  float density_ratio_corr = 0.0f;
  bool density_degenerate = false;

  /// Flat key=value lines.
  std::string to_kv() const;
  /// Single-line form for the metrics-CSV annotation row.
  std::string to_annotation() const;
};

/// x_hat = G(N(E(x))) row-wise; codes are normalized before decoding.
Tensor reconstruction(const MlpParams& enc, const MlpParams& gen, const Tensor& x,
                      float eps = 1e-8f);

/// Mean pearson(z_i, E(G(z_i))) over m fresh prior rows (m >= 100).
float recon_rho(const MlpParams& enc, const MlpParams& gen, Rng& rng, int m, float eps = 1e-8f);

/// (mean of row averages, mean of row stds) of E over a dataset.
std::pair<float, float> latent_stats(const MlpParams& enc, const Tensor& xs);

struct Coverage {
  int covered = 0;
  std::vector<float> fractions;  // per-mode share of within-3-sigma samples
};

/// Assign points to their nearest center; a sample counts only within
/// 3 sigma of it, and a mode is covered when its counted share reaches the
/// threshold.
Coverage coverage_from_points(const Tensor& points,
                              const std::vector<std::array<float, 2>>& centers, float sigma,
                              float share_threshold = 0.01f);

/// Coverage of G over a labeled mixture spec, m prior samples.
Coverage mode_coverage(const MlpParams& gen, const DatasetSpec& spec, Rng& rng, int m,
                       float share_threshold = 0.01f);

struct DensityRatioResult {
  float corr = 0.0f;
  bool degenerate = false;
};

/// Pearson correlation between a discriminator curve and the closed-form
/// log-density ratio of two 1-D gaussians over a uniform grid. A constant
/// discriminator reports 0 with the degenerate flag set.
DensityRatioResult density_ratio_check(const std::function<float(float)>& d, float p_mu,
                                       float p_sigma, float q_mu, float q_sigma, int grid_n = 121,
                                       float lo = -3.0f, float hi = 3.0f);

/// Linear interpolation in normalized code space; endpoints equal the
/// reconstructions of x_a and x_b bit-exactly. Returns [steps x n_x].
Tensor interpolate(const MlpParams& enc, const MlpParams& gen, const Tensor& x_a,
                   const Tensor& x_b, int steps, float eps = 1e-8f);

/// Discriminator-only vanilla training against a frozen sampler, used by
/// the optimal-discriminator oracle (D = T(E(x)) on 1-D data).
struct Discriminator1D {
  MlpParams enc;
  MlpParams t_head;

  float score(float x) const;
};

struct OracleTrainOptions {
  std::int64_t steps = 5000;
  int batch_size = 256;
  float learning_rate = 1e-4f;
  float rms_decay = 0.99f;
  float opt_eps = 1e-8f;
  std::uint64_t seed = 7;
  int n_z = 8;
  std::vector<int> hidden{32, 32};
  float p_mu = 0.0f, p_sigma = 1.0f;
  float q_mu = 0.5f, q_sigma = 1.0f;
};

Discriminator1D train_vanilla_discriminator_1d(const OracleTrainOptions& opts);

struct EvalOptions {
  int recon_samples = 1024;
  int latent_samples = 2048;
  int coverage_samples = 10000;
  float coverage_threshold = 0.01f;
  std::uint64_t seed = 1234;
};

/// Full report for a (restored) training state.
EvalReport run_eval(const TrainState& state, const EvalOptions& opts = {});

}  // namespace ogan

#endif  // OGAN_EVAL_HPP

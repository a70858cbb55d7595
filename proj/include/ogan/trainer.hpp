#ifndef OGAN_TRAINER_HPP
#define OGAN_TRAINER_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ogan/checkpoint.hpp"
#include "ogan/data.hpp"
#include "ogan/nets.hpp"
#include "ogan/objectives.hpp"
#include "ogan/optimizer.hpp"
#include "ogan/rng.hpp"

namespace ogan {

/// Thrown when training hits a non-finite loss; the message references the
/// last good checkpoint when one exists.
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Full training recipe. Mirrored 1:1 by the flat JSON config document;
/// unknown keys there are rejected.
struct TrainConfig {
  VariantKind variant = VariantKind::kOganSimplest;
  float lambda1 = -1.0f;  // < 0 resolves to 0.25 / n_x
  float lambda2 = 0.5f;
  float eps_r = 1e-8f;
  float rho_eps = 1e-8f;
  int n_z = 8;
  std::vector<int> gen_hidden{64, 64};
  std::vector<int> enc_hidden{64, 64};
  int batch_size = 128;
  std::int64_t iterations = 10000;
  float learning_rate = 1e-4f;
  float rms_decay = 0.99f;
  float opt_eps = 1e-8f;
  std::uint64_t seed = 42;
  DatasetSpec dataset;
  std::int64_t log_every = 50;
  std::int64_t checkpoint_every = 0;  // 0: only the final checkpoint
  std::string out_dir;
  bool reuse_z = false;  // reuse the E-step z batch for the G step

  float resolved_lambda1(int n_x) const {
    return lambda1 < 0.0f ? 0.25f / static_cast<float>(n_x) : lambda1;
  }
  bool uses_t_head() const {
    return variant == VariantKind::kVanilla || variant == VariantKind::kOganWithT;
  }

  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
  static TrainConfig from_json_file(const std::filesystem::path& path);
  void validate() const;
};

struct MetricsRow {
  std::int64_t iter = 0;
  float loss_e = 0.0f;
  float loss_g = 0.0f;
  float rho = 0.0f;
  float score_real = 0.0f;
  float score_fake = 0.0f;
  float std_code_real = 0.0f;
};

std::string metrics_header();
std::string metrics_line(const MetricsRow& row);
/// Parse a metrics CSV; '#'-prefixed annotation lines are skipped.
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

/// Live training state: nets, optimizer accumulators and the training rng
/// stream (one stream carries both the data and prior draws so its two
/// words are the whole resumable rng state).
struct TrainState {
  TrainConfig cfg;
  int n_x = 0;
  MlpParams gen, enc, t_head;
  OptState opt_e, opt_g;
  Rng train_rng{0};
  Tensor image_rows;  // populated for file-backed datasets
  std::int64_t iter = 0;

  ObjectiveVariant objective() const;
};

TrainState init_train_state(const TrainConfig& cfg);

/// One E update followed by one G update (fresh z for the G step unless
/// cfg.reuse_z). Returns the step's diagnostics.
MetricsRow train_step(TrainState& state);

Checkpoint make_checkpoint(const TrainState& state);
TrainState restore_train_state(const Checkpoint& ckpt);

struct TrainResult {
  std::filesystem::path checkpoint_path;
  std::filesystem::path metrics_path;
  MetricsRow last;
};

/// Run cfg.iterations steps, streaming metrics rows (one per log_every
/// iterations) and checkpointing per schedule plus a final checkpoint.
TrainResult train_loop(const TrainConfig& cfg);

/// Continue a checkpointed run up to new_iterations (or the snapshot's
/// target when nullopt), appending to the metrics file in out_dir.
TrainResult resume_train_loop(const std::filesystem::path& ckpt_path,
                              std::optional<std::int64_t> new_iterations = std::nullopt,
                              const std::string& out_dir_override = {});

}  // namespace ogan

#endif  // OGAN_TRAINER_HPP

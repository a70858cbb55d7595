#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ogan/data.hpp"
#include "ogan/eval.hpp"
#include "ogan/gradcheck_suite.hpp"
#include "ogan/svg.hpp"
#include "ogan/trainer.hpp"

namespace {

using namespace ogan;

TrainState restore_from(const std::string& ckpt_path) {
  return restore_train_state(load_checkpoint(ckpt_path));
}

// Deterministic dataset rows for index-based verbs: synthetic sets are
// regenerated from the config's seed, file sets are loaded.
Tensor dataset_rows(const TrainState& st, int count) {
  if (st.cfg.dataset.kind == DatasetKind::kImageFile) return st.image_rows;
  Rng rng = Rng(st.cfg.seed).stream(0xDA7Aull);
  Rng sample_rng = rng;
  return sample_dataset(st.cfg.dataset, sample_rng, count).x;
}

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out_dir, std::optional<std::int64_t> iterations,
              const std::string& variant) {
  TrainConfig cfg = TrainConfig::from_json_file(config_path);
  if (seed) cfg.seed = *seed;
  if (iterations) cfg.iterations = *iterations;
  if (!variant.empty()) cfg.variant = variant_from_name(variant);
  cfg.out_dir = out_dir;
  const TrainResult result = train_loop(cfg);
  std::printf("trained %lld iterations; checkpoint %s; metrics %s\n",
              static_cast<long long>(cfg.iterations), result.checkpoint_path.c_str(),
              result.metrics_path.c_str());
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& out_dir) {
  const TrainState st = restore_from(ckpt_path);
  const EvalReport report = run_eval(st);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path report_path = std::filesystem::path(out_dir) / "eval_report.txt";
  {
    std::ofstream out(report_path, std::ios::trunc);
    if (!out) throw IoError("eval: cannot write " + report_path.string());
    out << report.to_kv();
  }
  const std::filesystem::path metrics_path = std::filesystem::path(out_dir) / "metrics.csv";
  if (std::filesystem::exists(metrics_path)) {
    std::ofstream out(metrics_path, std::ios::app);
    out << report.to_annotation() << "\n";
  }
  std::fputs(report.to_kv().c_str(), stdout);
  return 0;
}

int cmd_sample(const std::string& ckpt_path, int n, const std::string& out_file, bool project) {
  const TrainState st = restore_from(ckpt_path);
  Rng rng = Rng(st.cfg.seed).stream(0x5A3Aull);
  const Tensor z = sample_prior(rng, n, st.cfg.n_z);
  Tensor gx = mlp_apply(st.gen, z);
  if (gx.dim(1) != 2) {
    if (!project) {
      throw std::invalid_argument("sample: generator output is " + std::to_string(gx.dim(1)) +
                                  "-dimensional; pass --project to plot the first two coordinates");
    }
    Tensor proj({gx.dim(0), 2});
    for (int i = 0; i < gx.dim(0); ++i) {
      proj.at2(i, 0) = gx.at2(i, 0);
      proj.at2(i, 1) = gx.at2(i, 1);
    }
    gx = proj;
  }
  emit_scatter(gx, {}, out_file);
  std::printf("wrote %d samples to %s\n", n, out_file.c_str());
  return 0;
}

int cmd_reconstruct(const std::string& ckpt_path, const std::string& data_path,
                    const std::string& out_file) {
  const TrainState st = restore_from(ckpt_path);
  const Tensor x = load_image_file(data_path);
  if (x.dim(1) != st.n_x) {
    throw ShapeError("reconstruct: data rows have dimension " + std::to_string(x.dim(1)) +
                     ", model expects " + std::to_string(st.n_x));
  }
  const Tensor xhat = reconstruction(st.enc, st.gen, x, st.cfg.rho_eps);
  if (st.n_x == 2) {
    // overlay: originals label 0, reconstructions label 1
    Tensor both({x.dim(0) * 2, 2});
    std::vector<int> labels(static_cast<size_t>(x.dim(0)) * 2);
    for (int i = 0; i < x.dim(0); ++i) {
      both.at2(i, 0) = x.at2(i, 0);
      both.at2(i, 1) = x.at2(i, 1);
      both.at2(x.dim(0) + i, 0) = xhat.at2(i, 0);
      both.at2(x.dim(0) + i, 1) = xhat.at2(i, 1);
      labels[static_cast<size_t>(x.dim(0) + i)] = 1;
    }
    emit_scatter(both, labels, out_file);
  } else {
    const ImageDims dims = image_file_dims(data_path);
    save_image_file(out_file, xhat, dims.h, dims.w, dims.c);
  }
  std::printf("wrote %d reconstructions to %s\n", x.dim(0), out_file.c_str());
  return 0;
}

int cmd_interpolate(const std::string& ckpt_path, int a, int b, int steps,
                    const std::string& out_file) {
  const TrainState st = restore_from(ckpt_path);
  const int need = std::max(a, b) + 1;
  const Tensor rows = dataset_rows(st, need);
  if (a < 0 || b < 0 || need > rows.dim(0)) {
    throw std::invalid_argument("interpolate: indices out of range (dataset has " +
                                std::to_string(rows.dim(0)) + " rows)");
  }
  const Tensor path =
      interpolate(st.enc, st.gen, rows.row(a), rows.row(b), steps, st.cfg.rho_eps);
  if (st.n_x == 2) {
    std::vector<int> labels(static_cast<size_t>(steps), 1);
    labels.front() = 0;
    labels.back() = 0;
    emit_scatter(path, labels, out_file);
  } else if (st.cfg.dataset.kind == DatasetKind::kImageFile) {
    const ImageDims dims = image_file_dims(st.cfg.dataset.path);
    save_image_file(out_file, path, dims.h, dims.w, dims.c);
  } else {
    throw std::invalid_argument("interpolate: no writer for this dataset dimensionality");
  }
  std::printf("wrote %d interpolation steps to %s\n", steps, out_file.c_str());
  return 0;
}

int cmd_plot(const std::string& metrics_path, const std::string& out_file) {
  emit_curves(read_metrics_csv(metrics_path), out_file);
  std::printf("wrote %s\n", out_file.c_str());
  return 0;
}

int cmd_gradcheck(double tolerance) {
  const GradCheckSuiteResult result = run_gradcheck_suite(tolerance);
  std::printf("gradcheck: %d checks, max relative error %.3g, tolerance %.3g\n", result.checks,
              result.max_rel_err, tolerance);
  for (const std::string& f : result.failures) std::printf("  FAILED %s\n", f.c_str());
  return result.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal GAN training laboratory"};
  app.require_subcommand(1);

  // train
  std::string config_path, out_dir, variant;
  std::uint64_t seed_value = 0;
  std::int64_t iters_value = 0;
  auto* train = app.add_subcommand("train", "train a model from a JSON config");
  train->add_option("--config", config_path, "config JSON path")->required();
  auto* seed_opt = train->add_option("--seed", seed_value, "seed override");
  train->add_option("--out", out_dir, "output directory")->required();
  auto* iters_opt = train->add_option("--iterations", iters_value, "iteration override");
  train->add_option("--variant", variant, "objective variant override")
      ->check(CLI::IsMember({"vanilla", "ogan", "ogan-T", "mse"}));

  // eval
  std::string ckpt_path, eval_out;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--ckpt", ckpt_path, "checkpoint path")->required();
  eval->add_option("--out", eval_out, "output directory")->required();

  // sample
  std::string sample_ckpt, sample_out;
  int sample_n = 1000;
  bool project = false;
  auto* sample = app.add_subcommand("sample", "scatter-plot generator samples");
  sample->add_option("--ckpt", sample_ckpt)->required();
  sample->add_option("-n", sample_n, "number of samples");
  sample->add_option("--out", sample_out, "output SVG path")->required();
  sample->add_flag("--project", project, "project to the first two coordinates");

  // reconstruct
  std::string rec_ckpt, rec_data, rec_out;
  auto* rec = app.add_subcommand("reconstruct", "reconstruct dataset rows through G(N(E(x)))");
  rec->add_option("--ckpt", rec_ckpt)->required();
  rec->add_option("--data", rec_data, "OIMG data file")->required();
  rec->add_option("--out", rec_out)->required();

  // interpolate
  std::string int_ckpt, int_out;
  int idx_a = 0, idx_b = 1, steps = 8;
  auto* interp = app.add_subcommand("interpolate", "interpolate between two encoded rows");
  interp->add_option("--ckpt", int_ckpt)->required();
  interp->add_option("--a", idx_a, "first row index")->required();
  interp->add_option("--b", idx_b, "second row index")->required();
  interp->add_option("--steps", steps, "number of steps");
  interp->add_option("--out", int_out)->required();

  // plot
  std::string plot_metrics, plot_out;
  auto* plot = app.add_subcommand("plot", "render metrics.csv as SVG curves");
  plot->add_option("--metrics", plot_metrics)->required();
  plot->add_option("--out", plot_out)->required();

  // gradcheck
  double tolerance = 1e-4;
  auto* gc = app.add_subcommand("gradcheck", "run the gradient-check suite");
  gc->add_option("--tolerance", tolerance, "maximum relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (train->parsed()) {
      return cmd_train(config_path,
                       seed_opt->count() ? std::optional<std::uint64_t>(seed_value) : std::nullopt,
                       out_dir,
                       iters_opt->count() ? std::optional<std::int64_t>(iters_value) : std::nullopt,
                       variant);
    }
    if (eval->parsed()) return cmd_eval(ckpt_path, eval_out);
    if (sample->parsed()) return cmd_sample(sample_ckpt, sample_n, sample_out, project);
    if (rec->parsed()) return cmd_reconstruct(rec_ckpt, rec_data, rec_out);
    if (interp->parsed()) return cmd_interpolate(int_ckpt, idx_a, idx_b, steps, int_out);
    if (plot->parsed()) return cmd_plot(plot_metrics, plot_out);
    if (gc->parsed()) return cmd_gradcheck(tolerance);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

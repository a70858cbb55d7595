#include "ogan/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ogan {

using nlohmann::json;

namespace {

std::string fmt_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string TrainConfig::to_json() const {
  json j;
  j["variant"] = variant_name(variant);
  j["lambda1"] = lambda1;
  j["lambda2"] = lambda2;
  j["eps_r"] = eps_r;
  j["rho_eps"] = rho_eps;
  j["n_z"] = n_z;
  j["gen_hidden"] = gen_hidden;
  j["enc_hidden"] = enc_hidden;
  j["batch_size"] = batch_size;
  j["iterations"] = iterations;
  j["learning_rate"] = learning_rate;
  j["rms_decay"] = rms_decay;
  j["opt_eps"] = opt_eps;
  j["seed"] = seed;
  j["dataset"] = dataset_kind_name(dataset.kind);
  j["modes"] = dataset.modes;
  j["sigma"] = dataset.sigma;
  j["radius"] = dataset.radius;
  j["cells"] = dataset.cells;
  j["data_path"] = dataset.path;
  j["log_every"] = log_every;
  j["checkpoint_every"] = checkpoint_every;
  j["out_dir"] = out_dir;
  j["reuse_z"] = reuse_z;
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  TrainConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "variant") {
        cfg.variant = variant_from_name(value.get<std::string>());
      } else if (key == "lambda1") {
        cfg.lambda1 = value.get<float>();
      } else if (key == "lambda2") {
        cfg.lambda2 = value.get<float>();
      } else if (key == "eps_r") {
        cfg.eps_r = value.get<float>();
      } else if (key == "rho_eps") {
        cfg.rho_eps = value.get<float>();
      } else if (key == "n_z") {
        cfg.n_z = value.get<int>();
      } else if (key == "gen_hidden") {
        cfg.gen_hidden = value.get<std::vector<int>>();
      } else if (key == "enc_hidden") {
        cfg.enc_hidden = value.get<std::vector<int>>();
      } else if (key == "batch_size") {
        cfg.batch_size = value.get<int>();
      } else if (key == "iterations") {
        cfg.iterations = value.get<std::int64_t>();
      } else if (key == "learning_rate") {
        cfg.learning_rate = value.get<float>();
      } else if (key == "rms_decay") {
        cfg.rms_decay = value.get<float>();
      } else if (key == "opt_eps") {
        cfg.opt_eps = value.get<float>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "dataset") {
        cfg.dataset.kind = dataset_kind_from_name(value.get<std::string>());
      } else if (key == "modes") {
        cfg.dataset.modes = value.get<int>();
      } else if (key == "sigma") {
        cfg.dataset.sigma = value.get<float>();
      } else if (key == "radius") {
        cfg.dataset.radius = value.get<float>();
      } else if (key == "cells") {
        cfg.dataset.cells = value.get<int>();
      } else if (key == "data_path") {
        cfg.dataset.path = value.get<std::string>();
      } else if (key == "log_every") {
        cfg.log_every = value.get<std::int64_t>();
      } else if (key == "checkpoint_every") {
        cfg.checkpoint_every = value.get<std::int64_t>();
      } else if (key == "out_dir") {
        cfg.out_dir = value.get<std::string>();
      } else if (key == "reuse_z") {
        cfg.reuse_z = value.get<bool>();
      } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw std::invalid_argument("config: bad value for '" + key + "': " + e.what());
    }
  }
  return cfg;
}

TrainConfig TrainConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void TrainConfig::validate() const {
  if (learning_rate <= 0.0f) throw std::invalid_argument("config: learning_rate must be > 0");
  if (rms_decay <= 0.0f || rms_decay >= 1.0f) {
    throw std::invalid_argument("config: rms_decay must be in (0, 1)");
  }
  if (batch_size < 2) throw std::invalid_argument("config: batch_size must be >= 2");
  if (iterations < 0) throw std::invalid_argument("config: iterations must be >= 0");
  if (n_z < 3) throw std::invalid_argument("config: n_z must be >= 3");
  if (gen_hidden.empty() || enc_hidden.empty()) {
    throw std::invalid_argument("config: hidden layer lists must be non-empty");
  }
  if (log_every < 1) throw std::invalid_argument("config: log_every must be >= 1");
  if (checkpoint_every < 0) throw std::invalid_argument("config: checkpoint_every must be >= 0");
  if (lambda2 < 0.0f) throw std::invalid_argument("config: lambda2 must be >= 0");
}

std::string metrics_header() {
  return "iter,loss_E,loss_G,rho,score_real,score_fake,std_code_real";
}

std::string metrics_line(const MetricsRow& row) {
  std::string s = std::to_string(row.iter);
  for (float v : {row.loss_e, row.loss_g, row.rho, row.score_real, row.score_fake,
                  row.std_code_real}) {
    s += ',';
    s += fmt_float(v);
  }
  return s;
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("metrics: cannot open " + path.string());
  std::vector<MetricsRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      first = false;
      if (line != metrics_header()) {
        throw IoError("metrics: unexpected header in " + path.string());
      }
      continue;
    }
    MetricsRow row;
    float fields[6];
    long long it = 0;
    if (std::sscanf(line.c_str(), "%lld,%f,%f,%f,%f,%f,%f", &it, &fields[0], &fields[1],
                    &fields[2], &fields[3], &fields[4], &fields[5]) != 7) {
      throw IoError("metrics: malformed row in " + path.string() + ": " + line);
    }
    row.iter = it;
    row.loss_e = fields[0];
    row.loss_g = fields[1];
    row.rho = fields[2];
    row.score_real = fields[3];
    row.score_fake = fields[4];
    row.std_code_real = fields[5];
    rows.push_back(row);
  }
  return rows;
}

ObjectiveVariant TrainState::objective() const {
  ObjectiveVariant v;
  v.kind = cfg.variant;
  v.lambda1 = cfg.resolved_lambda1(n_x);
  v.lambda2 = cfg.lambda2;
  v.eps_r = cfg.eps_r;
  v.rho_eps = cfg.rho_eps;
  return v;
}

namespace {

// Fixed stream ids for the seed split.
enum : std::uint64_t { kStreamGenInit = 1, kStreamEncInit = 2, kStreamTInit = 3, kStreamTrain = 4 };

std::vector<Tensor> collect_grads(LossBundle& b, const std::vector<Var>& vars) {
  std::vector<Tensor> grads;
  grads.reserve(vars.size());
  for (Var v : vars) grads.push_back(b.graph.grad(v));
  return grads;
}

std::vector<Tensor*> e_side_tensors(TrainState& st) {
  std::vector<Tensor*> out = st.enc.tensors();
  if (st.cfg.uses_t_head()) {
    for (Tensor* t : st.t_head.tensors()) out.push_back(t);
  }
  return out;
}

std::vector<std::string> e_side_names(const TrainState& st) {
  std::vector<std::string> out = st.enc.tensor_names("E.");
  if (st.cfg.uses_t_head()) {
    for (const std::string& n : st.t_head.tensor_names("T.")) out.push_back(n);
  }
  return out;
}

}  // namespace

TrainState init_train_state(const TrainConfig& cfg) {
  cfg.validate();
  TrainState st;
  st.cfg = cfg;
  if (cfg.dataset.kind == DatasetKind::kImageFile) {
    st.image_rows = load_image_file(cfg.dataset.path);
    st.n_x = st.image_rows.dim(1);
  } else {
    st.n_x = 2;
  }
  Rng root(cfg.seed);
  Rng g_init = root.stream(kStreamGenInit);
  Rng e_init = root.stream(kStreamEncInit);
  st.gen = build_mlp(generator_spec(cfg.n_z, cfg.gen_hidden, st.n_x), g_init);
  st.enc = build_mlp(encoder_spec(st.n_x, cfg.enc_hidden, cfg.n_z), e_init);
  if (cfg.uses_t_head()) {
    Rng t_init = root.stream(kStreamTInit);
    st.t_head = make_t_head(cfg.n_z, t_init);
  }
  st.opt_e = make_opt_state(e_side_tensors(st));
  st.opt_g = make_opt_state(st.gen.tensors());
  st.train_rng = root.stream(kStreamTrain);
  st.iter = 0;
  return st;
}

MetricsRow train_step(TrainState& st) {
  const TrainConfig& cfg = st.cfg;
  const ObjectiveVariant variant = st.objective();
  const MlpParams* t = cfg.uses_t_head() ? &st.t_head : nullptr;

  const Batch data = sample_dataset(cfg.dataset, st.train_rng, cfg.batch_size,
                                    st.image_rows.empty() ? nullptr : &st.image_rows);
  const Tensor z1 = sample_prior(st.train_rng, cfg.batch_size, cfg.n_z);

  MetricsRow row;

  // E step: the generated batch enters as data, only E (and T) move.
  {
    LossBundle b = build_losses(cfg.variant, st.enc, t, st.gen, data.x, z1, variant);
    b.forward_loss_e();
    b.graph.backward(b.loss_e);
    const std::vector<Tensor> grads = collect_grads(b, b.e_params);
    rmsprop_step(e_side_tensors(st), grads, e_side_names(st), st.opt_e, cfg.learning_rate,
                 cfg.rms_decay, cfg.opt_eps);
    row.loss_e = b.graph.value(b.loss_e).at(0);
    row.rho = b.scalar(b.rho_batch);
    row.score_real = b.scalar(b.score_real);
    row.score_fake = b.scalar(b.score_fake);
    row.std_code_real = b.scalar(b.std_code_real);
  }

  // G step on a fresh prior batch (same batch when reuse_z is set), with
  // the just-updated encoder.
  {
    const Tensor z2 = cfg.reuse_z ? z1 : sample_prior(st.train_rng, cfg.batch_size, cfg.n_z);
    LossBundle b = build_losses(cfg.variant, st.enc, t, st.gen, data.x, z2, variant);
    b.forward_loss_g();
    b.graph.backward(b.loss_g);
    const std::vector<Tensor> grads = collect_grads(b, b.g_params);
    rmsprop_step(st.gen.tensors(), grads, st.gen.tensor_names("G."), st.opt_g, cfg.learning_rate,
                 cfg.rms_decay, cfg.opt_eps);
    row.loss_g = b.graph.value(b.loss_g).at(0);
  }

  row.iter = ++st.iter;
  return row;
}

Checkpoint make_checkpoint(const TrainState& st) {
  Checkpoint ckpt;
  ckpt.iteration = static_cast<std::uint64_t>(st.iter);
  auto add_params = [&](const MlpParams& p, const std::string& prefix) {
    const auto tensors = p.tensors();
    const auto names = p.tensor_names(prefix);
    for (size_t i = 0; i < tensors.size(); ++i) ckpt.tensors.emplace_back(names[i], *tensors[i]);
  };
  add_params(st.gen, "G.");
  add_params(st.enc, "E.");
  if (st.cfg.uses_t_head()) add_params(st.t_head, "T.");
  const auto e_names = e_side_names(st);
  for (size_t i = 0; i < st.opt_e.acc.size(); ++i) {
    ckpt.tensors.emplace_back("optE." + e_names[i], st.opt_e.acc[i]);
  }
  const auto g_names = st.gen.tensor_names("G.");
  for (size_t i = 0; i < st.opt_g.acc.size(); ++i) {
    ckpt.tensors.emplace_back("optG." + g_names[i], st.opt_g.acc[i]);
  }
  ckpt.rng_key = st.train_rng.key();
  ckpt.rng_counter = st.train_rng.counter();
  ckpt.config_json = st.cfg.to_json();
  return ckpt;
}

TrainState restore_train_state(const Checkpoint& ckpt) {
  TrainState st = init_train_state(TrainConfig::from_json(ckpt.config_json));
  auto load_into = [&](Tensor* dst, const std::string& name) {
    const Tensor* src = ckpt.find(name);
    if (src == nullptr) throw IoError("checkpoint: missing tensor '" + name + "'");
    if (!dst->same_shape(*src)) {
      throw IoError("checkpoint: tensor '" + name + "' has shape " + shape_str(src->shape()) +
                    ", expected " + shape_str(dst->shape()));
    }
    *dst = *src;
  };
  auto load_params = [&](MlpParams& p, const std::string& prefix) {
    const auto tensors = p.tensors();
    const auto names = p.tensor_names(prefix);
    for (size_t i = 0; i < tensors.size(); ++i) load_into(tensors[i], names[i]);
  };
  load_params(st.gen, "G.");
  load_params(st.enc, "E.");
  if (st.cfg.uses_t_head()) load_params(st.t_head, "T.");
  const auto e_names = e_side_names(st);
  for (size_t i = 0; i < st.opt_e.acc.size(); ++i) {
    load_into(&st.opt_e.acc[i], "optE." + e_names[i]);
  }
  const auto g_names = st.gen.tensor_names("G.");
  for (size_t i = 0; i < st.opt_g.acc.size(); ++i) {
    load_into(&st.opt_g.acc[i], "optG." + g_names[i]);
  }
  st.train_rng = Rng::restore(ckpt.rng_key, ckpt.rng_counter);
  st.iter = static_cast<std::int64_t>(ckpt.iteration);
  return st;
}

namespace {

std::filesystem::path ckpt_name(const std::filesystem::path& dir, std::int64_t iter) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ckpt_%06lld.bin", static_cast<long long>(iter));
  return dir / buf;
}

TrainResult run_loop(TrainState& st, bool fresh_metrics) {
  const TrainConfig& cfg = st.cfg;
  const std::filesystem::path dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
  std::filesystem::create_directories(dir);
  const std::filesystem::path metrics_path = dir / "metrics.csv";

  std::ofstream metrics;
  if (fresh_metrics || !std::filesystem::exists(metrics_path)) {
    metrics.open(metrics_path, std::ios::trunc);
    if (!metrics) throw IoError("train: cannot write " + metrics_path.string());
    metrics << metrics_header() << "\n";
  } else {
    metrics.open(metrics_path, std::ios::app);
    if (!metrics) throw IoError("train: cannot append to " + metrics_path.string());
  }

  const std::filesystem::path final_path = dir / "ckpt_final.bin";
  std::filesystem::path last_ckpt;
  MetricsRow last;
  last.iter = st.iter;

  while (st.iter < cfg.iterations) {
    MetricsRow row;
    try {
      row = train_step(st);
    } catch (const NonFiniteError& e) {
      const std::string ref = last_ckpt.empty() ? "none" : last_ckpt.string();
      throw TrainingError("training aborted at iteration " + std::to_string(st.iter + 1) + ": " +
                          e.what() + " (last good checkpoint: " + ref + ")");
    }
    last = row;
    if (row.iter % cfg.log_every == 0) {
      metrics << metrics_line(row) << "\n";
      metrics.flush();
    }
    if (cfg.checkpoint_every > 0 && row.iter % cfg.checkpoint_every == 0) {
      last_ckpt = ckpt_name(dir, row.iter);
      save_checkpoint(make_checkpoint(st), last_ckpt);
    }
  }

  save_checkpoint(make_checkpoint(st), final_path);
  TrainResult result;
  result.checkpoint_path = final_path;
  result.metrics_path = metrics_path;
  result.last = last;
  return result;
}

}  // namespace

TrainResult train_loop(const TrainConfig& cfg) {
  TrainState st = init_train_state(cfg);
  return run_loop(st, /*fresh_metrics=*/true);
}

TrainResult resume_train_loop(const std::filesystem::path& ckpt_path,
                              std::optional<std::int64_t> new_iterations,
                              const std::string& out_dir_override) {
  TrainState st = restore_train_state(load_checkpoint(ckpt_path));
  if (new_iterations) st.cfg.iterations = *new_iterations;
  if (!out_dir_override.empty()) st.cfg.out_dir = out_dir_override;
  if (st.cfg.iterations < st.iter) {
    throw std::invalid_argument("resume: target iterations " + std::to_string(st.cfg.iterations) +
                                " below checkpoint iteration " + std::to_string(st.iter));
  }
  return run_loop(st, /*fresh_metrics=*/false);
}

}  // namespace ogan

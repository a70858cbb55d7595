#include "ogan/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace ogan {

namespace {

constexpr char kMagic[4] = {'O', 'G', 'A', 'N'};

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void get(std::ifstream& in, T& v, const char* what) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError(std::string("checkpoint: truncated reading ") + what);
}

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& [key, value] : tensors) {
    if (key == name) return &value;
  }
  return nullptr;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("checkpoint: cannot write " + tmp.string());
    out.write(kMagic, 4);
    put(out, kCheckpointVersion);
    put(out, ckpt.iteration);
    put(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, tensor] : ckpt.tensors) {
      put(out, static_cast<std::uint16_t>(name.size()));
      out.write(name.data(), static_cast<std::streamsize>(name.size()));
      put(out, static_cast<std::uint8_t>(tensor.ndim()));
      for (int d = 0; d < tensor.ndim(); ++d) put(out, static_cast<std::uint32_t>(tensor.dim(d)));
      out.write(reinterpret_cast<const char*>(tensor.data()),
                static_cast<std::streamsize>(tensor.size() * sizeof(float)));
    }
    put(out, ckpt.rng_key);
    put(out, ckpt.rng_counter);
    put(out, static_cast<std::uint32_t>(ckpt.config_json.size()));
    out.write(ckpt.config_json.data(), static_cast<std::streamsize>(ckpt.config_json.size()));
    if (!out) throw IoError("checkpoint: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("checkpoint: bad magic in " + path.string());
  }
  std::uint32_t version;
  get(in, version, "version");
  if (version != kCheckpointVersion) {
    throw IoError("checkpoint: unsupported version " + std::to_string(version) + " in " +
                  path.string());
  }
  Checkpoint ckpt;
  get(in, ckpt.iteration, "iteration");
  std::uint32_t count;
  get(in, count, "tensor count");
  for (std::uint32_t t = 0; t < count; ++t) {
    std::uint16_t name_len;
    get(in, name_len, "name length");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw IoError("checkpoint: truncated reading tensor name");
    std::uint8_t ndim;
    get(in, ndim, "ndim");
    Shape shape(ndim);
    for (std::uint8_t d = 0; d < ndim; ++d) {
      std::uint32_t dim;
      get(in, dim, "dim");
      shape[d] = static_cast<int>(dim);
    }
    Tensor tensor(shape);
    in.read(reinterpret_cast<char*>(tensor.data()),
            static_cast<std::streamsize>(tensor.size() * sizeof(float)));
    if (!in || in.gcount() != static_cast<std::streamsize>(tensor.size() * sizeof(float))) {
      throw IoError("checkpoint: truncated tensor data for '" + name + "'");
    }
    ckpt.tensors.emplace_back(std::move(name), std::move(tensor));
  }
  get(in, ckpt.rng_key, "rng key");
  get(in, ckpt.rng_counter, "rng counter");
  std::uint32_t cfg_len;
  get(in, cfg_len, "config length");
  ckpt.config_json.resize(cfg_len);
  in.read(ckpt.config_json.data(), cfg_len);
  if (!in || in.gcount() != static_cast<std::streamsize>(cfg_len)) {
    throw IoError("checkpoint: truncated config snapshot");
  }
  return ckpt;
}

}  // namespace ogan

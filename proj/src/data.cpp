#include "ogan/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ogan {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr char kImageMagic[4] = {'O', 'I', 'M', 'G'};
constexpr std::uint32_t kImageVersion = 1;

float clip_unit(float v) { return std::min(1.0f, std::max(-1.0f, v)); }
}  // namespace

const char* dataset_kind_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::kGaussianMixture: return "gaussian-mixture";
    case DatasetKind::kRing: return "ring";
    case DatasetKind::kCheckerboard: return "checkerboard";
    case DatasetKind::kImageFile: return "binary-image-file";
  }
  return "?";
}

DatasetKind dataset_kind_from_name(const std::string& name) {
  if (name == "gaussian-mixture") return DatasetKind::kGaussianMixture;
  if (name == "ring") return DatasetKind::kRing;
  if (name == "checkerboard") return DatasetKind::kCheckerboard;
  if (name == "binary-image-file") return DatasetKind::kImageFile;
  throw std::invalid_argument("unknown dataset kind '" + name + "'");
}

int DatasetSpec::dim() const {
  if (kind == DatasetKind::kImageFile) {
    const ImageDims d = image_file_dims(path);
    return static_cast<int>(d.h) * d.w * d.c;
  }
  return 2;
}

Tensor sample_prior(Rng& rng, int b, int n_z) {
  if (b < 1 || n_z < 1) throw std::invalid_argument("sample_prior: b and n_z must be >= 1");
  Tensor z({b, n_z});
  rng.fill_gaussian(z);
  return z;
}

std::vector<std::array<float, 2>> mixture_centers(int modes, float radius) {
  std::vector<std::array<float, 2>> centers;
  centers.reserve(static_cast<size_t>(modes));
  for (int k = 0; k < modes; ++k) {
    const double theta = kTwoPi * k / modes;
    centers.push_back({static_cast<float>(radius * std::cos(theta)),
                       static_cast<float>(radius * std::sin(theta))});
  }
  return centers;
}

Batch sample_mixture(const DatasetSpec& spec, Rng& rng, int b) {
  if (spec.kind != DatasetKind::kGaussianMixture) {
    throw std::invalid_argument("sample_mixture: spec kind is not gaussian-mixture");
  }
  if (spec.modes < 1 || spec.sigma < 0.0f) {
    throw std::invalid_argument("sample_mixture: modes >= 1 and sigma >= 0 required");
  }
  const auto centers = mixture_centers(spec.modes, spec.radius);
  Batch batch;
  batch.x = Tensor({b, 2});
  batch.labels.resize(static_cast<size_t>(b));
  for (int i = 0; i < b; ++i) {
    const int k = static_cast<int>(rng.next_index(spec.modes));
    batch.labels[static_cast<size_t>(i)] = k;
    batch.x.at2(i, 0) = clip_unit(centers[static_cast<size_t>(k)][0] + spec.sigma * rng.next_gaussian());
    batch.x.at2(i, 1) = clip_unit(centers[static_cast<size_t>(k)][1] + spec.sigma * rng.next_gaussian());
  }
  return batch;
}

Batch sample_ring(const DatasetSpec& spec, Rng& rng, int b) {
  if (spec.kind != DatasetKind::kRing) {
    throw std::invalid_argument("sample_ring: spec kind is not ring");
  }
  Batch batch;
  batch.x = Tensor({b, 2});
  for (int i = 0; i < b; ++i) {
    const double theta = rng.next_unit() * kTwoPi;
    const float r = spec.radius + spec.sigma * rng.next_gaussian();
    batch.x.at2(i, 0) = clip_unit(static_cast<float>(r * std::cos(theta)));
    batch.x.at2(i, 1) = clip_unit(static_cast<float>(r * std::sin(theta)));
  }
  return batch;
}

Batch sample_checkerboard(const DatasetSpec& spec, Rng& rng, int b) {
  if (spec.kind != DatasetKind::kCheckerboard) {
    throw std::invalid_argument("sample_checkerboard: spec kind is not checkerboard");
  }
  if (spec.cells < 2) throw std::invalid_argument("sample_checkerboard: cells >= 2 required");
  const int n = spec.cells;
  // active cells form the (row + col) even pattern
  std::vector<std::pair<int, int>> active;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if ((r + c) % 2 == 0) active.emplace_back(r, c);
    }
  }
  const float cell = 2.0f / static_cast<float>(n);
  Batch batch;
  batch.x = Tensor({b, 2});
  batch.labels.resize(static_cast<size_t>(b));
  for (int i = 0; i < b; ++i) {
    const int a = static_cast<int>(rng.next_index(static_cast<std::int64_t>(active.size())));
    const auto [r, c] = active[static_cast<size_t>(a)];
    batch.labels[static_cast<size_t>(i)] = a;
    batch.x.at2(i, 0) = -1.0f + cell * (static_cast<float>(c) + rng.next_uniform(0.0f, 1.0f));
    batch.x.at2(i, 1) = -1.0f + cell * (static_cast<float>(r) + rng.next_uniform(0.0f, 1.0f));
  }
  return batch;
}

Batch sample_dataset(const DatasetSpec& spec, Rng& rng, int b, const Tensor* image_rows) {
  switch (spec.kind) {
    case DatasetKind::kGaussianMixture: return sample_mixture(spec, rng, b);
    case DatasetKind::kRing: return sample_ring(spec, rng, b);
    case DatasetKind::kCheckerboard: return sample_checkerboard(spec, rng, b);
    case DatasetKind::kImageFile: {
      if (image_rows == nullptr) {
        throw std::invalid_argument("sample_dataset: image rows not loaded");
      }
      const int n = image_rows->dim(0);
      Batch batch;
      batch.x = Tensor({b, image_rows->dim(1)});
      for (int i = 0; i < b; ++i) {
        const int r = static_cast<int>(rng.next_index(n));
        for (int c = 0; c < image_rows->dim(1); ++c) batch.x.at2(i, c) = image_rows->at2(r, c);
      }
      return batch;
    }
  }
  throw std::logic_error("sample_dataset: bad kind");
}

namespace {

template <class T>
void read_raw(std::ifstream& in, T& v, const char* what) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError(std::string("image file: truncated reading ") + what);
}

template <class T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

ImageDims read_header(std::ifstream& in, const std::filesystem::path& path) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kImageMagic, 4) != 0) {
    throw IoError("image file: bad magic in " + path.string());
  }
  std::uint32_t version;
  read_raw(in, version, "version");
  if (version != kImageVersion) {
    throw IoError("image file: unsupported version " + std::to_string(version));
  }
  ImageDims d{};
  read_raw(in, d.n, "count");
  read_raw(in, d.h, "height");
  read_raw(in, d.w, "width");
  read_raw(in, d.c, "channels");
  return d;
}

}  // namespace

ImageDims image_file_dims(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("image file: cannot open " + path.string());
  return read_header(in, path);
}

Tensor load_image_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("image file: cannot open " + path.string());
  const ImageDims d = read_header(in, path);
  const std::int64_t row = static_cast<std::int64_t>(d.h) * d.w * d.c;
  if (d.n == 0 || row == 0) throw IoError("image file: empty dimensions in " + path.string());
  std::vector<unsigned char> bytes(static_cast<size_t>(d.n) * static_cast<size_t>(row));
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!in || in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw IoError("image file: truncated pixel data in " + path.string());
  }
  Tensor rows({static_cast<int>(d.n), static_cast<int>(row)});
  for (size_t i = 0; i < bytes.size(); ++i) {
    rows.at(static_cast<std::int64_t>(i)) = static_cast<float>(bytes[i]) / 127.5f - 1.0f;
  }
  return rows;
}

void save_image_file(const std::filesystem::path& path, const Tensor& rows, int h, int w, int c) {
  if (rows.ndim() != 2 || static_cast<std::int64_t>(h) * w * c != rows.dim(1)) {
    throw ShapeError("save_image_file: rows " + shape_str(rows.shape()) + " do not match " +
                     std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("image file: cannot write " + path.string());
  out.write(kImageMagic, 4);
  write_raw(out, kImageVersion);
  write_raw(out, static_cast<std::uint32_t>(rows.dim(0)));
  write_raw(out, static_cast<std::uint16_t>(h));
  write_raw(out, static_cast<std::uint16_t>(w));
  write_raw(out, static_cast<std::uint8_t>(c));
  for (std::int64_t i = 0; i < rows.size(); ++i) {
    const float v = clip_unit(rows.at(i));
    const int byte = static_cast<int>(std::lround((v + 1.0f) * 127.5f));
    out.put(static_cast<char>(std::min(255, std::max(0, byte))));
  }
  if (!out) throw IoError("image file: write failed for " + path.string());
}

}  // namespace ogan

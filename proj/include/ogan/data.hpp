#ifndef OGAN_DATA_HPP
#define OGAN_DATA_HPP

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "ogan/rng.hpp"
#include "ogan/tensor.hpp"

namespace ogan {

enum class DatasetKind : std::uint8_t { kGaussianMixture, kRing, kCheckerboard, kImageFile };

const char* dataset_kind_name(DatasetKind k);
DatasetKind dataset_kind_from_name(const std::string& name);

/// Synthetic 2-D distributions with known structure, or a flat binary
/// image file. Everything is scaled to the generator range [-1, 1].
struct DatasetSpec {
  DatasetKind kind = DatasetKind::kGaussianMixture;
  int modes = 8;          // gaussian-mixture
  float sigma = 0.05f;    // mode / radial std
  float radius = 0.7f;    // mixture circle and ring radius
  int cells = 4;          // checkerboard grid is cells x cells
  std::string path;       // image file

  int dim() const;  // n_x of the dataset
};

struct Batch {
  Tensor x;                 // [B x n_x]
  std::vector<int> labels;  // mode / cell index; empty when unlabeled
};

/// [B x n_z] of i.i.d. standard normal draws.
Tensor sample_prior(Rng& rng, int b, int n_z);

/// Equal-weight gaussian modes on a circle, clipped to [-1, 1]^2.
Batch sample_mixture(const DatasetSpec& spec, Rng& rng, int b);
/// Uniform angle, radius ~ radius + N(0, sigma), clipped.
Batch sample_ring(const DatasetSpec& spec, Rng& rng, int b);
/// Uniform points on the active cells of an alternating cells x cells grid.
Batch sample_checkerboard(const DatasetSpec& spec, Rng& rng, int b);

/// Sample any synthetic kind; kImageFile requires the preloaded rows.
Batch sample_dataset(const DatasetSpec& spec, Rng& rng, int b, const Tensor* image_rows = nullptr);

/// Centers of the mixture modes, counter-clockwise from angle 0.
std::vector<std::array<float, 2>> mixture_centers(int modes, float radius);

/// Flat image file ("OIMG"): pixels mapped from [0, 255] to [-1, 1] via
/// x / 127.5 - 1. Returns [N x H*W*C].
Tensor load_image_file(const std::filesystem::path& path);
struct ImageDims {
  std::uint32_t n;
  std::uint16_t h, w;
  std::uint8_t c;
};
ImageDims image_file_dims(const std::filesystem::path& path);
/// Writer for the same format; values are clamped to [-1, 1] and quantized.
void save_image_file(const std::filesystem::path& path, const Tensor& rows, int h, int w, int c);

}  // namespace ogan

#endif  // OGAN_DATA_HPP

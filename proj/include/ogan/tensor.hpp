#ifndef OGAN_TENSOR_HPP
#define OGAN_TENSOR_HPP

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace ogan {

/// Shape of a dense tensor. Rank 0 (empty) denotes a scalar.
using Shape = std::vector<int>;

std::int64_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Thrown when operand shapes are incompatible. The message names the
/// operation and both shapes.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a denominator reaches exact zero with no epsilon guard.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when an evaluation produces NaN or Inf.
struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown on malformed files, bad magic bytes, version mismatches.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense row-major tensor of 32-bit reals.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape)
      : shape_(std::move(shape)), data_(static_cast<size_t>(numel(shape_)), 0.0f) {}
  Tensor(Shape shape, std::vector<float> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<std::int64_t>(data_.size()) != numel(shape_)) {
      throw ShapeError("tensor: data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_str(shape_));
    }
  }

  static Tensor scalar(float v) { return Tensor({}, {v}); }
  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor full(Shape shape, float v);
  static Tensor vec(std::initializer_list<float> vals);
  static Tensor matrix(int rows, int cols, std::vector<float> vals) {
    return Tensor({rows, cols}, std::move(vals));
  }

  const Shape& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  float& at(std::int64_t i) { return data_[static_cast<size_t>(i)]; }
  float at(std::int64_t i) const { return data_[static_cast<size_t>(i)]; }
  /// Element (r, c) of a rank-2 tensor.
  float& at2(int r, int c) { return data_[static_cast<size_t>(r) * shape_[1] + c]; }
  float at2(int r, int c) const { return data_[static_cast<size_t>(r) * shape_[1] + c]; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;

  /// Rows [begin, end) of a rank-2 tensor as a new tensor.
  Tensor rows(int begin, int end) const;
  /// Row r of a rank-2 tensor as a rank-1 tensor of length cols.
  Tensor row(int r) const { return rows(r, r + 1).reshaped({shape_[1]}); }
  Tensor reshaped(Shape shape) const;

 private:
  Shape shape_;
  std::vector<float> data_;
};

}  // namespace ogan

#endif  // OGAN_TENSOR_HPP

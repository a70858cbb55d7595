#include "ogan/tensor.hpp"

#include <cmath>

namespace ogan {

std::int64_t numel(const Shape& shape) {
  std::int64_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw ShapeError("shape has non-positive extent " + shape_str(shape));
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor Tensor::full(Shape shape, float v) {
  Tensor t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) t.at(i) = v;
  return t;
}

Tensor Tensor::vec(std::initializer_list<float> vals) {
  return Tensor({static_cast<int>(vals.size())}, std::vector<float>(vals));
}

bool Tensor::all_finite() const {
  for (float v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor Tensor::rows(int begin, int end) const {
  if (ndim() != 2) throw ShapeError("rows: tensor is not rank-2, shape " + shape_str(shape_));
  if (begin < 0 || end > shape_[0] || begin >= end) {
    throw ShapeError("rows: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") out of bounds for shape " + shape_str(shape_));
  }
  const int cols = shape_[1];
  Tensor out({end - begin, cols});
  for (int r = begin; r < end; ++r) {
    for (int c = 0; c < cols; ++c) out.at2(r - begin, c) = at2(r, c);
  }
  return out;
}

Tensor Tensor::reshaped(Shape shape) const {
  if (numel(shape) != size()) {
    throw ShapeError("reshape: " + shape_str(shape_) + " to " + shape_str(shape) +
                     " changes element count");
  }
  return Tensor(std::move(shape), data_);
}

}  // namespace ogan

#include "ogan/rng.hpp"

#include <cmath>

namespace ogan {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::int64_t Rng::next_index(std::int64_t n) {
  double u = next_unit();  // (0, 1]
  std::int64_t i = static_cast<std::int64_t>((1.0 - u) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

float Rng::next_gaussian() {
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return static_cast<float>(r * std::cos(kTwoPi * u2));
}

void Rng::fill_gaussian(Tensor& t) {
  const std::int64_t n = t.size();
  std::int64_t i = 0;
  while (i + 1 < n) {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    t.at(i++) = static_cast<float>(r * std::cos(kTwoPi * u2));
    t.at(i++) = static_cast<float>(r * std::sin(kTwoPi * u2));
  }
  if (i < n) t.at(i) = next_gaussian();
}

void Rng::fill_uniform(Tensor& t, float lo, float hi) {
  for (std::int64_t i = 0; i < t.size(); ++i) t.at(i) = next_uniform(lo, hi);
}

}  // namespace ogan

#include "ogan/ortho.hpp"

#include <cmath>
#include <stdexcept>

namespace ogan::ortho {

namespace {

void require_vector(const Tensor& v, const char* who, int min_len) {
  if (v.ndim() != 1) {
    throw ShapeError(std::string(who) + ": rank-1 tensor required, got " + shape_str(v.shape()));
  }
  if (v.dim(0) < min_len) {
    throw std::invalid_argument(std::string(who) + ": length >= " + std::to_string(min_len) +
                                " required, got " + std::to_string(v.dim(0)));
  }
}

}  // namespace

namespace {

// scalar reductions accumulate in double and round once on the way out
double mean_f64(const Tensor& v) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < v.size(); ++i) acc += v.at(i);
  return acc / static_cast<double>(v.size());
}

double stddev_f64(const Tensor& v) {
  const double m = mean_f64(v);
  double acc = 0.0;
  for (std::int64_t i = 0; i < v.size(); ++i) {
    const double d = v.at(i) - m;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

float avg(const Tensor& v) {
  require_vector(v, "avg", 1);
  return static_cast<float>(mean_f64(v));
}

float stddev(const Tensor& v) {
  require_vector(v, "std", 1);
  return static_cast<float>(stddev_f64(v));
}

Tensor normalize(const Tensor& v, float eps) {
  require_vector(v, "normalize", 3);
  const double m = mean_f64(v);
  const double s = stddev_f64(v);
  if (s == 0.0 && eps == 0.0f) {
    throw SingularityError("normalize: zero standard deviation with eps = 0");
  }
  Tensor out(v.shape());
  for (std::int64_t i = 0; i < v.size(); ++i) {
    out.at(i) = static_cast<float>((v.at(i) - m) / (s + eps));
  }
  return out;
}

float pearson(const Tensor& z, const Tensor& zh, float eps) {
  require_vector(z, "pearson", 3);
  require_vector(zh, "pearson", 3);
  if (z.dim(0) != zh.dim(0)) {
    throw ShapeError("pearson: length mismatch " + shape_str(z.shape()) + " vs " +
                     shape_str(zh.shape()));
  }
  const double mz = mean_f64(z), mh = mean_f64(zh);
  const double sz = stddev_f64(z), sh = stddev_f64(zh);
  if (eps == 0.0f && (sz == 0.0 || sh == 0.0)) {
    throw SingularityError("pearson: zero standard deviation with eps = 0");
  }
  double cov = 0.0;
  for (std::int64_t i = 0; i < z.size(); ++i) {
    cov += (z.at(i) - mz) * (zh.at(i) - mh);
  }
  cov /= static_cast<double>(z.size());
  return static_cast<float>(cov / ((sz + eps) * (sh + eps)));
}

float normalized_mse(const Tensor& z, const Tensor& zh) {
  require_vector(z, "normalized_mse", 3);
  require_vector(zh, "normalized_mse", 3);
  if (z.dim(0) != zh.dim(0)) {
    throw ShapeError("normalized_mse: length mismatch " + shape_str(z.shape()) + " vs " +
                     shape_str(zh.shape()));
  }
  const double mz = mean_f64(z), mh = mean_f64(zh);
  const double sz = stddev_f64(z), sh = stddev_f64(zh);
  if (sz == 0.0 || sh == 0.0) {
    throw SingularityError("normalized_mse: zero standard deviation with eps = 0");
  }
  double acc = 0.0;
  for (std::int64_t i = 0; i < z.size(); ++i) {
    const double d = (z.at(i) - mz) / sz - (zh.at(i) - mh) / sh;
    acc += d * d;
  }
  return static_cast<float>(acc);
}

// ---- graph builders ----

Var avg_g(Graph& g, Var v) { return g.mean(v); }

Var std_g(Graph& g, Var v) {
  Var centered = g.sub(v, g.mean(v));
  return g.sqrt(g.mean(g.square(centered)));
}

Var normalize_g(Graph& g, Var v, float eps) {
  Var centered = g.sub(v, g.mean(v));
  Var denom = g.add(std_g(g, v), g.constant(eps));
  return g.div(centered, denom);
}

Var pearson_g(Graph& g, Var z, Var zh, float eps) {
  Var cz = g.sub(z, g.mean(z));
  Var ch = g.sub(zh, g.mean(zh));
  Var cov = g.mean(g.mul(cz, ch));
  Var denom = g.mul(g.add(std_g(g, z), g.constant(eps)), g.add(std_g(g, zh), g.constant(eps)));
  return g.div(cov, denom);
}

namespace {

// matmul with a constant ones column reduces each row; the 1/n scale makes
// it a per-row mean.
Var row_mean_of(Graph& g, Var m) {
  const Shape& s = g.shape_of(m);
  const int n = s[1];
  Var ones = g.leaf(Tensor::full({n, 1}, 1.0f));
  return g.mul(g.matmul(m, ones), g.constant(1.0f / static_cast<float>(n)));
}

}  // namespace

Var row_avg(Graph& g, Var m) {
  if (g.shape_of(m).size() != 2) {
    throw ShapeError("row_avg: rank-2 tensor required, got " + shape_str(g.shape_of(m)));
  }
  return row_mean_of(g, m);
}

Var row_std(Graph& g, Var m) {
  Var centered = g.sub(m, row_avg(g, m));
  return g.sqrt(row_mean_of(g, g.square(centered)));
}

Var row_normalize(Graph& g, Var m, float eps) {
  Var centered = g.sub(m, row_avg(g, m));
  Var denom = g.add(row_std(g, m), g.constant(eps));
  return g.div(centered, denom);
}

Var row_pearson(Graph& g, Var z, Var zh, float eps) {
  const Shape& sz = g.shape_of(z);
  const Shape& sh = g.shape_of(zh);
  if (sz != sh || sz.size() != 2) {
    throw ShapeError("row_pearson: equal rank-2 shapes required, got " + shape_str(sz) + " vs " +
                     shape_str(sh));
  }
  Var cz = g.sub(z, row_avg(g, z));
  Var ch = g.sub(zh, row_avg(g, zh));
  Var cov = row_mean_of(g, g.mul(cz, ch));
  Var denom =
      g.mul(g.add(row_std(g, z), g.constant(eps)), g.add(row_std(g, zh), g.constant(eps)));
  return g.div(cov, denom);
}

}  // namespace ogan::ortho

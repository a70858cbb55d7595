#ifndef OGAN_ORTHO_HPP
#define OGAN_ORTHO_HPP

#include "ogan/graph.hpp"
#include "ogan/tensor.hpp"

namespace ogan::ortho {

/// Default guard added to each standard-deviation factor. Keeps the
/// correlation defined (value 0) on constant vectors during training;
/// the strict eps = 0 entry points throw instead.
inline constexpr float kDefaultEps = 1e-8f;

// ---- plain evaluation on rank-1 tensors ----

/// Arithmetic mean over the vector's entries.
float avg(const Tensor& v);

/// Population standard deviation (1/n divisor). Returns 0 for constant
/// vectors.
float stddev(const Tensor& v);

/// (v - avg(v)) / (std(v) + eps). Requires length >= 3; throws
/// SingularityError when std is 0 and eps is 0.
Tensor normalize(const Tensor& v, float eps);

/// Pearson correlation of two equal-length vectors (length >= 3),
/// cov / ((std(z) + eps) * (std(zh) + eps)). With eps = 0 a zero-variance
/// input throws; with eps > 0 it yields 0.
float pearson(const Tensor& z, const Tensor& zh, float eps);

/// ||N(z) - N(zh)||^2 at eps = 0; equals 2 * n * (1 - pearson(z, zh)).
float normalized_mse(const Tensor& z, const Tensor& zh);

// ---- graph builders: single vector [n] ----

Var avg_g(Graph& g, Var v);
Var std_g(Graph& g, Var v);
Var normalize_g(Graph& g, Var v, float eps);
Var pearson_g(Graph& g, Var z, Var zh, float eps);

// ---- graph builders: row-wise over a batch [B x n] ----

/// Per-row mean, [B x 1].
Var row_avg(Graph& g, Var m);
/// Per-row population std, [B x 1].
Var row_std(Graph& g, Var m);
/// Per-row (x - avg) / (std + eps), [B x n].
Var row_normalize(Graph& g, Var m, float eps);
/// Per-row Pearson correlation of two [B x n] operands, [B x 1].
Var row_pearson(Graph& g, Var z, Var zh, float eps);

}  // namespace ogan::ortho

#endif  // OGAN_ORTHO_HPP

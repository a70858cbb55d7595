#ifndef OGAN_GRAPH_HPP
#define OGAN_GRAPH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ogan/tensor.hpp"

namespace ogan {

/// Differentiable primitives. The set spans elementwise arithmetic,
/// dense matrix products, reductions and the activations needed for
/// fully-connected nets; Leaf / Placeholder / StopGradient are structural.
enum class Op : std::uint8_t {
  kLeaf,
  kPlaceholder,
  kStopGradient,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMatMul,
  kAddBias,
  kSum,
  kMean,
  kSquare,
  kSqrt,
  kExp,
  kSoftplus,
  kRelu,
  kLeakyRelu,
  kTanh,
  kSliceRows,
  kConcatRows,
};

const char* op_name(Op op);

/// Handle to a node of a Graph. Cheap to copy; only valid for the graph
/// that created it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Reverse-mode tape over a static DAG of tensor ops.
///
/// Nodes are appended by the builder methods; a node's inputs always have
/// smaller ids, so ascending id order is a topological order. forward()
/// evaluates the ancestors of a root (placeholders take their values from
/// the feed list) and backward() then accumulates gradients for every node
/// reachable from a scalar root. Shapes are static: mismatches are
/// reported at build time, feed mismatches at forward time.
///
/// All training math runs in 32-bit floats. eval_scalar_f64() re-evaluates
/// a scalar root in a 64-bit shadow pass (optionally with one leaf
/// coordinate perturbed), which is what the finite-difference oracles use.
class Graph {
 public:
  struct Node {
    Op op = Op::kLeaf;
    std::array<int, 2> in{-1, -1};
    Shape shape;
    float alpha = 0.0f;       // leaky-relu slope
    int row_begin = 0;        // slice bounds
    int row_end = 0;
    std::string name;
    Tensor value;
    Tensor grad;
    bool evaluated = false;
    bool has_grad = false;
  };

  using Feed = std::pair<std::string, Tensor>;
  using Feeds = std::vector<Feed>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  // ---- construction ----
  Var leaf(Tensor value, std::string name = {});
  Var placeholder(Shape shape, std::string name);
  Var constant(float v) { return leaf(Tensor::scalar(v)); }
  Var stop_gradient(Var x);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var matmul(Var a, Var b);
  Var add_bias(Var m, Var bias);
  Var sum(Var x);
  Var mean(Var x);
  Var square(Var x);
  Var sqrt(Var x);
  Var exp(Var x);
  Var softplus(Var x);
  Var relu(Var x);
  Var leaky_relu(Var x, float alpha);
  Var tanh(Var x);
  Var slice_rows(Var x, int begin, int end);
  Var concat_rows(Var a, Var b);

  // ---- execution ----
  /// Evaluate all ancestors of root. Invalidates any previous evaluation.
  void forward(Var root, const Feeds& feeds = {});
  /// Evaluate additional nodes on top of the current evaluation, reusing
  /// already-computed values (the feeds of the last forward() still apply).
  void forward_more(Var root);
  /// Accumulate gradients of a scalar, already-evaluated root.
  void backward(Var root);

  const Tensor& value(Var v) const;
  /// Gradient of the last backward() root w.r.t. v. Nodes the root does not
  /// reach report a zero tensor of the node's shape.
  Tensor grad(Var v) const;

  /// 64-bit shadow evaluation of a scalar root. When bump_leaf is valid,
  /// coordinate `coord` of that leaf is offset by `delta` before the pass.
  double eval_scalar_f64(Var root, const Feeds& feeds = {}, Var bump_leaf = {},
                         std::int64_t coord = 0, double delta = 0.0) const;

  // ---- introspection ----
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
  const Shape& shape_of(Var v) const { return nodes_[check(v)].shape; }

 private:
  size_t check(Var v) const;
  Var push(Node n);
  Var binary(Op op, Var a, Var b);
  Var unary(Op op, Var x, float alpha = 0.0f);
  std::vector<char> mark_ancestors(Var root) const;
  std::string describe(int id) const;

  std::vector<Node> nodes_;
  Feeds stored_feeds_;
  bool has_evaluation_ = false;
};

/// Broadcast result shape for elementwise binaries; throws ShapeError when
/// the shapes are incompatible. Scalars broadcast against anything; equal
/// ranks broadcast per-dimension where one extent is 1.
Shape broadcast_shape(const Shape& a, const Shape& b, const char* opname);

}  // namespace ogan

#endif  // OGAN_GRAPH_HPP

#include "ogan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace ogan {

const char* op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kPlaceholder: return "placeholder";
    case Op::kStopGradient: return "stop_gradient";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kDiv: return "div";
    case Op::kMatMul: return "matmul";
    case Op::kAddBias: return "add_bias";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kSquare: return "square";
    case Op::kSqrt: return "sqrt";
    case Op::kExp: return "exp";
    case Op::kSoftplus: return "softplus";
    case Op::kRelu: return "relu";
    case Op::kLeakyRelu: return "leaky_relu";
    case Op::kTanh: return "tanh";
    case Op::kSliceRows: return "slice_rows";
    case Op::kConcatRows: return "concat_rows";
  }
  return "?";
}

Shape broadcast_shape(const Shape& a, const Shape& b, const char* opname) {
  if (a == b) return a;
  if (numel(a) == 1) return b;
  if (numel(b) == 1) return a;
  if (a.size() == b.size()) {
    Shape out(a.size());
    bool ok = true;
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i] == b[i] || b[i] == 1) {
        out[i] = a[i];
      } else if (a[i] == 1) {
        out[i] = b[i];
      } else {
        ok = false;
        break;
      }
    }
    if (ok) return out;
  }
  throw ShapeError(std::string(opname) + ": incompatible shapes " + shape_str(a) + " and " +
                   shape_str(b));
}

namespace {

// Row/column strides of an input under scalar or per-dimension broadcast
// against a rank <= 2 output shape.
struct BcStride {
  std::int64_t row = 0;
  std::int64_t col = 0;
};

BcStride strides_for(const Shape& in, const Shape& out) {
  BcStride s;
  if (numel(in) == 1) return s;  // scalar: both strides 0
  if (in == out) {
    if (out.size() == 2) {
      s.row = out[1];
      s.col = 1;
    } else if (out.size() == 1) {
      s.col = 1;
    }
    return s;
  }
  // equal rank, some extents 1
  s.row = (in.size() == 2 && in[0] != 1) ? in[1] : 0;
  s.col = (in[in.size() - 1] != 1) ? 1 : 0;
  if (in.size() == 1) {
    s.row = 0;
    s.col = (in[0] != 1) ? 1 : 0;
  }
  return s;
}

std::int64_t out_rows(const Shape& s) { return s.size() == 2 ? s[0] : 1; }
std::int64_t out_cols(const Shape& s) {
  if (s.empty()) return 1;
  return s.size() == 2 ? s[1] : s[0];
}

template <class S, class F>
void binary_map(const Shape& sa, const S* a, const Shape& sb, const S* b, const Shape& so, S* out,
                F f) {
  const std::int64_t rows = out_rows(so), cols = out_cols(so);
  const BcStride ba = strides_for(sa, so), bb = strides_for(sb, so);
  for (std::int64_t r = 0; r < rows; ++r) {
    const S* ar = a + r * ba.row;
    const S* br = b + r * bb.row;
    S* or_ = out + r * cols;
    for (std::int64_t c = 0; c < cols; ++c) or_[c] = f(ar[c * ba.col], br[c * bb.col]);
  }
}

template <class S>
S softplus_val(S x) {
  const S ax = x < S(0) ? -x : x;
  return std::max(x, S(0)) + std::log1p(std::exp(-ax));
}

template <class S>
S sigmoid_val(S x) {
  if (x >= S(0)) return S(1) / (S(1) + std::exp(-x));
  const S e = std::exp(x);
  return e / (S(1) + e);
}

// A [m,k] * B [k,n] -> C [m,n]; vector operands are treated as [1,k] or
// [k,1] as appropriate by the caller.
template <class S>
void matmul_kernel(const S* a, const S* b, S* c, std::int64_t m, std::int64_t k, std::int64_t n) {
  std::fill(c, c + m * n, S(0));
  for (std::int64_t i = 0; i < m; ++i) {
    const S* arow = a + i * k;
    S* crow = c + i * n;
    for (std::int64_t kk = 0; kk < k; ++kk) {
      const S aik = arow[kk];
      const S* brow = b + kk * n;
      for (std::int64_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void matmul_dims(const Shape& sa, const Shape& sb, std::int64_t& m, std::int64_t& k,
                 std::int64_t& n) {
  if (sa.size() == 2 && sb.size() == 2) {
    m = sa[0], k = sa[1], n = sb[1];
  } else if (sa.size() == 2 && sb.size() == 1) {
    m = sa[0], k = sa[1], n = 1;
  } else {
    m = 1, k = sa[0], n = sb[1];
  }
}

}  // namespace

size_t Graph::check(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
    throw std::logic_error("graph: invalid var handle");
  }
  return static_cast<size_t>(v.id);
}

std::string Graph::describe(int id) const {
  const Node& n = nodes_[static_cast<size_t>(id)];
  std::string s = std::string(op_name(n.op)) + "#" + std::to_string(id);
  if (!n.name.empty()) s += " '" + n.name + "'";
  return s;
}

Var Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::leaf(Tensor value, std::string name) {
  Node n;
  n.op = Op::kLeaf;
  n.shape = value.shape();
  n.value = std::move(value);
  n.name = std::move(name);
  return push(std::move(n));
}

Var Graph::placeholder(Shape shape, std::string name) {
  if (name.empty()) throw std::logic_error("placeholder requires a name");
  Node n;
  n.op = Op::kPlaceholder;
  n.shape = std::move(shape);
  n.name = std::move(name);
  return push(std::move(n));
}

Var Graph::stop_gradient(Var x) {
  Node n;
  n.op = Op::kStopGradient;
  n.in[0] = static_cast<int>(check(x));
  n.shape = nodes_[check(x)].shape;
  return push(std::move(n));
}

Var Graph::binary(Op op, Var a, Var b) {
  Node n;
  n.op = op;
  n.in[0] = static_cast<int>(check(a));
  n.in[1] = static_cast<int>(check(b));
  n.shape = broadcast_shape(nodes_[check(a)].shape, nodes_[check(b)].shape, op_name(op));
  if (n.shape.size() > 2) {
    throw ShapeError(std::string(op_name(op)) + ": rank > 2 unsupported");
  }
  return push(std::move(n));
}

Var Graph::add(Var a, Var b) { return binary(Op::kAdd, a, b); }
Var Graph::sub(Var a, Var b) { return binary(Op::kSub, a, b); }
Var Graph::mul(Var a, Var b) { return binary(Op::kMul, a, b); }
Var Graph::div(Var a, Var b) { return binary(Op::kDiv, a, b); }

Var Graph::matmul(Var a, Var b) {
  const Shape& sa = nodes_[check(a)].shape;
  const Shape& sb = nodes_[check(b)].shape;
  Shape out;
  if (sa.size() == 2 && sb.size() == 2 && sa[1] == sb[0]) {
    out = {sa[0], sb[1]};
  } else if (sa.size() == 2 && sb.size() == 1 && sa[1] == sb[0]) {
    out = {sa[0]};
  } else if (sa.size() == 1 && sb.size() == 2 && sa[0] == sb[0]) {
    out = {sb[1]};
  } else {
    throw ShapeError("matmul: incompatible shapes " + shape_str(sa) + " and " + shape_str(sb) +
                     " (node " + describe(a.id) + " x " + describe(b.id) + ")");
  }
  Node n;
  n.op = Op::kMatMul;
  n.in[0] = a.id;
  n.in[1] = b.id;
  n.shape = std::move(out);
  return push(std::move(n));
}

Var Graph::add_bias(Var m, Var bias) {
  const Shape& sm = nodes_[check(m)].shape;
  const Shape& sb = nodes_[check(bias)].shape;
  if (sm.size() != 2 || sb.size() != 1 || sb[0] != sm[1]) {
    throw ShapeError("add_bias: incompatible shapes " + shape_str(sm) + " and " + shape_str(sb));
  }
  Node n;
  n.op = Op::kAddBias;
  n.in[0] = m.id;
  n.in[1] = bias.id;
  n.shape = sm;
  return push(std::move(n));
}

Var Graph::unary(Op op, Var x, float alpha) {
  Node n;
  n.op = op;
  n.in[0] = static_cast<int>(check(x));
  n.shape = (op == Op::kSum || op == Op::kMean) ? Shape{} : nodes_[check(x)].shape;
  n.alpha = alpha;
  return push(std::move(n));
}

Var Graph::sum(Var x) { return unary(Op::kSum, x); }
Var Graph::mean(Var x) { return unary(Op::kMean, x); }
Var Graph::square(Var x) { return unary(Op::kSquare, x); }
Var Graph::sqrt(Var x) { return unary(Op::kSqrt, x); }
Var Graph::exp(Var x) { return unary(Op::kExp, x); }
Var Graph::softplus(Var x) { return unary(Op::kSoftplus, x); }
Var Graph::relu(Var x) { return unary(Op::kRelu, x); }
Var Graph::leaky_relu(Var x, float alpha) { return unary(Op::kLeakyRelu, x, alpha); }
Var Graph::tanh(Var x) { return unary(Op::kTanh, x); }

Var Graph::slice_rows(Var x, int begin, int end) {
  const Shape& s = nodes_[check(x)].shape;
  if (s.size() != 1 && s.size() != 2) {
    throw ShapeError("slice_rows: rank 1 or 2 required, got " + shape_str(s));
  }
  const int rows = s[0];
  if (begin < 0 || end > rows || begin >= end) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") out of bounds for " + shape_str(s));
  }
  Node n;
  n.op = Op::kSliceRows;
  n.in[0] = x.id;
  n.shape = s;
  n.shape[0] = end - begin;
  n.row_begin = begin;
  n.row_end = end;
  return push(std::move(n));
}

Var Graph::concat_rows(Var a, Var b) {
  const Shape& sa = nodes_[check(a)].shape;
  const Shape& sb = nodes_[check(b)].shape;
  if (sa.size() != sb.size() || sa.empty() || (sa.size() == 2 && sa[1] != sb[1])) {
    throw ShapeError("concat_rows: incompatible shapes " + shape_str(sa) + " and " + shape_str(sb));
  }
  Node n;
  n.op = Op::kConcatRows;
  n.in[0] = a.id;
  n.in[1] = b.id;
  n.shape = sa;
  n.shape[0] = sa[0] + sb[0];
  return push(std::move(n));
}

std::vector<char> Graph::mark_ancestors(Var root) const {
  std::vector<char> marked(nodes_.size(), 0);
  std::vector<int> stack{static_cast<int>(check(root))};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (marked[static_cast<size_t>(id)]) continue;
    marked[static_cast<size_t>(id)] = 1;
    for (int in : nodes_[static_cast<size_t>(id)].in) {
      if (in >= 0 && !marked[static_cast<size_t>(in)]) stack.push_back(in);
    }
  }
  return marked;
}

namespace {

// One generic evaluation step shared by the float path and the 64-bit
// shadow path. `get` maps a node id to its (already computed) buffer.
template <class S, class GetPtr>
void eval_node(const Graph::Node& n, const Shape& s0, const Shape& s1, GetPtr get, S* out,
               const std::string& where) {
  const S* a = n.in[0] >= 0 ? get(n.in[0]) : nullptr;
  const S* b = n.in[1] >= 0 ? get(n.in[1]) : nullptr;
  const std::int64_t count = numel(n.shape);
  switch (n.op) {
    case Op::kLeaf:
    case Op::kPlaceholder:
      throw std::logic_error("eval_node on terminal");
    case Op::kStopGradient:
      std::copy(a, a + count, out);
      break;
    case Op::kAdd:
      binary_map(s0, a, s1, b, n.shape, out, [](S x, S y) { return x + y; });
      break;
    case Op::kSub:
      binary_map(s0, a, s1, b, n.shape, out, [](S x, S y) { return x - y; });
      break;
    case Op::kMul:
      binary_map(s0, a, s1, b, n.shape, out, [](S x, S y) { return x * y; });
      break;
    case Op::kDiv: {
      const std::int64_t nb = numel(s1);
      for (std::int64_t i = 0; i < nb; ++i) {
        if (b[i] == S(0)) {
          throw SingularityError("div: zero denominator at " + where);
        }
      }
      binary_map(s0, a, s1, b, n.shape, out, [](S x, S y) { return x / y; });
      break;
    }
    case Op::kMatMul: {
      std::int64_t m, k, nn;
      matmul_dims(s0, s1, m, k, nn);
      matmul_kernel(a, b, out, m, k, nn);
      break;
    }
    case Op::kAddBias: {
      const std::int64_t rows = s0[0], cols = s0[1];
      for (std::int64_t r = 0; r < rows; ++r) {
        for (std::int64_t c = 0; c < cols; ++c) out[r * cols + c] = a[r * cols + c] + b[c];
      }
      break;
    }
    case Op::kSum:
    case Op::kMean: {
      const std::int64_t ni = numel(s0);
      S acc = S(0);
      for (std::int64_t i = 0; i < ni; ++i) acc += a[i];
      out[0] = n.op == Op::kMean ? acc / static_cast<S>(ni) : acc;
      break;
    }
    case Op::kSquare:
      for (std::int64_t i = 0; i < count; ++i) out[i] = a[i] * a[i];
      break;
    case Op::kSqrt:
      for (std::int64_t i = 0; i < count; ++i) out[i] = std::sqrt(a[i]);
      break;
    case Op::kExp:
      for (std::int64_t i = 0; i < count; ++i) out[i] = std::exp(a[i]);
      break;
    case Op::kSoftplus:
      for (std::int64_t i = 0; i < count; ++i) out[i] = softplus_val(a[i]);
      break;
    case Op::kRelu:
      for (std::int64_t i = 0; i < count; ++i) out[i] = a[i] > S(0) ? a[i] : S(0);
      break;
    case Op::kLeakyRelu: {
      const S alpha = static_cast<S>(n.alpha);
      for (std::int64_t i = 0; i < count; ++i) out[i] = a[i] > S(0) ? a[i] : alpha * a[i];
      break;
    }
    case Op::kTanh:
      for (std::int64_t i = 0; i < count; ++i) out[i] = std::tanh(a[i]);
      break;
    case Op::kSliceRows: {
      const std::int64_t cols = s0.size() == 2 ? s0[1] : 1;
      std::copy(a + n.row_begin * cols, a + n.row_end * cols, out);
      break;
    }
    case Op::kConcatRows: {
      const std::int64_t na = numel(s0);
      std::copy(a, a + na, out);
      std::copy(b, b + numel(s1), out + na);
      break;
    }
  }
}

const Tensor* find_feed(const Graph::Feeds& feeds, const std::string& name) {
  for (const auto& [key, value] : feeds) {
    if (key == name) return &value;
  }
  return nullptr;
}

}  // namespace

void Graph::forward(Var root, const Feeds& feeds) {
  stored_feeds_ = feeds;
  for (Node& n : nodes_) {
    n.evaluated = false;
    n.has_grad = false;
  }
  has_evaluation_ = true;
  forward_more(root);
}

void Graph::forward_more(Var root) {
  if (!has_evaluation_) throw std::logic_error("forward_more before forward");
  const std::vector<char> marked = mark_ancestors(root);
  for (size_t id = 0; id < nodes_.size(); ++id) {
    if (!marked[id]) continue;
    Node& n = nodes_[id];
    if (n.evaluated) continue;
    if (n.op == Op::kLeaf) {
      if (n.value.empty() && numel(n.shape) > 0) {
        throw std::logic_error("leaf " + describe(static_cast<int>(id)) + " has no value");
      }
    } else if (n.op == Op::kPlaceholder) {
      const Tensor* feed = find_feed(stored_feeds_, n.name);
      if (feed == nullptr) {
        throw std::invalid_argument("forward: missing feed for placeholder '" + n.name + "'");
      }
      if (feed->shape() != n.shape) {
        throw ShapeError("forward: feed for '" + n.name + "' has shape " +
                         shape_str(feed->shape()) + ", placeholder expects " + shape_str(n.shape));
      }
      n.value = *feed;
    } else {
      if (n.value.shape() != n.shape || n.value.size() != numel(n.shape)) n.value = Tensor(n.shape);
      const Shape& s0 = n.in[0] >= 0 ? nodes_[static_cast<size_t>(n.in[0])].shape : Shape{};
      const Shape& s1 = n.in[1] >= 0 ? nodes_[static_cast<size_t>(n.in[1])].shape : Shape{};
      eval_node<float>(
          n, s0, s1,
          [&](int in) { return nodes_[static_cast<size_t>(in)].value.data(); }, n.value.data(),
          describe(static_cast<int>(id)));
    }
    if (!n.value.all_finite()) {
      throw NonFiniteError("forward: non-finite value at " + describe(static_cast<int>(id)));
    }
    n.evaluated = true;
  }
}

void Graph::backward(Var root) {
  const size_t rid = check(root);
  if (!nodes_[rid].evaluated) throw std::logic_error("backward before forward");
  if (numel(nodes_[rid].shape) != 1) {
    throw std::invalid_argument("backward: root " + describe(root.id) + " is not a scalar, shape " +
                                shape_str(nodes_[rid].shape));
  }
  const std::vector<char> marked = mark_ancestors(root);
  for (size_t id = 0; id < nodes_.size(); ++id) {
    if (marked[id]) {
      nodes_[id].grad = Tensor(nodes_[id].shape);
      nodes_[id].has_grad = true;
    } else {
      nodes_[id].has_grad = false;
    }
  }
  nodes_[rid].grad.at(0) = 1.0f;

  for (std::int64_t id = static_cast<std::int64_t>(nodes_.size()) - 1; id >= 0; --id) {
    if (!marked[static_cast<size_t>(id)]) continue;
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.op == Op::kLeaf || n.op == Op::kPlaceholder || n.op == Op::kStopGradient) continue;
    const float* g = n.grad.data();
    Node* i0 = n.in[0] >= 0 ? &nodes_[static_cast<size_t>(n.in[0])] : nullptr;
    Node* i1 = n.in[1] >= 0 ? &nodes_[static_cast<size_t>(n.in[1])] : nullptr;

    switch (n.op) {
      case Op::kAdd:
      case Op::kSub:
      case Op::kMul:
      case Op::kDiv: {
        const std::int64_t rows = out_rows(n.shape), cols = out_cols(n.shape);
        const BcStride ba = strides_for(i0->shape, n.shape);
        const BcStride bb = strides_for(i1->shape, n.shape);
        float* da = i0->grad.data();
        float* db = i1->grad.data();
        const float* av = i0->value.data();
        const float* bv = i1->value.data();
        for (std::int64_t r = 0; r < rows; ++r) {
          for (std::int64_t c = 0; c < cols; ++c) {
            const float go = g[r * cols + c];
            const std::int64_t ia = r * ba.row + c * ba.col;
            const std::int64_t ib = r * bb.row + c * bb.col;
            switch (n.op) {
              case Op::kAdd:
                da[ia] += go;
                db[ib] += go;
                break;
              case Op::kSub:
                da[ia] += go;
                db[ib] -= go;
                break;
              case Op::kMul:
                da[ia] += go * bv[ib];
                db[ib] += go * av[ia];
                break;
              default:  // kDiv
                da[ia] += go / bv[ib];
                db[ib] -= go * av[ia] / (bv[ib] * bv[ib]);
                break;
            }
          }
        }
        break;
      }
      case Op::kMatMul: {
        std::int64_t m, k, nn;
        matmul_dims(i0->shape, i1->shape, m, k, nn);
        const float* av = i0->value.data();
        const float* bv = i1->value.data();
        float* da = i0->grad.data();
        float* db = i1->grad.data();
        // dA += g * B^T
        for (std::int64_t i = 0; i < m; ++i) {
          for (std::int64_t kk = 0; kk < k; ++kk) {
            float acc = 0.0f;
            const float* grow = g + i * nn;
            const float* brow = bv + kk * nn;
            for (std::int64_t j = 0; j < nn; ++j) acc += grow[j] * brow[j];
            da[i * k + kk] += acc;
          }
        }
        // dB += A^T * g
        for (std::int64_t kk = 0; kk < k; ++kk) {
          for (std::int64_t i = 0; i < m; ++i) {
            const float aik = av[i * k + kk];
            const float* grow = g + i * nn;
            float* brow = db + kk * nn;
            for (std::int64_t j = 0; j < nn; ++j) brow[j] += aik * grow[j];
          }
        }
        break;
      }
      case Op::kAddBias: {
        const std::int64_t rows = n.shape[0], cols = n.shape[1];
        float* da = i0->grad.data();
        float* db = i1->grad.data();
        for (std::int64_t r = 0; r < rows; ++r) {
          for (std::int64_t c = 0; c < cols; ++c) {
            da[r * cols + c] += g[r * cols + c];
            db[c] += g[r * cols + c];
          }
        }
        break;
      }
      case Op::kSum: {
        float* da = i0->grad.data();
        for (std::int64_t i = 0; i < i0->grad.size(); ++i) da[i] += g[0];
        break;
      }
      case Op::kMean: {
        float* da = i0->grad.data();
        const float s = g[0] / static_cast<float>(i0->grad.size());
        for (std::int64_t i = 0; i < i0->grad.size(); ++i) da[i] += s;
        break;
      }
      case Op::kSquare: {
        float* da = i0->grad.data();
        const float* av = i0->value.data();
        for (std::int64_t i = 0; i < i0->grad.size(); ++i) da[i] += 2.0f * av[i] * g[i];
        break;
      }
      case Op::kSqrt: {
        float* da = i0->grad.data();
        const float* yv = n.value.data();
        for (std::int64_t i = 0; i < i0->grad.size(); ++i) {
          da[i] += g[i] / (2.0f * std::max(yv[i], 1e-20f));
        }
        break;
      }
      case Op::kExp: {
        float* da = i0->grad.data();
        const float* yv = n.value.data();
        for (std::int64_t i = 0; i < i0->grad.size(); ++i) da[i] += yv[i] * g[i];
        break;
      }
      case Op::kSoftplus: {
        float* da = i0->grad.data();
        const float* av = i0->value.data();
        for (std::int64_t i = 0; i < i0->grad.size(); ++i) da[i] += sigmoid_val(av[i]) * g[i];
        break;
      }
      case Op::kRelu: {
        float* da = i0->grad.data();
        const float* av = i0->value.data();
        for (std::int64_t i = 0; i < i0->grad.size(); ++i) da[i] += av[i] > 0.0f ? g[i] : 0.0f;
        break;
      }
      case Op::kLeakyRelu: {
        float* da = i0->grad.data();
        const float* av = i0->value.data();
        for (std::int64_t i = 0; i < i0->grad.size(); ++i) {
          da[i] += (av[i] > 0.0f ? 1.0f : n.alpha) * g[i];
        }
        break;
      }
      case Op::kTanh: {
        float* da = i0->grad.data();
        const float* yv = n.value.data();
        for (std::int64_t i = 0; i < i0->grad.size(); ++i) da[i] += (1.0f - yv[i] * yv[i]) * g[i];
        break;
      }
      case Op::kSliceRows: {
        const std::int64_t cols = i0->shape.size() == 2 ? i0->shape[1] : 1;
        float* da = i0->grad.data() + n.row_begin * cols;
        for (std::int64_t i = 0; i < n.grad.size(); ++i) da[i] += g[i];
        break;
      }
      case Op::kConcatRows: {
        float* da = i0->grad.data();
        float* db = i1->grad.data();
        const std::int64_t na = i0->grad.size();
        for (std::int64_t i = 0; i < na; ++i) da[i] += g[i];
        for (std::int64_t i = 0; i < i1->grad.size(); ++i) db[i] += g[na + i];
        break;
      }
      default:
        break;
    }
  }
}

const Tensor& Graph::value(Var v) const {
  const Node& n = nodes_[check(v)];
  if (!n.evaluated) throw std::logic_error("value: node " + describe(v.id) + " not evaluated");
  return n.value;
}

Tensor Graph::grad(Var v) const {
  const Node& n = nodes_[check(v)];
  if (!n.has_grad) return Tensor(n.shape);
  return n.grad;
}

double Graph::eval_scalar_f64(Var root, const Feeds& feeds, Var bump_leaf, std::int64_t coord,
                              double delta) const {
  const size_t rid = check(root);
  if (numel(nodes_[rid].shape) != 1) {
    throw std::invalid_argument("eval_scalar_f64: root is not a scalar");
  }
  const std::vector<char> marked = mark_ancestors(root);
  std::vector<std::vector<double>> buf(nodes_.size());
  for (size_t id = 0; id < nodes_.size(); ++id) {
    if (!marked[id]) continue;
    const Node& n = nodes_[id];
    buf[id].resize(static_cast<size_t>(numel(n.shape)));
    if (n.op == Op::kLeaf) {
      for (std::int64_t i = 0; i < n.value.size(); ++i) buf[id][static_cast<size_t>(i)] = n.value.at(i);
      if (bump_leaf.valid() && static_cast<size_t>(bump_leaf.id) == id) {
        buf[id][static_cast<size_t>(coord)] += delta;
      }
    } else if (n.op == Op::kPlaceholder) {
      const Tensor* feed = find_feed(feeds, n.name);
      if (feed == nullptr) {
        throw std::invalid_argument("eval_scalar_f64: missing feed for '" + n.name + "'");
      }
      if (feed->shape() != n.shape) {
        throw ShapeError("eval_scalar_f64: feed for '" + n.name + "' has shape " +
                         shape_str(feed->shape()) + ", placeholder expects " + shape_str(n.shape));
      }
      for (std::int64_t i = 0; i < feed->size(); ++i) buf[id][static_cast<size_t>(i)] = feed->at(i);
    } else {
      const Shape& s0 = n.in[0] >= 0 ? nodes_[static_cast<size_t>(n.in[0])].shape : Shape{};
      const Shape& s1 = n.in[1] >= 0 ? nodes_[static_cast<size_t>(n.in[1])].shape : Shape{};
      eval_node<double>(
          n, s0, s1, [&](int in) { return buf[static_cast<size_t>(in)].data(); }, buf[id].data(),
          describe(static_cast<int>(id)));
    }
  }
  const double out = buf[rid][0];
  if (!std::isfinite(out)) {
    throw NonFiniteError("eval_scalar_f64: non-finite output at root " + describe(root.id));
  }
  return out;
}

}  // namespace ogan

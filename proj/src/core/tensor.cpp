// Copyright 2026 The channelsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "channelsum/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "channelsum/error.hpp"

namespace channelsum::ad {
namespace {

thread_local bool g_grad_enabled = true;

#ifdef NDEBUG
bool g_finite_checks = false;
#else
bool g_finite_checks = true;
#endif

[[noreturn]] void ThrowShape(const char* op, const Shape& a, const Shape& b) {
  throw Error(ErrorCode::kShapeMismatch, std::string(op) + ": incompatible shapes " +
                                             ShapeToString(a) + " and " +
                                             ShapeToString(b));
}

[[noreturn]] void ThrowShape(const char* op, const Shape& a) {
  throw Error(ErrorCode::kShapeMismatch,
              std::string(op) + ": unsupported shape " + ShapeToString(a));
}

void CheckFinite(const char* op, const std::vector<double>& v) {
  if (!g_finite_checks) return;
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kNonFiniteValue,
                  std::string(op) + ": produced a non-finite value");
    }
  }
}

// Parents that need gradients; nullptr entries for those that do not.
bool AnyRequiresGrad(const std::vector<Tensor>& parents) {
  return std::any_of(parents.begin(), parents.end(),
                     [](const Tensor& t) { return t.requires_grad(); });
}

std::vector<double>* GradOf(Node& self, std::size_t parent) {
  Node& p = *self.parents[parent];
  return p.requires_grad ? &p.grad_buffer() : nullptr;
}

template <typename F, typename D>
Tensor Unary(const char* op, const Tensor& a, F f, D dfdx) {
  std::vector<double> out(a.numel());
  auto in = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return Tensor::MakeOp(op, a.shape(), std::move(out), {a},
                        [dfdx](Node& self) {
                          auto* ga = GradOf(self, 0);
                          if (!ga) return;
                          const auto& x = self.parents[0]->value;
                          for (std::size_t i = 0; i < x.size(); ++i) {
                            (*ga)[i] += self.grad[i] * dfdx(x[i], self.value[i]);
                          }
                        });
}

enum class Elementwise { kAdd, kSub, kMul };

Tensor Binary(const char* op, Elementwise kind, const Tensor& a, const Tensor& b) {
  const bool a_scalar = a.rank() == 0;
  const bool b_scalar = b.rank() == 0;
  if (!a_scalar && !b_scalar && a.shape() != b.shape()) {
    ThrowShape(op, a.shape(), b.shape());
  }
  const Shape shape = (a_scalar && !b_scalar) ? b.shape() : a.shape();
  const std::size_t n = NumElements(shape);
  std::vector<double> out(n);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = av[a_scalar ? 0 : i];
    const double y = bv[b_scalar ? 0 : i];
    switch (kind) {
      case Elementwise::kAdd: out[i] = x + y; break;
      case Elementwise::kSub: out[i] = x - y; break;
      case Elementwise::kMul: out[i] = x * y; break;
    }
  }
  return Tensor::MakeOp(
      op, shape, std::move(out), {a, b},
      [kind, a_scalar, b_scalar](Node& self) {
        auto* ga = GradOf(self, 0);
        auto* gb = GradOf(self, 1);
        const auto& av = self.parents[0]->value;
        const auto& bv = self.parents[1]->value;
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          const double g = self.grad[i];
          const std::size_t ia = a_scalar ? 0 : i;
          const std::size_t ib = b_scalar ? 0 : i;
          switch (kind) {
            case Elementwise::kAdd:
              if (ga) (*ga)[ia] += g;
              if (gb) (*gb)[ib] += g;
              break;
            case Elementwise::kSub:
              if (ga) (*ga)[ia] += g;
              if (gb) (*gb)[ib] -= g;
              break;
            case Elementwise::kMul:
              if (ga) (*ga)[ia] += g * bv[ib];
              if (gb) (*gb)[ib] += g * av[ia];
              break;
          }
        }
      });
}

// c[m,n] += a[m,k] * b[k,n]
void Gemm(const double* a, const double* b, double* c, std::size_t m,
          std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    const double* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace

std::size_t NumElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string ShapeToString(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

std::vector<double>& Node::grad_buffer() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
  return grad;
}

Tensor Tensor::Constant(Shape shape, std::vector<double> values) {
  if (NumElements(shape) != values.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "constant: shape " + ShapeToString(shape) + " needs " +
                    std::to_string(NumElements(shape)) + " values, got " +
                    std::to_string(values.size()));
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  return Tensor(std::move(node));
}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  const std::size_t n = NumElements(shape);
  Tensor t = Constant(std::move(shape), std::vector<double>(n, 0.0));
  t.node_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::Scalar(double value) { return Constant({}, {value}); }

Tensor Tensor::Parameter(Shape shape, std::vector<double> values) {
  Tensor t = Constant(std::move(shape), std::move(values));
  t.node_->requires_grad = true;
  return t;
}

double Tensor::item() const {
  if (numel() != 1) {
    throw Error(ErrorCode::kNotScalar,
                "item: tensor has shape " + ShapeToString(shape()));
  }
  return node_->value[0];
}

std::vector<double> Tensor::grad() const {
  if (node_->grad.empty()) return std::vector<double>(numel(), 0.0);
  return node_->grad;
}

void Tensor::ZeroGrad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::MakeOp(const char* op, Shape shape, std::vector<double> value,
                      std::vector<Tensor> parents, BackwardFn backward) {
  CheckFinite(op, value);
  auto node = std::make_shared<Node>();
  node->op = op;
  node->shape = std::move(shape);
  node->value = std::move(value);
  if (g_grad_enabled && AnyRequiresGrad(parents)) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (auto& p : parents) node->parents.push_back(p.node_);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

void Backward(const Tensor& loss) {
  if (loss.numel() != 1) {
    throw Error(ErrorCode::kNotScalar,
                "backward: loss has shape " + ShapeToString(loss.shape()));
  }
  Node* root = loss.node();
  if (!root->requires_grad) return;

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root, 0}};
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* n : order) {
    if (n->backward) n->grad.assign(n->value.size(), 0.0);
  }
  root->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) (*it)->backward(**it);
  }
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool GradEnabled() { return g_grad_enabled; }

void SetFiniteChecks(bool enabled) { g_finite_checks = enabled; }
bool FiniteChecks() { return g_finite_checks; }

Tensor MatMul(const Tensor& a, const Tensor& b) {
  std::size_t m = 0, k = 0, n = 0;
  Shape out_shape;
  if (a.rank() == 2 && b.rank() == 2 && a.dim(1) == b.dim(0)) {
    m = a.dim(0), k = a.dim(1), n = b.dim(1);
    out_shape = {m, n};
  } else if (a.rank() == 1 && b.rank() == 2 && a.dim(0) == b.dim(0)) {
    m = 1, k = a.dim(0), n = b.dim(1);
    out_shape = {n};
  } else if (a.rank() == 2 && b.rank() == 1 && a.dim(1) == b.dim(0)) {
    m = a.dim(0), k = a.dim(1), n = 1;
    out_shape = {m};
  } else {
    ThrowShape("matmul", a.shape(), b.shape());
  }
  std::vector<double> out(m * n, 0.0);
  Gemm(a.values().data(), b.values().data(), out.data(), m, k, n);
  return Tensor::MakeOp(
      "matmul", std::move(out_shape), std::move(out), {a, b},
      [m, k, n](Node& self) {
        const double* av = self.parents[0]->value.data();
        const double* bv = self.parents[1]->value.data();
        const double* g = self.grad.data();
        if (auto* ga = GradOf(self, 0)) {
          // dA[i,p] += sum_j g[i,j] * B[p,j]
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
              const double* brow = bv + p * n;
              const double* grow = g + i * n;
              double acc = 0.0;
              for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
              (*ga)[i * k + p] += acc;
            }
          }
        }
        if (auto* gb = GradOf(self, 1)) {
          // dB[p,j] += sum_i A[i,p] * g[i,j], summed apart so repeated
          // backward passes accumulate the same rounded contribution.
          std::vector<double> db(k * n, 0.0);
          for (std::size_t i = 0; i < m; ++i) {
            const double* grow = g + i * n;
            for (std::size_t p = 0; p < k; ++p) {
              const double aip = av[i * k + p];
              if (aip == 0.0) continue;
              double* dbrow = db.data() + p * n;
              for (std::size_t j = 0; j < n; ++j) dbrow[j] += aip * grow[j];
            }
          }
          for (std::size_t q = 0; q < k * n; ++q) (*gb)[q] += db[q];
        }
      });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  return Binary("add", Elementwise::kAdd, a, b);
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  return Binary("sub", Elementwise::kSub, a, b);
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  return Binary("mul", Elementwise::kMul, a, b);
}

Tensor Scale(const Tensor& a, double factor) {
  return Unary(
      "scale", a, [factor](double x) { return x * factor; },
      [factor](double, double) { return factor; });
}

Tensor Concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "concat: no inputs");
  }
  const Shape& first = parts[0].shape();
  const std::size_t rank = first.size();
  if (rank == 0 || rank > 2 || axis >= rank) ThrowShape("concat", first);
  // View every part as (rows, cols); concatenation joins rows or cols.
  auto rows_of = [&](const Shape& s) { return rank == 1 ? std::size_t{1} : s[0]; };
  auto cols_of = [&](const Shape& s) { return rank == 1 ? s[0] : s[1]; };
  const bool along_cols = rank == 1 || axis == 1;
  std::size_t rows = rows_of(first), cols = 0, total_rows = 0;
  for (const auto& p : parts) {
    if (p.rank() != rank) ThrowShape("concat", first, p.shape());
    if (along_cols) {
      if (rows_of(p.shape()) != rows) ThrowShape("concat", first, p.shape());
      cols += cols_of(p.shape());
    } else {
      if (cols_of(p.shape()) != cols_of(first)) ThrowShape("concat", first, p.shape());
      total_rows += rows_of(p.shape());
    }
  }
  if (!along_cols) {
    rows = total_rows;
    cols = cols_of(first);
  }
  std::vector<double> out(rows * cols);
  // offsets[i] = starting column (along_cols) or row of part i
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    offsets.push_back(offset);
    const std::size_t pr = rows_of(p.shape()), pc = cols_of(p.shape());
    auto v = p.values();
    for (std::size_t r = 0; r < pr; ++r) {
      for (std::size_t c = 0; c < pc; ++c) {
        const std::size_t orow = along_cols ? r : offset + r;
        const std::size_t ocol = along_cols ? offset + c : c;
        out[orow * cols + ocol] = v[r * pc + c];
      }
    }
    offset += along_cols ? pc : pr;
  }
  Shape shape = rank == 1 ? Shape{cols} : Shape{rows, cols};
  return Tensor::MakeOp(
      "concat", std::move(shape), std::move(out), parts,
      [offsets, along_cols, cols, rank](Node& self) {
        for (std::size_t i = 0; i < self.parents.size(); ++i) {
          auto* gp = GradOf(self, i);
          if (!gp) continue;
          const Shape& ps = self.parents[i]->shape;
          const std::size_t pr = rank == 1 ? 1 : ps[0];
          const std::size_t pc = rank == 1 ? ps[0] : ps[1];
          for (std::size_t r = 0; r < pr; ++r) {
            for (std::size_t c = 0; c < pc; ++c) {
              const std::size_t orow = along_cols ? r : offsets[i] + r;
              const std::size_t ocol = along_cols ? offsets[i] + c : c;
              (*gp)[r * pc + c] += self.grad[orow * cols + ocol];
            }
          }
        }
      });
}

Tensor Reshape(const Tensor& a, Shape shape) {
  if (NumElements(shape) != a.numel()) ThrowShape("reshape", a.shape(), shape);
  std::vector<double> out(a.values().begin(), a.values().end());
  return Tensor::MakeOp("reshape", std::move(shape), std::move(out), {a},
                        [](Node& self) {
                          if (auto* ga = GradOf(self, 0)) {
                            for (std::size_t i = 0; i < self.grad.size(); ++i) {
                              (*ga)[i] += self.grad[i];
                            }
                          }
                        });
}

Tensor StackRows(const std::vector<Tensor>& rows) {
  std::vector<Tensor> as_rows;
  as_rows.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.rank() != 1) ThrowShape("stack_rows", r.shape());
    as_rows.push_back(Reshape(r, {1, r.dim(0)}));
  }
  return Concat(as_rows, 0);
}

Tensor Row(const Tensor& matrix, std::size_t index) {
  if (matrix.rank() != 2 || index >= matrix.dim(0)) ThrowShape("row", matrix.shape());
  const std::size_t cols = matrix.dim(1);
  auto v = matrix.values();
  std::vector<double> out(v.begin() + index * cols, v.begin() + (index + 1) * cols);
  return Tensor::MakeOp("row", {cols}, std::move(out), {matrix},
                        [index, cols](Node& self) {
                          if (auto* ga = GradOf(self, 0)) {
                            for (std::size_t c = 0; c < cols; ++c) {
                              (*ga)[index * cols + c] += self.grad[c];
                            }
                          }
                        });
}

Tensor GatherRows(const Tensor& table, std::span<const std::int32_t> ids) {
  if (table.rank() != 2) ThrowShape("gather_rows", table.shape());
  const std::size_t rows = table.dim(0), cols = table.dim(1);
  std::vector<std::int32_t> idx(ids.begin(), ids.end());
  std::vector<double> out(idx.size() * cols);
  auto v = table.values();
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || static_cast<std::size_t>(idx[r]) >= rows) {
      throw Error(ErrorCode::kShapeMismatch,
                  "gather_rows: id " + std::to_string(idx[r]) +
                      " out of range for table " + ShapeToString(table.shape()));
    }
    std::copy_n(v.begin() + idx[r] * cols, cols, out.begin() + r * cols);
  }
  Shape shape{idx.size(), cols};
  return Tensor::MakeOp("gather_rows", std::move(shape), std::move(out), {table},
                        [idx = std::move(idx), cols](Node& self) {
                          auto* ga = GradOf(self, 0);
                          if (!ga) return;
                          for (std::size_t r = 0; r < idx.size(); ++r) {
                            double* dst = ga->data() + idx[r] * cols;
                            const double* src = self.grad.data() + r * cols;
                            for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
                          }
                        });
}

Tensor Sigmoid(const Tensor& a) {
  return Unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Tanh(const Tensor& a) {
  return Unary(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor Relu(const Tensor& a) {
  return Unary(
      "relu", a, [](double x) { return x > 0 ? x : 0.0; },
      [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor Softmax(const Tensor& a) {
  if (a.rank() != 1 && a.rank() != 2) ThrowShape("softmax", a.shape());
  const std::size_t cols = a.shape().back();
  const std::size_t rows = a.numel() / cols;
  auto in = a.values();
  std::vector<double> out(a.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = in.data() + r * cols;
    double* y = out.data() + r * cols;
    const double mx = *std::max_element(x, x + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += (y[c] = std::exp(x[c] - mx));
    for (std::size_t c = 0; c < cols; ++c) y[c] /= total;
  }
  return Tensor::MakeOp("softmax", a.shape(), std::move(out), {a},
                        [rows, cols](Node& self) {
                          auto* ga = GradOf(self, 0);
                          if (!ga) return;
                          for (std::size_t r = 0; r < rows; ++r) {
                            const double* y = self.value.data() + r * cols;
                            const double* g = self.grad.data() + r * cols;
                            double dot = 0.0;
                            for (std::size_t c = 0; c < cols; ++c) dot += g[c] * y[c];
                            for (std::size_t c = 0; c < cols; ++c) {
                              (*ga)[r * cols + c] += y[c] * (g[c] - dot);
                            }
                          }
                        });
}

Tensor Dropout(const Tensor& a, double p, bool training, std::mt19937_64& rng) {
  if (p < 0.0 || p >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "dropout: probability must be in [0, 1), got " + std::to_string(p));
  }
  if (!training || p == 0.0) return a;
  std::bernoulli_distribution keep(1.0 - p);
  const double scale = 1.0 / (1.0 - p);
  std::vector<double> mask(a.numel());
  for (auto& m : mask) m = keep(rng) ? scale : 0.0;
  std::vector<double> out(a.numel());
  auto in = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[i] * mask[i];
  return Tensor::MakeOp("dropout", a.shape(), std::move(out), {a},
                        [mask = std::move(mask)](Node& self) {
                          if (auto* ga = GradOf(self, 0)) {
                            for (std::size_t i = 0; i < mask.size(); ++i) {
                              (*ga)[i] += self.grad[i] * mask[i];
                            }
                          }
                        });
}

Tensor Sum(const Tensor& a) {
  double total = 0.0;
  for (double x : a.values()) total += x;
  return Tensor::MakeOp("sum", {}, {total}, {a}, [](Node& self) {
    if (auto* ga = GradOf(self, 0)) {
      for (auto& g : *ga) g += self.grad[0];
    }
  });
}

Tensor Log(const Tensor& a) {
  return Unary(
      "log", a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor Clamp(const Tensor& a, double lo, double hi) {
  return Unary(
      "clamp", a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Tensor FrobeniusNorm(const Tensor& a) {
  double sq = 0.0;
  for (double x : a.values()) sq += x * x;
  const double norm = std::sqrt(sq);
  return Tensor::MakeOp("frobenius_norm", {}, {norm}, {a}, [](Node& self) {
    auto* ga = GradOf(self, 0);
    const double norm = self.value[0];
    if (!ga || norm == 0.0) return;
    const auto& x = self.parents[0]->value;
    const double g = self.grad[0] / norm;
    for (std::size_t i = 0; i < x.size(); ++i) (*ga)[i] += g * x[i];
  });
}

Tensor Transpose(const Tensor& a) {
  if (a.rank() != 2) ThrowShape("transpose", a.shape());
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  auto in = a.values();
  std::vector<double> out(a.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[c * rows + r] = in[r * cols + c];
  }
  return Tensor::MakeOp("transpose", {cols, rows}, std::move(out), {a},
                        [rows, cols](Node& self) {
                          auto* ga = GradOf(self, 0);
                          if (!ga) return;
                          for (std::size_t r = 0; r < rows; ++r) {
                            for (std::size_t c = 0; c < cols; ++c) {
                              (*ga)[r * cols + c] += self.grad[c * rows + r];
                            }
                          }
                        });
}

Tensor Outer(const Tensor& a, const Tensor& b) {
  if (a.rank() != 1 || b.rank() != 1) ThrowShape("outer", a.shape(), b.shape());
  const std::size_t m = a.dim(0), n = b.dim(0);
  auto av = a.values();
  auto bv = b.values();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = av[i] * bv[j];
  }
  return Tensor::MakeOp("outer", {m, n}, std::move(out), {a, b},
                        [m, n](Node& self) {
                          auto* ga = GradOf(self, 0);
                          auto* gb = GradOf(self, 1);
                          const auto& av = self.parents[0]->value;
                          const auto& bv = self.parents[1]->value;
                          for (std::size_t i = 0; i < m; ++i) {
                            for (std::size_t j = 0; j < n; ++j) {
                              const double g = self.grad[i * n + j];
                              if (ga) (*ga)[i] += g * bv[j];
                              if (gb) (*gb)[j] += g * av[i];
                            }
                          }
                        });
}

}  // namespace channelsum::ad

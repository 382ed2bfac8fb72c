#include "adalogn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adalogn::ops {

namespace {

using detail::TensorNode;
using NodePtr = std::shared_ptr<TensorNode>;

Tensor make(const char* op, Shape shape, std::vector<double> value,
            const std::vector<const Tensor*>& inputs,
            std::function<void(TensorNode&)> backward) {
  for (double v : value) {
    if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite value");
  }
  auto n = std::make_shared<TensorNode>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  for (const Tensor* t : inputs) {
    if (t->defined() && t->requires_grad()) n->requires_grad = true;
  }
  if (n->requires_grad) {
    for (const Tensor* t : inputs) {
      if (t->defined()) n->parents.push_back(t->node());
    }
    n->backward = std::move(backward);
  }
  return Tensor(std::move(n));
}

// Gradient buffer of a parent, or nullptr when it takes no gradient.
std::vector<double>* sink(const NodePtr& p) {
  return p && p->requires_grad ? &p->grad_buffer() : nullptr;
}

void require(bool ok, const char* op, const std::string& what) {
  if (!ok) throw ShapeError(std::string(op) + ": " + what);
}

void require_vector(const Tensor& x, const char* op) {
  require(x.defined() && x.rank() == 1, op,
          "expected a vector, got " + (x.defined() ? to_string(x.shape()) : "undefined"));
}

void require_matrix(const Tensor& x, const char* op) {
  require(x.defined() && x.rank() == 2, op,
          "expected a matrix, got " + (x.defined() ? to_string(x.shape()) : "undefined"));
}

void require_same(const Tensor& a, const Tensor& b, const char* op) {
  require(a.shape() == b.shape(), op,
          "shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
}

template <class F, class D>
Tensor unary(const char* op, const Tensor& x, F f, D dfdx) {
  std::vector<double> v(x.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(x[i]);
  NodePtr xn = x.node();
  return make(op, x.shape(), std::move(v), {&x}, [xn, dfdx](TensorNode& self) {
    auto* gx = sink(xn);
    if (!gx) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      (*gx)[i] += self.grad[i] * dfdx(xn->value[i], self.value[i]);
    }
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same(a, b, "add");
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  NodePtr an = a.node(), bn = b.node();
  return make("add", a.shape(), std::move(v), {&a, &b}, [an, bn](TensorNode& self) {
    for (auto* g : {sink(an), sink(bn)}) {
      if (!g) continue;
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*g)[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same(a, b, "sub");
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  NodePtr an = a.node(), bn = b.node();
  return make("sub", a.shape(), std::move(v), {&a, &b}, [an, bn](TensorNode& self) {
    if (auto* g = sink(an)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*g)[i] += self.grad[i];
    }
    if (auto* g = sink(bn)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*g)[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same(a, b, "mul");
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
  NodePtr an = a.node(), bn = b.node();
  return make("mul", a.shape(), std::move(v), {&a, &b}, [an, bn](TensorNode& self) {
    if (auto* g = sink(an)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*g)[i] += self.grad[i] * bn->value[i];
    }
    if (auto* g = sink(bn)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*g)[i] += self.grad[i] * an->value[i];
    }
  });
}

Tensor scale(const Tensor& a, double k) {
  return unary("scale", a, [k](double x) { return k * x; },
               [k](double, double) { return k; });
}

Tensor mul_scalar(const Tensor& a, const Tensor& s) {
  require(s.defined() && s.numel() == 1, "mul_scalar", "scale factor must have one element");
  const double k = s[0];
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * k;
  NodePtr an = a.node(), sn = s.node();
  return make("mul_scalar", a.shape(), std::move(v), {&a, &s}, [an, sn](TensorNode& self) {
    if (auto* g = sink(an)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*g)[i] += self.grad[i] * sn->value[0];
    }
    if (auto* g = sink(sn)) {
      double acc = 0.0;
      for (std::size_t i = 0; i < self.grad.size(); ++i) acc += self.grad[i] * an->value[i];
      (*g)[0] += acc;
    }
  });
}

Tensor matvec(const Tensor& w, const Tensor& x) {
  require_matrix(w, "matvec");
  require_vector(x, "matvec");
  const std::size_t m = w.dim(0), n = w.dim(1);
  require(x.dim(0) == n, "matvec",
          "matrix " + to_string(w.shape()) + " vs vector " + to_string(x.shape()));
  std::vector<double> v(m, 0.0);
  const auto wd = w.data();
  const auto xd = x.data();
  for (std::size_t r = 0; r < m; ++r) {
    double acc = 0.0;
    const double* wr = wd.data() + r * n;
    for (std::size_t c = 0; c < n; ++c) acc += wr[c] * xd[c];
    v[r] = acc;
  }
  NodePtr wn = w.node(), xn = x.node();
  return make("matvec", {m}, std::move(v), {&w, &x}, [wn, xn, m, n](TensorNode& self) {
    if (auto* g = sink(wn)) {
      for (std::size_t r = 0; r < m; ++r) {
        const double gr = self.grad[r];
        if (gr == 0.0) continue;
        double* out = g->data() + r * n;
        for (std::size_t c = 0; c < n; ++c) out[c] += gr * xn->value[c];
      }
    }
    if (auto* g = sink(xn)) {
      for (std::size_t r = 0; r < m; ++r) {
        const double gr = self.grad[r];
        if (gr == 0.0) continue;
        const double* wr = wn->value.data() + r * n;
        for (std::size_t c = 0; c < n; ++c) (*g)[c] += gr * wr[c];
      }
    }
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  require(b.dim(0) == k, "matmul", to_string(a.shape()) + " x " + to_string(b.shape()));
  std::vector<double> v(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < k; ++t) {
      const double av = a[i * k + t];
      for (std::size_t j = 0; j < n; ++j) v[i * n + j] += av * b[t * n + j];
    }
  }
  NodePtr an = a.node(), bn = b.node();
  return make("matmul", {m, n}, std::move(v), {&a, &b}, [an, bn, m, k, n](TensorNode& self) {
    if (auto* g = sink(an)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < k; ++t) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += self.grad[i * n + j] * bn->value[t * n + j];
          (*g)[i * k + t] += acc;
        }
    }
    if (auto* g = sink(bn)) {
      for (std::size_t t = 0; t < k; ++t)
        for (std::size_t j = 0; j < n; ++j) {
          double acc = 0.0;
          for (std::size_t i = 0; i < m; ++i) acc += an->value[i * k + t] * self.grad[i * n + j];
          (*g)[t * n + j] += acc;
        }
    }
  });
}

Tensor linear(const Tensor& w, const Tensor& b, const Tensor& x) {
  Tensor y = matvec(w, x);
  if (!b.defined()) return y;
  return add(y, b);
}

Tensor concat(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat", "no inputs");
  std::vector<double> v;
  std::vector<const Tensor*> in;
  std::vector<NodePtr> nodes;
  for (const Tensor& p : parts) {
    require(p.defined(), "concat", "undefined input");
    v.insert(v.end(), p.data().begin(), p.data().end());
    in.push_back(&p);
    nodes.push_back(p.node());
  }
  const std::size_t total = v.size();
  return make("concat", {total}, std::move(v), in, [nodes](TensorNode& self) {
    std::size_t off = 0;
    for (const NodePtr& p : nodes) {
      const std::size_t len = p->value.size();
      if (auto* g = sink(p)) {
        for (std::size_t i = 0; i < len; ++i) (*g)[i] += self.grad[off + i];
      }
      off += len;
    }
  });
}

Tensor slice(const Tensor& x, std::size_t begin, std::size_t len) {
  require_vector(x, "slice");
  require(begin + len <= x.dim(0), "slice", "range out of bounds");
  std::vector<double> v(x.data().begin() + static_cast<std::ptrdiff_t>(begin),
                        x.data().begin() + static_cast<std::ptrdiff_t>(begin + len));
  NodePtr xn = x.node();
  return make("slice", {len}, std::move(v), {&x}, [xn, begin, len](TensorNode& self) {
    if (auto* g = sink(xn)) {
      for (std::size_t i = 0; i < len; ++i) (*g)[begin + i] += self.grad[i];
    }
  });
}

Tensor stack(const std::vector<Tensor>& rows) {
  require(!rows.empty(), "stack", "no inputs");
  const std::size_t d = rows.front().numel();
  std::vector<double> v;
  v.reserve(rows.size() * d);
  std::vector<const Tensor*> in;
  std::vector<NodePtr> nodes;
  for (const Tensor& r : rows) {
    require_vector(r, "stack");
    require(r.dim(0) == d, "stack", "rows differ in length");
    v.insert(v.end(), r.data().begin(), r.data().end());
    in.push_back(&r);
    nodes.push_back(r.node());
  }
  return make("stack", {rows.size(), d}, std::move(v), in, [nodes, d](TensorNode& self) {
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      if (auto* g = sink(nodes[r])) {
        for (std::size_t i = 0; i < d; ++i) (*g)[i] += self.grad[r * d + i];
      }
    }
  });
}

Tensor index_select(const Tensor& m, const std::vector<std::size_t>& rows) {
  require_matrix(m, "index_select");
  const std::size_t n = m.dim(0), d = m.dim(1);
  std::vector<double> v;
  v.reserve(rows.size() * d);
  for (std::size_t r : rows) {
    require(r < n, "index_select", "row " + std::to_string(r) + " out of range");
    v.insert(v.end(), m.data().begin() + static_cast<std::ptrdiff_t>(r * d),
             m.data().begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
  }
  NodePtr mn = m.node();
  return make("index_select", {rows.size(), d}, std::move(v), {&m},
              [mn, rows, d](TensorNode& self) {
                if (auto* g = sink(mn)) {
                  for (std::size_t k = 0; k < rows.size(); ++k)
                    for (std::size_t i = 0; i < d; ++i) (*g)[rows[k] * d + i] += self.grad[k * d + i];
                }
              });
}

Tensor row(const Tensor& m, std::size_t i) {
  require_matrix(m, "row");
  const std::size_t n = m.dim(0), d = m.dim(1);
  require(i < n, "row", "row " + std::to_string(i) + " out of range");
  std::vector<double> v(m.data().begin() + static_cast<std::ptrdiff_t>(i * d),
                        m.data().begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
  NodePtr mn = m.node();
  return make("row", {d}, std::move(v), {&m}, [mn, i, d](TensorNode& self) {
    if (auto* g = sink(mn)) {
      for (std::size_t k = 0; k < d; ++k) (*g)[i * d + k] += self.grad[k];
    }
  });
}

Tensor select(const Tensor& x, std::size_t i) {
  require(i < x.numel(), "select", "index " + std::to_string(i) + " out of range");
  NodePtr xn = x.node();
  return make("select", {}, {x[i]}, {&x}, [xn, i](TensorNode& self) {
    if (auto* g = sink(xn)) (*g)[i] += self.grad[0];
  });
}

Tensor take(const Tensor& x, const std::vector<std::size_t>& idx) {
  require_vector(x, "take");
  std::vector<double> v;
  v.reserve(idx.size());
  for (std::size_t i : idx) {
    require(i < x.numel(), "take", "index " + std::to_string(i) + " out of range");
    v.push_back(x[i]);
  }
  NodePtr xn = x.node();
  return make("take", {idx.size()}, std::move(v), {&x}, [xn, idx](TensorNode& self) {
    if (auto* g = sink(xn)) {
      for (std::size_t k = 0; k < idx.size(); ++k) (*g)[idx[k]] += self.grad[k];
    }
  });
}

Tensor transpose(const Tensor& m) {
  require_matrix(m, "transpose");
  const std::size_t r = m.dim(0), c = m.dim(1);
  std::vector<double> v(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) v[j * r + i] = m[i * c + j];
  NodePtr mn = m.node();
  return make("transpose", {c, r}, std::move(v), {&m}, [mn, r, c](TensorNode& self) {
    if (auto* g = sink(mn)) {
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) (*g)[i * c + j] += self.grad[j * r + i];
    }
  });
}

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  NodePtr xn = x.node();
  return make("sum", {}, {acc}, {&x}, [xn](TensorNode& self) {
    if (auto* g = sink(xn)) {
      for (double& v : *g) v += self.grad[0];
    }
  });
}

Tensor mean(const Tensor& x) {
  require(x.numel() > 0, "mean", "empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.numel()));
}

Tensor mean(const std::vector<Tensor>& xs) {
  require(!xs.empty(), "mean", "no inputs");
  std::vector<double> v(xs.front().numel(), 0.0);
  std::vector<const Tensor*> in;
  std::vector<NodePtr> nodes;
  const double inv = 1.0 / static_cast<double>(xs.size());
  for (const Tensor& x : xs) {
    require_same(x, xs.front(), "mean");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += x[i];
    in.push_back(&x);
    nodes.push_back(x.node());
  }
  for (double& e : v) e *= inv;
  return make("mean", xs.front().shape(), std::move(v), in, [nodes, inv](TensorNode& self) {
    for (const NodePtr& p : nodes) {
      if (auto* g = sink(p)) {
        for (std::size_t i = 0; i < self.grad.size(); ++i) (*g)[i] += inv * self.grad[i];
      }
    }
  });
}

Tensor weighted_sum(const Tensor& w, const std::vector<Tensor>& xs) {
  require_vector(w, "weighted_sum");
  require(!xs.empty() && w.dim(0) == xs.size(), "weighted_sum",
          "weight count does not match inputs");
  std::vector<double> v(xs.front().numel(), 0.0);
  std::vector<const Tensor*> in{&w};
  std::vector<NodePtr> nodes;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    require_same(xs[k], xs.front(), "weighted_sum");
    const double wk = w[k];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += wk * xs[k][i];
    in.push_back(&xs[k]);
    nodes.push_back(xs[k].node());
  }
  NodePtr wn = w.node();
  return make("weighted_sum", xs.front().shape(), std::move(v), in,
              [wn, nodes](TensorNode& self) {
                auto* gw = sink(wn);
                for (std::size_t k = 0; k < nodes.size(); ++k) {
                  const auto& xv = nodes[k]->value;
                  if (gw) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < xv.size(); ++i) acc += self.grad[i] * xv[i];
                    (*gw)[k] += acc;
                  }
                  if (auto* g = sink(nodes[k])) {
                    const double wk = wn->value[k];
                    for (std::size_t i = 0; i < xv.size(); ++i) (*g)[i] += wk * self.grad[i];
                  }
                }
              });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      "sigmoid", x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& x) {
  return unary("tanh", x, [](double v) { return std::tanh(v); },
               [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& x) {
  return unary("relu", x, [](double v) { return v > 0 ? v : 0.0; },
               [](double v, double) { return v > 0 ? 1.0 : 0.0; });
}

Tensor leaky_relu(const Tensor& x, double slope) {
  return unary("leaky_relu", x, [slope](double v) { return v > 0 ? v : slope * v; },
               [slope](double v, double) { return v > 0 ? 1.0 : slope; });
}

namespace {

// Rows of length `n` for a vector (one row) or matrix.
std::pair<std::size_t, std::size_t> softmax_layout(const Tensor& x, const char* op) {
  require(x.defined() && (x.rank() == 1 || x.rank() == 2), op,
          "expected a vector or matrix");
  const std::size_t n = x.shape().back();
  require(n > 0, op, "empty softmax axis");
  return {x.numel() / n, n};
}

}  // namespace

Tensor softmax(const Tensor& x) {
  const auto [rows, n] = softmax_layout(x, "softmax");
  std::vector<double> v(x.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = x.data().data() + r * n;
    const double mx = *std::max_element(in, in + n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += (v[r * n + i] = std::exp(in[i] - mx));
    for (std::size_t i = 0; i < n; ++i) v[r * n + i] /= z;
  }
  NodePtr xn = x.node();
  return make("softmax", x.shape(), std::move(v), {&x}, [xn, rows = rows, n = n](TensorNode& self) {
    auto* g = sink(xn);
    if (!g) return;
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += self.grad[r * n + i] * self.value[r * n + i];
      for (std::size_t i = 0; i < n; ++i) {
        (*g)[r * n + i] += self.value[r * n + i] * (self.grad[r * n + i] - dot);
      }
    }
  });
}

Tensor log_softmax(const Tensor& x) {
  const auto [rows, n] = softmax_layout(x, "log_softmax");
  std::vector<double> v(x.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = x.data().data() + r * n;
    const double mx = *std::max_element(in, in + n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += std::exp(in[i] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t i = 0; i < n; ++i) v[r * n + i] = in[i] - lse;
  }
  NodePtr xn = x.node();
  return make("log_softmax", x.shape(), std::move(v), {&x},
              [xn, rows = rows, n = n](TensorNode& self) {
                auto* g = sink(xn);
                if (!g) return;
                for (std::size_t r = 0; r < rows; ++r) {
                  double total = 0.0;
                  for (std::size_t i = 0; i < n; ++i) total += self.grad[r * n + i];
                  for (std::size_t i = 0; i < n; ++i) {
                    (*g)[r * n + i] +=
                        self.grad[r * n + i] - std::exp(self.value[r * n + i]) * total;
                  }
                }
              });
}

Tensor gru_cell(const Tensor& x, const Tensor& h, const GruWeights& w) {
  const Tensor r = sigmoid(add(linear(w.w_xr, w.b_xr, x), linear(w.w_hr, w.b_hr, h)));
  const Tensor z = sigmoid(add(linear(w.w_xz, w.b_xz, x), linear(w.w_hz, w.b_hz, h)));
  const Tensor n = tanh(add(linear(w.w_xn, w.b_xn, x), mul(r, linear(w.w_hn, w.b_hn, h))));
  // (1 - z) * n + z * h  ==  n + z * (h - n)
  return add(n, mul(z, sub(h, n)));
}

}  // namespace adalogn::ops

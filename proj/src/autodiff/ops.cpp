// Copyright 2026 The STT Tracking Authors. All Rights Reserved.
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

#include "stt/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace stt::ad {
namespace {

thread_local bool g_grad_enabled = true;

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                   b.shape_string());
}

Var make_result(Tensor value, std::initializer_list<const Var*> inputs,
                std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (g_grad_enabled) {
    bool needs = false;
    for (const Var* in : inputs) needs = needs || in->requires_grad();
    if (needs) {
      node->requires_grad = true;
      for (const Var* in : inputs) node->inputs.push_back(in->node());
      node->backward = std::move(backward);
    }
  }
  return Var(std::move(node));
}

Var make_result(Tensor value, const std::vector<Var>& inputs, std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (g_grad_enabled) {
    bool needs = false;
    for (const Var& in : inputs) needs = needs || in.requires_grad();
    if (needs) {
      node->requires_grad = true;
      for (const Var& in : inputs) node->inputs.push_back(in.node());
      node->backward = std::move(backward);
    }
  }
  return Var(std::move(node));
}

std::size_t broadcast_dim(std::size_t x, std::size_t y, const char* op, const Tensor& a,
                          const Tensor& b) {
  if (x == y) return x;
  if (x == 1) return y;
  if (y == 1) return x;
  shape_fail(op, a, b);
}

inline std::size_t bindex(const Tensor& t, std::size_t r, std::size_t c) {
  return (t.rows() == 1 ? 0 : r) * t.cols() + (t.cols() == 1 ? 0 : c);
}

// Shared driver for broadcasting binary elementwise ops. `fwd` maps (x, y) to
// the output; `dx`/`dy` give the local partials.
template <typename Fwd, typename Dx, typename Dy>
Var binary(const char* name, const Var& a, const Var& b, Fwd fwd, Dx dx, Dy dy) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const std::size_t rows = broadcast_dim(av.rows(), bv.rows(), name, av, bv);
  const std::size_t cols = broadcast_dim(av.cols(), bv.cols(), name, av, bv);
  Tensor out(rows, cols);
  if (av.same_shape(bv)) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i], bv[i]);
  } else {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        out(r, c) = fwd(av[bindex(av, r, c)], bv[bindex(bv, r, c)]);
      }
    }
  }
  return make_result(std::move(out), {&a, &b}, [rows, cols, dx, dy](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    const Tensor& x = na.value;
    const Tensor& y = nb.value;
    const Tensor& g = self.grad;
    Tensor* ga = na.requires_grad ? &na.ensure_grad() : nullptr;
    Tensor* gb = nb.requires_grad ? &nb.ensure_grad() : nullptr;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t ia = bindex(x, r, c);
        const std::size_t ib = bindex(y, r, c);
        const double go = g(r, c);
        if (ga) (*ga)[ia] += go * dx(x[ia], y[ib]);
        if (gb) (*gb)[ib] += go * dy(x[ia], y[ib]);
      }
    }
  });
}

template <typename Fwd, typename Deriv>
Var unary(const Var& a, Fwd fwd, Deriv deriv) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = fwd(av[i]);
  return make_result(std::move(out), {&a}, [deriv](Node& self) {
    Node& na = *self.inputs[0];
    Tensor& ga = na.ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      ga[i] += self.grad[i] * deriv(na.value[i], self.value[i]);
    }
  });
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_axis(int axis) {
  if (axis != 0 && axis != 1) throw ShapeError("axis must be 0 or 1, got " + std::to_string(axis));
}

// Addressing of the 1-D lines a reduction along `axis` runs over.
struct Lines {
  std::size_t count;
  std::size_t length;
  std::size_t stride;
  std::size_t line_step;
};

Lines lines_of(const Tensor& t, int axis) {
  if (axis == 1) return {t.rows(), t.cols(), 1, t.cols()};
  return {t.cols(), t.rows(), t.cols(), 1};
}

}  // namespace

Tensor& Node::ensure_grad() {
  if (!grad.same_shape(value)) grad = Tensor(value.rows(), value.cols());
  return grad;
}

Var::Var(Tensor value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

double Var::item() const {
  if (value().size() != 1) throw ShapeError("item() needs a [1, 1] tensor, got " + value().shape_string());
  return value()[0];
}

void Var::backward() const {
  if (!node_ || !node_->requires_grad) return;
  // Iterative post-order DFS for a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (Node* n : order) {
    if (n->backward) {
      n->ensure_grad();
      n->grad.fill(0.0);
    }
  }
  node_->ensure_grad();
  node_->grad.fill(1.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) (*it)->backward(**it);
  }
}

void Var::zero_grad() {
  if (node_) node_->grad = Tensor(node_->value.rows(), node_->value.cols());
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

Var matmul(const Var& a, const Var& b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) shape_fail("matmul", av, bv);
  const std::size_t n = av.rows(), k = av.cols(), m = bv.cols();
  Tensor out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = &out(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av(i, p);
      const double* brow = bv.data().data() + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  }
  return make_result(std::move(out), {&a, &b}, [n, k, m](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    const Tensor& g = self.grad;
    if (na.requires_grad) {
      Tensor& ga = na.ensure_grad();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          const double* grow = g.data().data() + i * m;
          const double* brow = nb.value.data().data() + p * m;
          for (std::size_t j = 0; j < m; ++j) acc += grow[j] * brow[j];
          ga(i, p) += acc;
        }
      }
    }
    if (nb.requires_grad) {
      Tensor& gb = nb.ensure_grad();
      for (std::size_t i = 0; i < n; ++i) {
        const double* grow = g.data().data() + i * m;
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = na.value(i, p);
          double* gbrow = gb.data().data() + p * m;
          for (std::size_t j = 0; j < m; ++j) gbrow[j] += aip * grow[j];
        }
      }
    }
  });
}

Var transpose(const Var& a) {
  const Tensor& av = a.value();
  Tensor out(av.cols(), av.rows());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    for (std::size_t c = 0; c < av.cols(); ++c) out(c, r) = av(r, c);
  }
  return make_result(std::move(out), {&a}, [](Node& self) {
    Tensor& ga = self.inputs[0]->ensure_grad();
    for (std::size_t r = 0; r < ga.rows(); ++r) {
      for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) += self.grad(c, r);
    }
  });
}

Var add(const Var& a, const Var& b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Var sub(const Var& a, const Var& b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Var mul(const Var& a, const Var& b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Var scale(const Var& a, double factor) {
  return unary(
      a, [factor](double x) { return x * factor; }, [factor](double, double) { return factor; });
}

Var concat(const std::vector<Var>& parts, int axis) {
  check_axis(axis);
  if (parts.empty()) throw ShapeError("concat: no operands");
  const Tensor& first = parts.front().value();
  std::size_t rows = first.rows(), cols = first.cols();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const Tensor& t = parts[i].value();
    if (axis == 0) {
      if (t.cols() != cols) shape_fail("concat(axis=0)", first, t);
      rows += t.rows();
    } else {
      if (t.rows() != rows) shape_fail("concat(axis=1)", first, t);
      cols += t.cols();
    }
  }
  Tensor out(rows, cols);
  std::size_t offset = 0;
  for (const Var& part : parts) {
    const Tensor& t = part.value();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      for (std::size_t c = 0; c < t.cols(); ++c) {
        if (axis == 0) out(offset + r, c) = t(r, c);
        else out(r, offset + c) = t(r, c);
      }
    }
    offset += axis == 0 ? t.rows() : t.cols();
  }
  return make_result(std::move(out), parts, [axis](Node& self) {
    std::size_t offset = 0;
    for (auto& in : self.inputs) {
      const std::size_t rows = in->value.rows(), cols = in->value.cols();
      if (in->requires_grad) {
        Tensor& g = in->ensure_grad();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) {
            g(r, c) += axis == 0 ? self.grad(offset + r, c) : self.grad(r, offset + c);
          }
        }
      }
      offset += axis == 0 ? rows : cols;
    }
  });
}

Var slice(const Var& a, int axis, std::size_t begin, std::size_t end) {
  check_axis(axis);
  const Tensor& av = a.value();
  const std::size_t extent = axis == 0 ? av.rows() : av.cols();
  if (begin > end || end > extent) {
    throw ShapeError("slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") out of range for " + av.shape_string());
  }
  const std::size_t rows = axis == 0 ? end - begin : av.rows();
  const std::size_t cols = axis == 1 ? end - begin : av.cols();
  Tensor out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out(r, c) = axis == 0 ? av(begin + r, c) : av(r, begin + c);
    }
  }
  return make_result(std::move(out), {&a}, [axis, begin, rows, cols](Node& self) {
    Tensor& g = self.inputs[0]->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (axis == 0) g(begin + r, c) += self.grad(r, c);
        else g(r, begin + c) += self.grad(r, c);
      }
    }
  });
}

Var sum(const Var& a, int axis) {
  check_axis(axis);
  const Tensor& av = a.value();
  Tensor out = axis == 0 ? Tensor(1, av.cols()) : Tensor(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    for (std::size_t c = 0; c < av.cols(); ++c) out[axis == 0 ? c : r] += av(r, c);
  }
  return make_result(std::move(out), {&a}, [axis](Node& self) {
    Tensor& g = self.inputs[0]->ensure_grad();
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) += self.grad[axis == 0 ? c : r];
    }
  });
}

Var mean(const Var& a, int axis) {
  check_axis(axis);
  const std::size_t n = axis == 0 ? a.rows() : a.cols();
  if (n == 0) throw ShapeError("mean over empty axis of " + a.value().shape_string());
  return scale(sum(a, axis), 1.0 / static_cast<double>(n));
}

Var sum_all(const Var& a) {
  const Tensor& av = a.value();
  double total = 0.0;
  for (double v : av.data()) total += v;
  return make_result(Tensor::scalar(total), {&a}, [](Node& self) {
    Tensor& g = self.inputs[0]->ensure_grad();
    const double go = self.grad[0];
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += go;
  });
}

Var relu(const Var& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(const Var& a) {
  return unary(a, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Var softplus(const Var& a) {
  return unary(
      a, [](double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); },
      [](double x, double) { return stable_sigmoid(x); });
}

Var abs(const Var& a) {
  return unary(
      a, [](double x) { return std::abs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var softmax(const Var& a, int axis, std::optional<Mask> mask) {
  check_axis(axis);
  const Tensor& av = a.value();
  const Lines lines = lines_of(av, axis);
  if (mask && mask->size() != lines.length) {
    throw ShapeError("softmax mask length " + std::to_string(mask->size()) +
                     " does not match axis extent of " + av.shape_string());
  }
  std::vector<std::uint8_t> live = mask ? std::vector<std::uint8_t>(mask->begin(), mask->end())
                                        : std::vector<std::uint8_t>(lines.length, 1);
  Tensor out(av.rows(), av.cols());
  for (std::size_t l = 0; l < lines.count; ++l) {
    const std::size_t base = l * lines.line_step;
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lines.length; ++i) {
      if (live[i]) hi = std::max(hi, av[base + i * lines.stride]);
    }
    if (hi == -std::numeric_limits<double>::infinity()) continue;  // nothing live
    double total = 0.0;
    for (std::size_t i = 0; i < lines.length; ++i) {
      if (!live[i]) continue;
      const double e = std::exp(av[base + i * lines.stride] - hi);
      out[base + i * lines.stride] = e;
      total += e;
    }
    for (std::size_t i = 0; i < lines.length; ++i) {
      if (live[i]) out[base + i * lines.stride] /= total;
    }
  }
  return make_result(std::move(out), {&a}, [lines](Node& self) {
    Tensor& g = self.inputs[0]->ensure_grad();
    const Tensor& y = self.value;
    for (std::size_t l = 0; l < lines.count; ++l) {
      const std::size_t base = l * lines.line_step;
      double dot = 0.0;
      for (std::size_t i = 0; i < lines.length; ++i) {
        const std::size_t idx = base + i * lines.stride;
        dot += y[idx] * self.grad[idx];
      }
      for (std::size_t i = 0; i < lines.length; ++i) {
        const std::size_t idx = base + i * lines.stride;
        g[idx] += y[idx] * (self.grad[idx] - dot);
      }
    }
  });
}

Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps) {
  const Tensor& xv = x.value();
  const std::size_t rows = xv.rows(), cols = xv.cols();
  if (gain.rows() != 1 || gain.cols() != cols) shape_fail("layer_norm(gain)", xv, gain.value());
  if (bias.rows() != 1 || bias.cols() != cols) shape_fail("layer_norm(bias)", xv, bias.value());
  Tensor out(rows, cols);
  auto xhat = std::make_shared<Tensor>(rows, cols);
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double mu = 0.0;
    for (std::size_t c = 0; c < cols; ++c) mu += xv(r, c);
    mu /= static_cast<double>(cols);
    double var = 0.0;
    for (std::size_t c = 0; c < cols; ++c) var += (xv(r, c) - mu) * (xv(r, c) - mu);
    var /= static_cast<double>(cols);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (std::size_t c = 0; c < cols; ++c) {
      (*xhat)(r, c) = (xv(r, c) - mu) * is;
      out(r, c) = gain.value()[c] * (*xhat)(r, c) + bias.value()[c];
    }
  }
  return make_result(std::move(out), {&x, &gain, &bias}, [rows, cols, xhat, inv_std](Node& self) {
    Node& nx = *self.inputs[0];
    Node& ng = *self.inputs[1];
    Node& nb = *self.inputs[2];
    const Tensor& g = self.grad;
    if (ng.requires_grad || nb.requires_grad) {
      Tensor& gg = ng.ensure_grad();
      Tensor& gb = nb.ensure_grad();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          gg[c] += g(r, c) * (*xhat)(r, c);
          gb[c] += g(r, c);
        }
      }
    }
    if (nx.requires_grad) {
      Tensor& gx = nx.ensure_grad();
      const double n = static_cast<double>(cols);
      for (std::size_t r = 0; r < rows; ++r) {
        double sum_d = 0.0, sum_dx = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
          const double d = g(r, c) * ng.value[c];
          sum_d += d;
          sum_dx += d * (*xhat)(r, c);
        }
        for (std::size_t c = 0; c < cols; ++c) {
          const double d = g(r, c) * ng.value[c];
          gx(r, c) += (*inv_std)[r] / n * (n * d - sum_d - (*xhat)(r, c) * sum_dx);
        }
      }
    }
  });
}

Var attention_weights(const Var& q, const Var& k, std::optional<Mask> key_mask) {
  if (q.cols() != k.cols()) shape_fail("attention(q, k)", q.value(), k.value());
  const double inv = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  return softmax(scale(matmul(q, transpose(k)), inv), 1, key_mask);
}

Var attention(const Var& q, const Var& k, const Var& v, std::optional<Mask> key_mask) {
  if (k.rows() != v.rows()) shape_fail("attention(k, v)", k.value(), v.value());
  return matmul(attention_weights(q, k, key_mask), v);
}

Var bce_with_logits(const Var& logits, const Tensor& targets) {
  if (!logits.value().same_shape(targets)) shape_fail("bce_with_logits", logits.value(), targets);
  return sub(softplus(logits), mul(logits, constant(targets)));
}

}  // namespace stt::ad

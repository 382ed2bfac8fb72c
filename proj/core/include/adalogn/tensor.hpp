#pragma once

// Dense float64 tensors with reverse-mode automatic differentiation.
//
// A Tensor is a shared handle to a node of the computation graph. Ops that
// read a tensor requiring gradients record a backward closure; backward() on
// a scalar walks the graph in reverse topological order. Every op output is
// checked for NaN/Inf.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adalogn/error.hpp"

namespace adalogn {

using Shape = std::vector<std::size_t>;

std::string to_string(const Shape& s);

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

namespace detail {

struct TensorNode {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward;

  std::vector<double>& grad_buffer() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor vector(std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  [[nodiscard]] bool defined() const { return node_ != nullptr; }
  [[nodiscard]] const Shape& shape() const { return node_->shape; }
  [[nodiscard]] std::size_t rank() const { return node_->shape.size(); }
  [[nodiscard]] std::size_t numel() const { return node_->value.size(); }
  [[nodiscard]] std::size_t dim(std::size_t i) const { return node_->shape.at(i); }

  [[nodiscard]] std::span<const double> data() const { return node_->value; }
  /// Direct write access, for parameter updates outside any recorded graph.
  [[nodiscard]] std::span<double> mutable_data() { return node_->value; }
  [[nodiscard]] double operator[](std::size_t i) const { return node_->value[i]; }
  /// Value of a one-element tensor.
  [[nodiscard]] double item() const;

  [[nodiscard]] bool requires_grad() const { return node_->requires_grad; }
  /// Accumulated gradient; all zeros when nothing has flowed back yet.
  [[nodiscard]] std::vector<double> grad() const;
  [[nodiscard]] bool has_grad() const { return !node_->grad.empty(); }
  void zero_grad() { node_->grad.clear(); }

  /// Reverse-mode sweep from this one-element tensor. Gradients of leaves
  /// accumulate across calls; intermediate gradients are recomputed.
  void backward() const;

  /// Same values, no history.
  [[nodiscard]] Tensor detach() const;

  [[nodiscard]] const std::shared_ptr<detail::TensorNode>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::TensorNode> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<detail::TensorNode> node_;
};

}  // namespace adalogn

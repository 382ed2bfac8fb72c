#pragma once

// Differentiable operations on Tensor. Vectors are rank 1, matrices rank 2
// (row-major), scalars rank 0 or any one-element tensor where noted.

#include <cstddef>
#include <vector>

#include "adalogn/tensor.hpp"

namespace adalogn::ops {

inline constexpr double kLeakySlope = 0.01;

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double k);
/// Every element of `a` times the one-element tensor `s`.
Tensor mul_scalar(const Tensor& a, const Tensor& s);

/// W[m,n] * x[n] -> [m]
Tensor matvec(const Tensor& w, const Tensor& x);
/// A[m,k] * B[k,n] -> [m,n]
Tensor matmul(const Tensor& a, const Tensor& b);
/// W x + b; `b` may be undefined.
Tensor linear(const Tensor& w, const Tensor& b, const Tensor& x);

/// Concatenation of the flattened inputs into one vector.
Tensor concat(const std::vector<Tensor>& parts);
/// Contiguous slice [begin, begin+len) of a vector.
Tensor slice(const Tensor& x, std::size_t begin, std::size_t len);
/// Stacks equal-length vectors into a [n, d] matrix.
Tensor stack(const std::vector<Tensor>& rows);
/// Row i of a matrix.
Tensor row(const Tensor& m, std::size_t i);
/// Rows of a matrix, in the given order (repeats allowed).
Tensor index_select(const Tensor& m, const std::vector<std::size_t>& rows);
/// Element i of a vector, as a scalar.
Tensor select(const Tensor& x, std::size_t i);
/// Elements of a vector at the given positions.
Tensor take(const Tensor& x, const std::vector<std::size_t>& idx);
/// Matrix transpose.
Tensor transpose(const Tensor& m);

/// Sum of all elements -> scalar.
Tensor sum(const Tensor& x);
/// Mean of all elements -> scalar.
Tensor mean(const Tensor& x);
/// Element-wise mean of equal-shaped tensors.
Tensor mean(const std::vector<Tensor>& xs);
/// sum_i w[i] * xs[i] for a weight vector w and equal-shaped xs.
Tensor weighted_sum(const Tensor& w, const std::vector<Tensor>& xs);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double slope = kLeakySlope);

/// Softmax over a vector, or over each row of a matrix.
Tensor softmax(const Tensor& x);
Tensor log_softmax(const Tensor& x);

struct GruWeights {
  Tensor w_xr, w_xz, w_xn;  // [h, in]
  Tensor w_hr, w_hz, w_hn;  // [h, h]
  Tensor b_xr, b_xz, b_xn;  // [h]
  Tensor b_hr, b_hz, b_hn;  // [h]
};

/// One GRU step:
///   r = sigmoid(W_xr x + b_xr + W_hr h + b_hr)
///   z = sigmoid(W_xz x + b_xz + W_hz h + b_hz)
///   n = tanh(W_xn x + b_xn + r * (W_hn h + b_hn))
///   h' = (1 - z) * n + z * h
Tensor gru_cell(const Tensor& x, const Tensor& h, const GruWeights& w);

}  // namespace adalogn::ops

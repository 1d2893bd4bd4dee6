#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "dmrl/nn/param_set.hpp"

namespace dmrl::nn {

template <typename T>
T sigmoid(T x) {
  return x >= T(0) ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

template <typename T>
Vec<T> sigmoid(const Vec<T>& x) {
  return x.unaryExpr([](T v) { return sigmoid(v); });
}

// log(1 + exp(x)) without overflow.
template <typename T>
T softplus(T x) {
  return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x)));
}

template <typename T>
Vec<T> softmax(const Vec<T>& z) {
  Vec<T> e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

// y = W x + b
template <typename T>
Vec<T> affine(const Mat<T>& weights, const Mat<T>& bias, const Vec<T>& x) {
  if (weights.cols() != x.size() || bias.rows() != weights.rows() || bias.cols() != 1) {
    throw ShapeError("affine: W is " + std::to_string(weights.rows()) + "x" +
                     std::to_string(weights.cols()) + ", x has " + std::to_string(x.size()));
  }
  return weights * x + bias.col(0);
}

// Accumulates gradients of an affine layer for upstream gradient dy and
// returns dL/dx.
template <typename T>
Vec<T> affine_backward(const Mat<T>& weights, const Vec<T>& x, const Vec<T>& dy,
                       Mat<T>& d_weights, Mat<T>& d_bias) {
  d_weights.noalias() += dy * x.transpose();
  d_bias.col(0) += dy;
  return weights.transpose() * dy;
}

// Stacked LSTM gate parameters. Rows are grouped per gate in the order
// input, forget, candidate, output; each block is H rows.
template <typename T>
struct LstmRef {
  const Mat<T>& wx;  // 4H x D
  const Mat<T>& wh;  // 4H x H
  const Mat<T>& b;   // 4H x 1
};

template <typename T>
struct LstmCache {
  Vec<T> x, h_prev, c_prev;
  Vec<T> i, f, g, o, c, tanh_c;
};

template <typename T>
void lstm_step(const LstmRef<T>& cell, const Vec<T>& x, const Vec<T>& h, const Vec<T>& c,
               Vec<T>& h_out, Vec<T>& c_out, LstmCache<T>* cache = nullptr) {
  const auto H = h.size();
  if (cell.wx.rows() != 4 * H || cell.wh.rows() != 4 * H || cell.wh.cols() != H ||
      cell.wx.cols() != x.size() || c.size() != H || cell.b.rows() != 4 * H) {
    throw ShapeError("lstm_step: input " + std::to_string(x.size()) + ", hidden " +
                     std::to_string(H) + " do not match cell " +
                     std::to_string(cell.wx.rows()) + "x" + std::to_string(cell.wx.cols()));
  }
  Vec<T> z = cell.b.col(0);
  z.noalias() += cell.wx * x;
  z.noalias() += cell.wh * h;
  Vec<T> i = sigmoid<T>(z.segment(0, H));
  Vec<T> f = sigmoid<T>(z.segment(H, H));
  Vec<T> g = z.segment(2 * H, H).array().tanh();
  Vec<T> o = sigmoid<T>(z.segment(3 * H, H));
  c_out = f.cwiseProduct(c) + i.cwiseProduct(g);
  Vec<T> tc = c_out.array().tanh();
  h_out = o.cwiseProduct(tc);
  if (cache) {
    cache->x = x;
    cache->h_prev = h;
    cache->c_prev = c;
    cache->i = std::move(i);
    cache->f = std::move(f);
    cache->g = std::move(g);
    cache->o = std::move(o);
    cache->c = c_out;
    cache->tanh_c = std::move(tc);
  }
}

// Backward pass of one step. dh, dc are gradients w.r.t. the step outputs;
// dh_prev, dc_prev receive gradients w.r.t. the step inputs.
template <typename T>
void lstm_step_backward(const LstmRef<T>& cell, const LstmCache<T>& k, const Vec<T>& dh,
                        const Vec<T>& dc_in, Mat<T>& d_wx, Mat<T>& d_wh, Mat<T>& d_b,
                        Vec<T>& dh_prev, Vec<T>& dc_prev) {
  const auto H = dh.size();
  Vec<T> d_o = dh.cwiseProduct(k.tanh_c);
  Vec<T> dc = dc_in + dh.cwiseProduct(k.o).cwiseProduct(
                          (T(1) - k.tanh_c.array().square()).matrix());
  Vec<T> dz(4 * H);
  dz.segment(0, H) = dc.cwiseProduct(k.g).cwiseProduct(k.i.cwiseProduct((T(1) - k.i.array()).matrix()));
  dz.segment(H, H) = dc.cwiseProduct(k.c_prev).cwiseProduct(k.f.cwiseProduct((T(1) - k.f.array()).matrix()));
  dz.segment(2 * H, H) = dc.cwiseProduct(k.i).cwiseProduct((T(1) - k.g.array().square()).matrix());
  dz.segment(3 * H, H) = d_o.cwiseProduct(k.o.cwiseProduct((T(1) - k.o.array()).matrix()));
  d_wx.noalias() += dz * k.x.transpose();
  d_wh.noalias() += dz * k.h_prev.transpose();
  d_b.col(0) += dz;
  dh_prev = cell.wh.transpose() * dz;
  dc_prev = dc.cwiseProduct(k.f);
}

}  // namespace dmrl::nn

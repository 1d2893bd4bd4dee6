#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "dmrl/errors.hpp"

namespace dmrl::nn {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
struct Tensor {
  std::string name;
  Mat<T> value;
};

// Ordered, named collection of parameter (or gradient) tensors. Biases are
// stored as single-column matrices.
template <typename T>
class ParamSet {
 public:
  int add(std::string name, int rows, int cols) {
    if (find(name) >= 0) throw ShapeError("duplicate tensor '" + name + "'");
    tensors_.push_back({std::move(name), Mat<T>::Zero(rows, cols)});
    return static_cast<int>(tensors_.size()) - 1;
  }

  int find(const std::string& name) const {
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
      if (tensors_[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }

  Mat<T>& operator[](int i) { return tensors_.at(i).value; }
  const Mat<T>& operator[](int i) const { return tensors_.at(i).value; }
  const std::string& name(int i) const { return tensors_.at(i).name; }
  int size() const { return static_cast<int>(tensors_.size()); }
  std::vector<Tensor<T>>& tensors() { return tensors_; }
  const std::vector<Tensor<T>>& tensors() const { return tensors_; }

  ParamSet zeros_like() const {
    ParamSet out = *this;
    for (auto& t : out.tensors_) t.value.setZero();
    return out;
  }

  void set_zero() {
    for (auto& t : tensors_) t.value.setZero();
  }

  template <typename U>
  ParamSet<U> cast() const {
    ParamSet<U> out;
    for (const auto& t : tensors_) {
      int i = out.add(t.name, static_cast<int>(t.value.rows()), static_cast<int>(t.value.cols()));
      out[i] = t.value.template cast<U>();
    }
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors_) n += static_cast<std::size_t>(t.value.size());
    return n;
  }

  bool same_shape(const ParamSet& other) const {
    if (other.size() != size()) return false;
    for (int i = 0; i < size(); ++i) {
      if (tensors_[i].value.rows() != other[i].rows() ||
          tensors_[i].value.cols() != other[i].cols()) {
        return false;
      }
    }
    return true;
  }

  // Name of the first tensor holding a NaN or infinity, empty when none.
  std::string first_non_finite() const {
    for (const auto& t : tensors_) {
      if (!t.value.allFinite()) return t.name;
    }
    return {};
  }

 private:
  std::vector<Tensor<T>> tensors_;
};

template <typename T>
using GradientSet = ParamSet<T>;

}  // namespace dmrl::nn

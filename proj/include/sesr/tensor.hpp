// Copyright (c) 2026 SESR Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SESR_TENSOR_HPP
#define SESR_TENSOR_HPP

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sesr {

// Dense row-major tensor. Spectrogram-shaped data is stored channels-last,
// i.e. (T, F, C) with C fastest.
template <typename T>
class TensorT {
 public:
  TensorT() = default;

  explicit TensorT(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(numel_of(shape_), T(0));
  }

  TensorT(std::initializer_list<int> shape)
      : TensorT(std::vector<int>(shape)) {}

  static TensorT zeros(std::vector<int> shape) { return TensorT(std::move(shape)); }

  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_.at(static_cast<size_t>(i)); }
  int ndim() const { return static_cast<int>(shape_.size()); }

  std::size_t numel() const { return data_.size(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  // 2-D access (rows, cols)
  T& at(int i, int j) {
    assert(ndim() == 2);
    return data_[static_cast<size_t>(i) * shape_[1] + j];
  }
  T at(int i, int j) const {
    assert(ndim() == 2);
    return data_[static_cast<size_t>(i) * shape_[1] + j];
  }

  // 3-D access (T, F, C)
  T& at(int i, int j, int k) {
    assert(ndim() == 3);
    return data_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  T at(int i, int j, int k) const {
    assert(ndim() == 3);
    return data_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  // Reinterprets the buffer with a new shape of equal element count.
  TensorT reshaped(std::vector<int> shape) const {
    if (numel_of(shape) != numel())
      throw std::invalid_argument("reshape: element count mismatch");
    TensorT out;
    out.shape_ = std::move(shape);
    out.data_ = data_;
    return out;
  }

  bool same_shape(const TensorT& o) const { return shape_ == o.shape_; }

  static std::size_t numel_of(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
      if (d < 0) throw std::invalid_argument("negative tensor dimension");
      n *= static_cast<size_t>(d);
    }
    return n;
  }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

using Tensor = TensorT<float>;

}  // namespace sesr

#endif  // SESR_TENSOR_HPP

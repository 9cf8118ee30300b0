#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace skt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense rank-3 array over an n-dimensional index range.
template <class S = double>
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(std::size_t n, const S& fill = S{}) : n_(n), data_(n * n * n, fill) {}

  std::size_t dim() const { return n_; }
  S& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * n_ + j) * n_ + k]; }
  const S& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * n_ + j) * n_ + k];
  }
  const std::vector<S>& data() const { return data_; }

 private:
  std::size_t n_ = 0;
  std::vector<S> data_;
};

/// Dense rank-4 array over an n-dimensional index range.
template <class S = double>
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(std::size_t n, const S& fill = S{}) : n_(n), data_(n * n * n * n, fill) {}

  std::size_t dim() const { return n_; }
  S& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return data_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  const S& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return data_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  const std::vector<S>& data() const { return data_; }
  std::vector<S>& data() { return data_; }

  /// Sets A(i,j,k,l) = v together with every entry forced by the pair and
  /// antisymmetries.
  void set_with_symmetries(std::size_t i, std::size_t j, std::size_t k, std::size_t l, const S& v) {
    (*this)(i, j, k, l) = v;
    (*this)(j, i, k, l) = -v;
    (*this)(i, j, l, k) = -v;
    (*this)(j, i, l, k) = v;
    (*this)(k, l, i, j) = v;
    (*this)(l, k, i, j) = -v;
    (*this)(k, l, j, i) = -v;
    (*this)(l, k, j, i) = v;
  }

 private:
  std::size_t n_ = 0;
  std::vector<S> data_;
};

inline double max_abs(const Tensor4<double>& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_difference(const Tensor4<double>& a, const Tensor4<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline double max_abs_difference(const Tensor3<double>& a, const Tensor3<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace skt

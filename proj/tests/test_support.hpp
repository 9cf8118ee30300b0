#pragma once

#include <Eigen/QR>
#include <random>

#include "skt/chart.hpp"
#include "skt/tensor.hpp"
#include "skt/zero_model.hpp"

namespace skt::test {

inline Matrix random_orthogonal(std::size_t m, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Matrix a(m, m);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = n01(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

inline Vector random_vector(std::size_t m, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Vector v(m);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = n01(rng);
  return v;
}

/// Sets A(i,j,k,l) = v and fills the pair/antisymmetry images.
inline void set_orbit(Tensor4<double>& t, std::size_t i, std::size_t j, std::size_t k, std::size_t l, double v) {
  for (int pair = 0; pair < 2; ++pair) {
    t(i, j, k, l) = v;
    t(j, i, k, l) = -v;
    t(i, j, l, k) = -v;
    t(j, i, l, k) = v;
    std::swap(i, k);
    std::swap(j, l);
  }
}

inline Chart flat_chart(std::size_t n) {
  std::vector<std::vector<Expression>> g(n, std::vector<Expression>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i][j] = Expression::constant(n, i == j ? 1.0 : 0.0);
  return Chart(Signature{0, static_cast<int>(n)}, g);
}

}  // namespace skt::test

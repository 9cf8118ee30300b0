#pragma once

// Levi-Civita geometry from metric values and their first and second
// coordinate derivatives, templated on the scalar type so the same code runs
// on doubles and on jets (whose derivatives then differentiate the result
// with respect to the base point).

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "skt/chart.hpp"
#include "skt/error.hpp"
#include "skt/jet.hpp"

namespace skt::detail {

inline bool exact_zero(double v) { return v == 0.0; }
template <class S>
bool exact_zero(const Jet2<S>& v) {
  if (!exact_zero(v.value)) return false;
  for (const auto& g : v.grad) if (!exact_zero(g)) return false;
  for (const auto& h : v.hess) if (!exact_zero(h)) return false;
  return true;
}

template <class S>
struct Geometry {
  std::size_t n = 0;
  std::vector<S> g;       // [i][j]
  std::vector<S> ginv;    // [i][j]
  std::vector<S> dg;      // [k][i][j] = d_k g_ij
  std::vector<S> ddg;     // [k][l][i][j] = d_k d_l g_ij
  std::vector<S> gamma1;  // [i][j][k] = Gamma_ijk
  std::vector<S> gamma2;  // [k][i][j] = Gamma^k_ij
  std::vector<S> riemann;
  std::vector<S> ricci;
  S scalar{};

  std::size_t i2(std::size_t i, std::size_t j) const { return i * n + j; }
  std::size_t i3(std::size_t i, std::size_t j, std::size_t k) const { return (i * n + j) * n + k; }
  std::size_t i4(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return ((i * n + j) * n + k) * n + l;
  }
};

/// Gauss-Jordan inverse with partial pivoting on the primal values.
template <class S>
std::vector<S> invert(std::vector<S> a, std::size_t n) {
  std::vector<S> inv(n * n, zero_like(a[0]));
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = lift(a[0], 1.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(primal(a[r * n + c])) > std::abs(primal(a[piv * n + c]))) piv = r;
    }
    if (primal(a[piv * n + c]) == 0.0) throw ChartError(ChartError::Kind::DegenerateMetric, "metric is singular");
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a[c * n + k], a[piv * n + k]);
        std::swap(inv[c * n + k], inv[piv * n + k]);
      }
    }
    const S p = 1.0 / a[c * n + c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c * n + k] = a[c * n + k] * p;
      inv[c * n + k] = inv[c * n + k] * p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const S f = a[r * n + c];
      if (exact_zero(f)) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a[r * n + k] = a[r * n + k] - f * a[c * n + k];
        inv[r * n + k] = inv[r * n + k] - f * inv[c * n + k];
      }
    }
  }
  return inv;
}

/// Evaluates g, dg and ddg. Point entries of type S; S = Jet2<double>
/// carries derivatives with respect to the base point.
template <class S>
void load_metric(const Chart& chart, std::span<const S> point, Geometry<S>& geo) {
  const std::size_t n = chart.dim();
  geo.n = n;
  const S zero = zero_like(point[0]);
  geo.g.assign(n * n, zero);
  geo.dg.assign(n * n * n, zero);
  geo.ddg.assign(n * n * n * n, zero);
  const auto& packed = chart.packed_components();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const Expression& e = packed[packed_index(n, i, j)];
      if (e.is_constant()) {
        const S v = lift(zero, e.evaluate(std::vector<double>(n, 0.0)));
        geo.g[geo.i2(i, j)] = v;
        geo.g[geo.i2(j, i)] = v;
        continue;
      }
      const Jet2<S> jet = e.template eval_jet2_generic<S>(point);
      geo.g[geo.i2(i, j)] = jet.value;
      geo.g[geo.i2(j, i)] = jet.value;
      for (std::size_t k = 0; k < n; ++k) {
        geo.dg[geo.i3(k, i, j)] = jet.grad[k];
        geo.dg[geo.i3(k, j, i)] = jet.grad[k];
        for (std::size_t l = 0; l < n; ++l) {
          const S& h = jet.hessian(k, l);
          geo.ddg[geo.i4(k, l, i, j)] = h;
          geo.ddg[geo.i4(k, l, j, i)] = h;
        }
      }
    }
  }
}

template <class S>
void compute_christoffel(Geometry<S>& geo) {
  const std::size_t n = geo.n;
  const S zero = zero_like(geo.g[0]);
  geo.gamma1.assign(n * n * n, zero);
  geo.gamma2.assign(n * n * n, zero);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const S v = 0.5 * (geo.dg[geo.i3(j, i, k)] + geo.dg[geo.i3(i, j, k)] - geo.dg[geo.i3(k, i, j)]);
        geo.gamma1[geo.i3(i, j, k)] = v;
        geo.gamma1[geo.i3(j, i, k)] = v;
      }
    }
  }
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        S v = zero;
        for (std::size_t k = 0; k < n; ++k) {
          const S& a = geo.ginv[geo.i2(m, k)];
          if (exact_zero(a)) continue;
          v = v + a * geo.gamma1[geo.i3(i, j, k)];
        }
        geo.gamma2[geo.i3(m, i, j)] = v;
        geo.gamma2[geo.i3(m, j, i)] = v;
      }
    }
  }
}

/// R_ijkl = d_i Gamma_jkl - d_j Gamma_ikl - Gamma^m_jk Gamma_ilm + Gamma^m_ik Gamma_jlm,
/// then Ricci and scalar contractions.
template <class S>
void compute_curvature(Geometry<S>& geo) {
  const std::size_t n = geo.n;
  const S zero = zero_like(geo.g[0]);
  auto d_gamma = [&](std::size_t a, std::size_t i, std::size_t j, std::size_t k) {
    // d_a Gamma_ijk
    return 0.5 * (geo.ddg[geo.i4(a, j, i, k)] + geo.ddg[geo.i4(a, i, j, k)] - geo.ddg[geo.i4(a, k, i, j)]);
  };
  geo.riemann.assign(n * n * n * n, zero);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
          if (k == l) continue;
          S v = d_gamma(i, j, k, l) - d_gamma(j, i, k, l);
          for (std::size_t m = 0; m < n; ++m) {
            v = v - geo.gamma2[geo.i3(m, j, k)] * geo.gamma1[geo.i3(i, l, m)] +
                geo.gamma2[geo.i3(m, i, k)] * geo.gamma1[geo.i3(j, l, m)];
          }
          geo.riemann[geo.i4(i, j, k, l)] = v;
        }
      }
    }
  }
  geo.ricci.assign(n * n, zero);
  geo.scalar = zero;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      S v = zero;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < n; ++l) {
          const S& a = geo.ginv[geo.i2(i, l)];
          if (exact_zero(a)) continue;
          v = v + a * geo.riemann[geo.i4(i, j, k, l)];
        }
      }
      geo.ricci[geo.i2(j, k)] = v;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) geo.scalar = geo.scalar + geo.ginv[geo.i2(j, k)] * geo.ricci[geo.i2(j, k)];
  }
}

}  // namespace skt::detail

#pragma once

// Forward-mode dual numbers carrying a value with its gradient (Jet1) or its
// gradient and Hessian (Jet2). The scalar type is a template parameter so the
// jets nest: Jet2<Jet2<double>> differentiates a computation that itself
// consumes second derivatives.

#include <cmath>
#include <cstddef>
#include <vector>

namespace skt {

inline double primal(double v) { return v; }
inline double zero_like(double) { return 0.0; }
inline double lift(double, double c) { return c; }

/// Index of (i, j), i <= j, in a row-major packed upper triangle of order n.
constexpr std::size_t packed_index(std::size_t n, std::size_t i, std::size_t j) {
  if (i > j) {
    const std::size_t t = i;
    i = j;
    j = t;
  }
  return i * n - i * (i - 1) / 2 + (j - i);
}

// ---------------------------------------------------------------------------

template <class S>
struct Jet1 {
  S value{};
  std::vector<S> grad;

  static Jet1 constant(std::size_t n, const S& v) {
    Jet1 j;
    j.value = v;
    j.grad.assign(n, zero_like(v));
    return j;
  }
  static Jet1 variable(std::size_t n, std::size_t index, const S& v) {
    Jet1 j = constant(n, v);
    j.grad[index] = lift(v, 1.0);
    return j;
  }

  std::size_t size() const { return grad.size(); }
};

template <class S>
double primal(const Jet1<S>& a) { return primal(a.value); }
template <class S>
Jet1<S> zero_like(const Jet1<S>& a) { return Jet1<S>::constant(a.size(), zero_like(a.value)); }
template <class S>
Jet1<S> lift(const Jet1<S>& like, double c) {
  return Jet1<S>::constant(like.size(), lift(like.value, c));
}

template <class S>
Jet1<S> chain(const Jet1<S>& a, const S& f0, const S& f1) {
  Jet1<S> r;
  r.value = f0;
  r.grad.reserve(a.size());
  for (const auto& g : a.grad) r.grad.push_back(f1 * g);
  return r;
}

template <class S>
Jet1<S> operator-(const Jet1<S>& a) {
  Jet1<S> r = a;
  r.value = -r.value;
  for (auto& g : r.grad) g = -g;
  return r;
}
template <class S>
Jet1<S> operator+(const Jet1<S>& a, const Jet1<S>& b) {
  Jet1<S> r = a;
  r.value = r.value + b.value;
  for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] = r.grad[i] + b.grad[i];
  return r;
}
template <class S>
Jet1<S> operator-(const Jet1<S>& a, const Jet1<S>& b) {
  Jet1<S> r = a;
  r.value = r.value - b.value;
  for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] = r.grad[i] - b.grad[i];
  return r;
}
template <class S>
Jet1<S> operator*(const Jet1<S>& a, const Jet1<S>& b) {
  Jet1<S> r;
  r.value = a.value * b.value;
  r.grad.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.grad.push_back(a.value * b.grad[i] + b.value * a.grad[i]);
  return r;
}
template <class S>
Jet1<S> operator*(double c, const Jet1<S>& a) {
  Jet1<S> r = a;
  r.value = c * r.value;
  for (auto& g : r.grad) g = c * g;
  return r;
}
template <class S>
Jet1<S> operator*(const Jet1<S>& a, double c) { return c * a; }
template <class S>
Jet1<S> operator+(const Jet1<S>& a, double c) {
  Jet1<S> r = a;
  r.value = r.value + c;
  return r;
}
template <class S>
Jet1<S> operator-(const Jet1<S>& a, double c) { return a + (-c); }

template <class S>
Jet1<S> reciprocal(const Jet1<S>& a) {
  const S f0 = 1.0 / a.value;
  return chain(a, f0, -(f0 * f0));
}
template <class S>
Jet1<S> operator/(const Jet1<S>& a, const Jet1<S>& b) { return a * reciprocal(b); }
template <class S>
Jet1<S> operator/(double c, const Jet1<S>& a) { return c * reciprocal(a); }

template <class S>
Jet1<S> exp(const Jet1<S>& a) {
  using std::exp;
  const S e = exp(a.value);
  return chain(a, e, e);
}
template <class S>
Jet1<S> log(const Jet1<S>& a) {
  using std::log;
  return chain(a, log(a.value), 1.0 / a.value);
}
template <class S>
Jet1<S> sin(const Jet1<S>& a) {
  using std::cos;
  using std::sin;
  return chain(a, sin(a.value), cos(a.value));
}
template <class S>
Jet1<S> cos(const Jet1<S>& a) {
  using std::cos;
  using std::sin;
  return chain(a, cos(a.value), -sin(a.value));
}
template <class S>
Jet1<S> sqrt(const Jet1<S>& a) {
  using std::sqrt;
  const S r = sqrt(a.value);
  return chain(a, r, 0.5 / r);
}
template <class S>
Jet1<S> abs(const Jet1<S>& a) {
  using std::abs;
  const double s = primal(a.value) > 0.0 ? 1.0 : (primal(a.value) < 0.0 ? -1.0 : 0.0);
  return chain(a, abs(a.value), lift(a.value, s));
}

// ---------------------------------------------------------------------------

/// Value, gradient and Hessian of a scalar function of n variables. The
/// Hessian is stored once as a packed upper triangle, so it is symmetric by
/// construction.
template <class S>
struct Jet2 {
  S value{};
  std::vector<S> grad;
  std::vector<S> hess;

  static Jet2 constant(std::size_t n, const S& v) {
    Jet2 j;
    j.value = v;
    j.grad.assign(n, zero_like(v));
    j.hess.assign(n * (n + 1) / 2, zero_like(v));
    return j;
  }
  static Jet2 variable(std::size_t n, std::size_t index, const S& v) {
    Jet2 j = constant(n, v);
    j.grad[index] = lift(v, 1.0);
    return j;
  }

  std::size_t size() const { return grad.size(); }
  const S& hessian(std::size_t i, std::size_t j) const { return hess[packed_index(size(), i, j)]; }
};

template <class S>
double primal(const Jet2<S>& a) { return primal(a.value); }
template <class S>
Jet2<S> zero_like(const Jet2<S>& a) { return Jet2<S>::constant(a.size(), zero_like(a.value)); }
template <class S>
Jet2<S> lift(const Jet2<S>& like, double c) {
  return Jet2<S>::constant(like.size(), lift(like.value, c));
}

/// Applies a scalar function with value f0, first derivative f1 and second
/// derivative f2 at a.value.
template <class S>
Jet2<S> chain(const Jet2<S>& a, const S& f0, const S& f1, const S& f2) {
  const std::size_t n = a.size();
  Jet2<S> r;
  r.value = f0;
  r.grad.reserve(n);
  for (const auto& g : a.grad) r.grad.push_back(f1 * g);
  r.hess.reserve(a.hess.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      r.hess.push_back(f1 * a.hess[packed_index(n, i, j)] + f2 * (a.grad[i] * a.grad[j]));
    }
  }
  return r;
}

template <class S>
Jet2<S> operator-(const Jet2<S>& a) {
  Jet2<S> r = a;
  r.value = -r.value;
  for (auto& g : r.grad) g = -g;
  for (auto& h : r.hess) h = -h;
  return r;
}
template <class S>
Jet2<S> operator+(const Jet2<S>& a, const Jet2<S>& b) {
  Jet2<S> r = a;
  r.value = r.value + b.value;
  for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] = r.grad[i] + b.grad[i];
  for (std::size_t i = 0; i < r.hess.size(); ++i) r.hess[i] = r.hess[i] + b.hess[i];
  return r;
}
template <class S>
Jet2<S> operator-(const Jet2<S>& a, const Jet2<S>& b) {
  Jet2<S> r = a;
  r.value = r.value - b.value;
  for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] = r.grad[i] - b.grad[i];
  for (std::size_t i = 0; i < r.hess.size(); ++i) r.hess[i] = r.hess[i] - b.hess[i];
  return r;
}
template <class S>
Jet2<S> operator*(const Jet2<S>& a, const Jet2<S>& b) {
  const std::size_t n = a.size();
  Jet2<S> r;
  r.value = a.value * b.value;
  r.grad.reserve(n);
  for (std::size_t i = 0; i < n; ++i) r.grad.push_back(a.value * b.grad[i] + b.value * a.grad[i]);
  r.hess.reserve(a.hess.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const std::size_t k = packed_index(n, i, j);
      r.hess.push_back(a.value * b.hess[k] + b.value * a.hess[k] + a.grad[i] * b.grad[j] +
                       a.grad[j] * b.grad[i]);
    }
  }
  return r;
}
template <class S>
Jet2<S> operator*(double c, const Jet2<S>& a) {
  Jet2<S> r = a;
  r.value = c * r.value;
  for (auto& g : r.grad) g = c * g;
  for (auto& h : r.hess) h = c * h;
  return r;
}
template <class S>
Jet2<S> operator*(const Jet2<S>& a, double c) { return c * a; }
template <class S>
Jet2<S> operator+(const Jet2<S>& a, double c) {
  Jet2<S> r = a;
  r.value = r.value + c;
  return r;
}
template <class S>
Jet2<S> operator-(const Jet2<S>& a, double c) { return a + (-c); }

template <class S>
Jet2<S> reciprocal(const Jet2<S>& a) {
  const S f0 = 1.0 / a.value;
  const S f0sq = f0 * f0;
  return chain(a, f0, -f0sq, 2.0 * (f0sq * f0));
}
template <class S>
Jet2<S> operator/(const Jet2<S>& a, const Jet2<S>& b) { return a * reciprocal(b); }
template <class S>
Jet2<S> operator/(double c, const Jet2<S>& a) { return c * reciprocal(a); }

template <class S>
Jet2<S> exp(const Jet2<S>& a) {
  using std::exp;
  const S e = exp(a.value);
  return chain(a, e, e, e);
}
template <class S>
Jet2<S> log(const Jet2<S>& a) {
  using std::log;
  const S inv = 1.0 / a.value;
  return chain(a, log(a.value), inv, -(inv * inv));
}
template <class S>
Jet2<S> sin(const Jet2<S>& a) {
  using std::cos;
  using std::sin;
  const S s = sin(a.value);
  return chain(a, s, cos(a.value), -s);
}
template <class S>
Jet2<S> cos(const Jet2<S>& a) {
  using std::cos;
  using std::sin;
  const S c = cos(a.value);
  return chain(a, c, -sin(a.value), -c);
}
template <class S>
Jet2<S> sqrt(const Jet2<S>& a) {
  using std::sqrt;
  const S r = sqrt(a.value);
  const S inv = 1.0 / r;
  return chain(a, r, 0.5 * inv, -0.25 * (inv / a.value));
}
template <class S>
Jet2<S> abs(const Jet2<S>& a) {
  using std::abs;
  const double s = primal(a.value) > 0.0 ? 1.0 : (primal(a.value) < 0.0 ? -1.0 : 0.0);
  return chain(a, abs(a.value), lift(a.value, s), zero_like(a.value));
}

/// Integer power by repeated squaring; n < 0 takes the reciprocal.
template <class N>
N pow_int(const N& base, int n) {
  if (n < 0) return 1.0 / pow_int(base, -n);
  N result = lift(base, 1.0);
  N square = base;
  bool first = true;
  while (n > 0) {
    if (n & 1) {
      result = first ? square : result * square;
      first = false;
    }
    n >>= 1;
    if (n > 0) square = square * square;
  }
  return result;
}

inline double pow_int(double base, int n) {
  if (n < 0) return 1.0 / pow_int(base, -n);
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

}  // namespace skt

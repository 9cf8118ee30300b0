#pragma once

// Coordinate charts given by closed-form metric components, and the
// pointwise Levi-Civita geometry computed from them.
//
// Conventions (index positions are 0-based in code):
//   gamma_first(i,j,k)  = Gamma_ijk = g(nabla_i d_j, d_k)
//                       = 1/2 (d_j g_ik + d_i g_jk - d_k g_ij)
//   gamma_second(k,i,j) = Gamma^k_ij, so nabla_i d_j = sum_k Gamma^k_ij d_k
//   R(x,y)z = nabla_x nabla_y z - nabla_y nabla_x z - nabla_[x,y] z
//   riemann(i,j,k,l)    = g(R(d_i,d_j)d_k, d_l)
//   ricci(j,k)          = sum_il g^il R_ijkl   (positive on round spheres)
//   scalar              = sum_jk g^jk ricci(j,k)

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skt/expr.hpp"
#include "skt/tensor.hpp"
#include "skt/zero_model.hpp"

namespace skt {

/// A chart domain condition, satisfied where `expr` is strictly positive.
struct DomainGuard {
  Expression expr;
  std::string label;
};

/// Parses "lhs > rhs", "lhs < rhs", or a bare expression (meaning > 0).
DomainGuard parse_guard(std::string_view text, std::size_t dimension, const VariableTable& names);

class Chart {
 public:
  /// `components` is the full n x n matrix of metric expressions; it must be
  /// symmetric (g_ij and g_ji structurally equal).
  Chart(Signature signature, std::vector<std::vector<Expression>> components,
        std::vector<DomainGuard> guards = {}, std::vector<std::string> coordinate_names = {});

  std::size_t dim() const { return dim_; }
  Signature signature() const { return signature_; }
  const Expression& component(std::size_t i, std::size_t j) const;
  const std::vector<DomainGuard>& guards() const { return guards_; }
  const std::vector<std::string>& coordinate_names() const { return names_; }

  /// Name -> index table built from the coordinate names (plus x1..xn).
  VariableTable variable_table() const;

  /// Label of the first violated guard, if any.
  std::optional<std::string> violated_guard(std::span<const double> point) const;
  bool in_domain(std::span<const double> point) const { return !violated_guard(point); }

  /// Smallest guard value at the point (+inf without guards).
  double guard_margin(std::span<const double> point) const;

  /// Packed upper-triangle components, row-major.
  const std::vector<Expression>& packed_components() const { return packed_; }

 private:
  std::size_t dim_ = 0;
  Signature signature_;
  std::vector<Expression> packed_;
  std::vector<DomainGuard> guards_;
  std::vector<std::string> names_;
};

struct MetricAt {
  Matrix metric;
  Matrix inverse;
};

struct ChristoffelAt {
  Tensor3<double> first;   // (i,j,k) -> Gamma_ijk
  Tensor3<double> second;  // (k,i,j) -> Gamma^k_ij
};

struct CurvatureData {
  Vector point;
  Matrix metric;
  Matrix inverse_metric;
  Tensor3<double> gamma_first;
  Tensor3<double> gamma_second;
  Tensor4<double> riemann;
  Matrix ricci;
  double scalar = 0.0;
};

/// How much of the metric is verified at a point. `Nondegenerate` skips the
/// signature comparison, which needs an eigen-decomposition.
enum class MetricCheck { Full, Nondegenerate };

/// Throws ChartError on a guard violation, a degenerate metric, or a
/// signature different from the chart's declared one.
MetricAt metric_at(const Chart& chart, std::span<const double> point, MetricCheck check = MetricCheck::Full);

ChristoffelAt christoffel_at(const Chart& chart, std::span<const double> point,
                             MetricCheck check = MetricCheck::Full);

CurvatureData curvature_at(const Chart& chart, std::span<const double> point);

/// (T_P M, g_P, R_P) as an algebraic model.
ZeroModel model_at(const Chart& chart, std::span<const double> point);

/// Numerical rank of the span of the ranges of all basis curvature operators.
std::size_t curvature_range_rank(const Chart& chart, std::span<const double> point, double tol = 1e-9);

/// Scalar curvature computed as the full double contraction sum g^il g^jk R_ijkl.
double scalar_from_riemann(const CurvatureData& data);

struct LogScalarHessian {
  double scalar = 0.0;        // tau at the point
  Vector gradient;            // d_i ln|tau|
  Matrix covariant;           // nabla^2 ln|tau|, all indices
  Matrix coordinate;          // d_i d_j ln|tau| without connection terms
  Matrix restricted;          // covariant block on the requested indices
  double determinant = 0.0;   // det(restricted)
};

/// Covariant Hessian of ln|tau| restricted to a coordinate subspace
/// (0-based indices). Derivatives of tau are exact: the geometry kernel is run
/// on nested second-order jets. Throws ChartError when tau vanishes.
LogScalarHessian hessian_log_scalar(const Chart& chart, std::span<const double> point,
                                    std::span<const int> subspace);

/// Evaluates the chart's metric on plain doubles without guard or signature
/// checks.
Matrix metric_values(const Chart& chart, std::span<const double> point);

}  // namespace skt

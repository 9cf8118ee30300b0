#include "skt/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "geometry_kernel.hpp"
#include "skt/error.hpp"

namespace skt {

namespace {

void check_point(const Chart& chart, std::span<const double> point) {
  if (point.size() != chart.dim()) {
    throw ChartError(ChartError::Kind::BadInput, "point has " + std::to_string(point.size()) +
                                                     " coordinates, chart dimension is " +
                                                     std::to_string(chart.dim()));
  }
  for (double v : point) {
    if (!std::isfinite(v)) throw ChartError(ChartError::Kind::BadInput, "point has a non-finite coordinate");
  }
  if (auto label = chart.violated_guard(point)) {
    throw ChartError(ChartError::Kind::DomainViolation, "point violates domain guard '" + *label + "'");
  }
}

Matrix to_matrix(const std::vector<double>& v, std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = v[i * n + j];
  }
  return m;
}

std::vector<double> to_vector(const Matrix& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) v[i * n + j] = m(i, j);
  }
  return v;
}

detail::Geometry<double> second_order_geometry(const Chart& chart, std::span<const double> point,
                                               MetricAt& at) {
  at = metric_at(chart, point);
  detail::Geometry<double> geo;
  try {
    detail::load_metric<double>(chart, point, geo);
  } catch (const DomainError& e) {
    throw ChartError(ChartError::Kind::DomainViolation, e.what());
  }
  geo.ginv = to_vector(at.inverse);
  detail::compute_christoffel(geo);
  detail::compute_curvature(geo);
  return geo;
}

}  // namespace

DomainGuard parse_guard(std::string_view text, std::size_t dimension, const VariableTable& names) {
  const auto pos = text.find_first_of("<>");
  auto parse_side = [&](std::string_view side, std::size_t offset) {
    try {
      return parse(side, dimension, names);
    } catch (const ParseError& e) {
      throw ParseError(e.offset() + offset, e.detail());
    }
  };
  if (pos == std::string_view::npos) return {parse_side(text, 0), std::string(text)};
  if (text.find_first_of("<>", pos + 1) != std::string_view::npos) {
    throw ParseError(text.find_first_of("<>", pos + 1), "a guard has at most one comparison");
  }
  Expression lhs = parse_side(text.substr(0, pos), 0);
  Expression rhs = parse_side(text.substr(pos + 1), pos + 1);
  Expression expr = text[pos] == '>' ? lhs - rhs : rhs - lhs;
  return {expr, std::string(text)};
}

Chart::Chart(Signature signature, std::vector<std::vector<Expression>> components,
             std::vector<DomainGuard> guards, std::vector<std::string> coordinate_names)
    : dim_(components.size()),
      signature_(signature),
      guards_(std::move(guards)),
      names_(std::move(coordinate_names)) {
  if (dim_ == 0) throw ChartError(ChartError::Kind::BadInput, "chart needs at least one coordinate");
  if (static_cast<std::size_t>(signature_.dimension()) != dim_ || signature_.p < 0 || signature_.q < 0) {
    throw ChartError(ChartError::Kind::BadInput, "declared signature does not match chart dimension " +
                                                     std::to_string(dim_));
  }
  for (const auto& row : components) {
    if (row.size() != dim_) throw ChartError(ChartError::Kind::BadInput, "metric component array is not square");
    for (const auto& e : row) {
      if (e.dimension() != dim_) {
        throw ChartError(ChartError::Kind::BadInput, "metric component is over " +
                                                         std::to_string(e.dimension()) + " variables, expected " +
                                                         std::to_string(dim_));
      }
    }
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      if (!(components[i][j] == components[j][i])) {
        throw ChartError(ChartError::Kind::BadInput, "metric components g" + std::to_string(i + 1) +
                                                         std::to_string(j + 1) + " and g" + std::to_string(j + 1) +
                                                         std::to_string(i + 1) + " differ");
      }
      packed_.push_back(components[i][j]);
    }
  }
  for (const auto& g : guards_) {
    if (g.expr.dimension() != dim_) throw ChartError(ChartError::Kind::BadInput, "guard '" + g.label + "' has wrong dimension");
  }
  if (names_.empty()) {
    for (std::size_t i = 0; i < dim_; ++i) names_.push_back("x" + std::to_string(i + 1));
  } else if (names_.size() != dim_) {
    throw ChartError(ChartError::Kind::BadInput, "expected " + std::to_string(dim_) + " coordinate names");
  }
}

const Expression& Chart::component(std::size_t i, std::size_t j) const { return packed_[packed_index(dim_, i, j)]; }

VariableTable Chart::variable_table() const {
  VariableTable table = default_variables(dim_);
  for (std::size_t i = 0; i < names_.size(); ++i) table[names_[i]] = static_cast<int>(i);
  return table;
}

std::optional<std::string> Chart::violated_guard(std::span<const double> point) const {
  for (const auto& g : guards_) {
    try {
      if (!(g.expr.evaluate(point) > 0.0)) return g.label;
    } catch (const DomainError&) {
      return g.label;
    }
  }
  return std::nullopt;
}

double Chart::guard_margin(std::span<const double> point) const {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& g : guards_) {
    try {
      margin = std::min(margin, g.expr.evaluate(point));
    } catch (const DomainError&) {
      return -std::numeric_limits<double>::infinity();
    }
  }
  return margin;
}

Matrix metric_values(const Chart& chart, std::span<const double> point) {
  const std::size_t n = chart.dim();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = chart.component(i, j).evaluate(point);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

namespace {

MetricAt analyze_metric(const Chart& chart, Matrix metric, MetricCheck check) {
  if (!metric.allFinite()) throw ChartError(ChartError::Kind::DomainViolation, "metric is not finite at point");
  SymmetricAnalysis analysis;
  try {
    analysis = analyze_symmetric(metric, 1e-12, check == MetricCheck::Full);
  } catch (const ModelError& e) {
    throw ChartError(ChartError::Kind::DegenerateMetric, e.what());
  }
  const Signature s = analysis.signature;
  if (check == MetricCheck::Full && !(s == chart.signature())) {
    throw ChartError(ChartError::Kind::SignatureMismatch,
                     "metric has signature (" + std::to_string(s.p) + "," + std::to_string(s.q) +
                         "), declared (" + std::to_string(chart.signature().p) + "," +
                         std::to_string(chart.signature().q) + ")");
  }
  return {std::move(metric), std::move(analysis.inverse)};
}

}  // namespace

MetricAt metric_at(const Chart& chart, std::span<const double> point, MetricCheck check) {
  check_point(chart, point);
  Matrix g;
  try {
    g = metric_values(chart, point);
  } catch (const DomainError& e) {
    throw ChartError(ChartError::Kind::DomainViolation, e.what());
  }
  return analyze_metric(chart, std::move(g), check);
}

ChristoffelAt christoffel_at(const Chart& chart, std::span<const double> point, MetricCheck check) {
  check_point(chart, point);
  const std::size_t n = chart.dim();
  detail::Geometry<double> geo;
  geo.n = n;
  geo.dg.assign(n * n * n, 0.0);
  Matrix g(n, n);
  try {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const Expression& e = chart.component(i, j);
        if (e.is_constant()) {
          g(i, j) = g(j, i) = e.evaluate(point);
          continue;
        }
        const Jet1<double> jet = e.eval_jet1(point);
        g(i, j) = g(j, i) = jet.value;
        for (std::size_t k = 0; k < n; ++k) {
          geo.dg[geo.i3(k, i, j)] = jet.grad[k];
          geo.dg[geo.i3(k, j, i)] = jet.grad[k];
        }
      }
    }
  } catch (const DomainError& e) {
    throw ChartError(ChartError::Kind::DomainViolation, e.what());
  }
  const MetricAt at = analyze_metric(chart, std::move(g), check);
  geo.g = to_vector(at.metric);
  geo.ginv = to_vector(at.inverse);
  detail::compute_christoffel(geo);
  ChristoffelAt out{Tensor3<double>(n), Tensor3<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        out.first(i, j, k) = geo.gamma1[geo.i3(i, j, k)];
        out.second(i, j, k) = geo.gamma2[geo.i3(i, j, k)];
      }
    }
  }
  return out;
}

CurvatureData curvature_at(const Chart& chart, std::span<const double> point) {
  MetricAt at;
  const detail::Geometry<double> geo = second_order_geometry(chart, point, at);
  const std::size_t n = chart.dim();
  CurvatureData d;
  d.point = Eigen::Map<const Vector>(point.data(), static_cast<Eigen::Index>(n));
  d.metric = at.metric;
  d.inverse_metric = at.inverse;
  d.gamma_first = Tensor3<double>(n);
  d.gamma_second = Tensor3<double>(n);
  d.riemann = Tensor4<double>(n);
  d.riemann.data() = geo.riemann;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        d.gamma_first(i, j, k) = geo.gamma1[geo.i3(i, j, k)];
        d.gamma_second(i, j, k) = geo.gamma2[geo.i3(i, j, k)];
      }
    }
  }
  d.ricci = to_matrix(geo.ricci, n);
  d.scalar = geo.scalar;
  return d;
}

ZeroModel model_at(const Chart& chart, std::span<const double> point) {
  CurvatureData d = curvature_at(chart, point);
  return ZeroModel(std::move(d.metric), std::move(d.riemann));
}

std::size_t curvature_range_rank(const Chart& chart, std::span<const double> point, double tol) {
  const ZeroModel model = model_at(chart, point);
  const std::size_t n = model.dim();
  if (n < 2) return 0;
  Matrix stacked(n, n * (n - 1) / 2 * n);
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      stacked.middleCols(col, static_cast<Eigen::Index>(n)) = basis_curvature_operator(model, i, j).matrix();
      col += static_cast<Eigen::Index>(n);
    }
  }
  const Vector sv = Eigen::JacobiSVD<Matrix>(stacked).singularValues();
  const double cut = tol * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv[k] > cut ? 1 : 0;
  return rank;
}

double scalar_from_riemann(const CurvatureData& data) {
  const auto n = static_cast<std::size_t>(data.metric.rows());
  const Matrix& gi = data.inverse_metric;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      if (gi(i, l) == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) sum += gi(i, l) * gi(j, k) * data.riemann(i, j, k, l);
      }
    }
  }
  return sum;
}

LogScalarHessian hessian_log_scalar(const Chart& chart, std::span<const double> point,
                                    std::span<const int> subspace) {
  const std::size_t n = chart.dim();
  std::set<int> seen;
  for (int s : subspace) {
    if (s < 0 || static_cast<std::size_t>(s) >= n || !seen.insert(s).second) {
      throw ChartError(ChartError::Kind::BadInput, "invalid subspace index " + std::to_string(s));
    }
  }
  metric_at(chart, point);
  const ChristoffelAt gamma = christoffel_at(chart, point);

  using J = Jet2<double>;
  std::vector<J> seeded;
  seeded.reserve(n);
  for (std::size_t i = 0; i < n; ++i) seeded.push_back(J::variable(n, i, point[i]));
  detail::Geometry<J> geo;
  try {
    detail::load_metric<J>(chart, seeded, geo);
  } catch (const DomainError& e) {
    throw ChartError(ChartError::Kind::DomainViolation, e.what());
  }
  geo.ginv = detail::invert(geo.g, n);
  detail::compute_christoffel(geo);
  detail::compute_curvature(geo);
  const J& tau = geo.scalar;

  LogScalarHessian out;
  out.scalar = tau.value;
  if (!(std::abs(tau.value) > 1e-12)) {
    throw ChartError(ChartError::Kind::BadInput, "scalar curvature vanishes at point; ln|tau| is undefined");
  }
  out.gradient.resize(n);
  out.coordinate.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) out.gradient[i] = tau.grad[i] / tau.value;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.coordinate(i, j) = tau.hessian(i, j) / tau.value - out.gradient[i] * out.gradient[j];
    }
  }
  out.covariant = out.coordinate;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) out.covariant(i, j) -= gamma.second(k, i, j) * out.gradient[k];
    }
  }
  const auto m = static_cast<Eigen::Index>(subspace.size());
  out.restricted.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) out.restricted(a, b) = out.covariant(subspace[a], subspace[b]);
  }
  out.determinant = m == 0 ? 1.0 : out.restricted.determinant();
  return out;
}

}  // namespace skt

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "skt/catalog.hpp"
#include "skt/chart.hpp"
#include "skt/error.hpp"

namespace skt {
namespace {

Chart euclidean_chart(std::size_t n) {
  std::vector<std::vector<Expression>> g(n, std::vector<Expression>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i][j] = Expression::constant(n, i == j ? 1.0 : 0.0);
  return Chart(Signature{0, static_cast<int>(n)}, g);
}

std::vector<FamilySpec> catalog_specs() {
  return {
      FamilySpec{Warped3dParams{"x1*x1+x2*x2"}},
      FamilySpec{Warped3dParams{"sin(x1)*x2"}},
      FamilySpec{MBetaParams{0.5}},
      FamilySpec{MBetaParams{2.0}},
      FamilySpec{DunnParams{2, {{"x2*x2", "x1*x2"}, {"x1*x2", "exp(x1)"}}}},
      FamilySpec{DunnParams{3, {{"x2*x3", "", "x1^2"}, {"", "x3^3", ""}, {"x1^2", "", "x1*x2"}}}},
      FamilySpec{FiedlerParams{2, Matrix(), "1/2*(u1*u1+u2*u2)"}},
      FamilySpec{FiedlerParams{1, Matrix::Constant(1, 1, -2.0), "u1^3 - u1"}},
      FamilySpec{LorentzMfParams{"s_plus"}},
      FamilySpec{LorentzMfParams{"n1m"}},
      FamilySpec{LorentzMfParams{"n3p"}},
  };
}

double scale_of(const Tensor4<double>& t) { return std::max(1.0, max_abs(t)); }

TEST(Metric, EuclideanChart) {
  const std::vector<double> p{0.3, -1.0, 2.0};
  const MetricAt m = metric_at(euclidean_chart(3), p);
  EXPECT_TRUE(m.metric.isIdentity(0.0));
  EXPECT_TRUE(m.inverse.isIdentity(1e-15));
}

TEST(Metric, MBetaComponents) {
  const std::vector<double> p{0, 0, 1, 1};
  const MetricAt m = metric_at(build(FamilySpec{MBetaParams{1.0}}), p);
  Matrix expected = Matrix::Zero(4, 4);
  expected.diagonal() << 1, 4, 1, 1;
  EXPECT_LE((m.metric - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Metric, LorentzInverse) {
  const Chart chart = build(FamilySpec{LorentzMfParams{"s_plus"}});
  const std::vector<double> p{0.4, -1.0, 1.5};
  const double f = 0.5 * 1.5 * 1.5;
  const MetricAt m = metric_at(chart, p);
  Matrix g(3, 3), ginv(3, 3);
  g << -2 * f, 1, 0, 1, 0, 0, 0, 0, 1;
  ginv << 0, 1, 0, 1, 2 * f, 0, 0, 0, 1;
  EXPECT_LE((m.metric - g).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((m.inverse - ginv).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(chart.signature().p, 1);
}

TEST(Metric, ErrorKinds) {
  const Chart mbeta = build(FamilySpec{MBetaParams{1.0}});
  try {
    metric_at(mbeta, std::vector<double>{0, 0, -1, 1});
    FAIL();
  } catch (const ChartError& e) {
    EXPECT_EQ(e.kind(), ChartError::Kind::DomainViolation);
  }
  try {
    metric_at(mbeta, std::vector<double>{0, 0, 1});
    FAIL();
  } catch (const ChartError& e) {
    EXPECT_EQ(e.kind(), ChartError::Kind::BadInput);
  }
  // x1^2 dx1^2 + dx2^2 without a guard degenerates at x1 = 0
  const std::vector<std::vector<Expression>> g{{parse("x1*x1", 2), Expression::constant(2, 0)},
                                               {Expression::constant(2, 0), Expression::constant(2, 1)}};
  const Chart deg(Signature{0, 2}, g);
  try {
    metric_at(deg, std::vector<double>{0.0, 1.0});
    FAIL();
  } catch (const ChartError& e) {
    EXPECT_EQ(e.kind(), ChartError::Kind::DegenerateMetric);
  }
  const Chart wrong(Signature{1, 1}, g);
  try {
    metric_at(wrong, std::vector<double>{1.0, 1.0});
    FAIL();
  } catch (const ChartError& e) {
    EXPECT_EQ(e.kind(), ChartError::Kind::SignatureMismatch);
  }
}

TEST(Christoffel, FlatIsZero) {
  const auto c = christoffel_at(euclidean_chart(4), std::vector<double>{1, 2, 3, 4});
  for (double v : c.first.data()) EXPECT_EQ(v, 0.0);
  for (double v : c.second.data()) EXPECT_EQ(v, 0.0);
}

TEST(Christoffel, MBetaTable) {
  const auto c = christoffel_at(build(FamilySpec{MBetaParams{2.0}}), std::vector<double>{0, 0, 1, 1});
  EXPECT_NEAR(c.first(1, 1, 2), -3.0, 1e-14);
  EXPECT_NEAR(c.first(1, 1, 3), -6.0, 1e-14);
  EXPECT_NEAR(c.first(1, 3, 1), 6.0, 1e-14);
  EXPECT_NEAR(c.first(3, 1, 1), 6.0, 1e-14);
}

TEST(Christoffel, WarpedTable) {
  const auto c = christoffel_at(build(FamilySpec{Warped3dParams{"0"}}), std::vector<double>{0.1, 0.2, 2.0});
  EXPECT_NEAR(c.first(0, 2, 0), 2.0, 1e-14);
  EXPECT_NEAR(c.first(2, 0, 0), 2.0, 1e-14);
  EXPECT_NEAR(c.first(0, 0, 2), -2.0, 1e-14);
}

TEST(Curvature, MBetaSingleOrbit) {
  const auto d = curvature_at(build(FamilySpec{MBetaParams{1.0}}), std::vector<double>{0, 0, 1, 1});
  EXPECT_NEAR(d.riemann(0, 1, 1, 0), -2.0, 1e-13);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t l = 0; l < 4; ++l) {
          const bool in_orbit = ((i == 0 && j == 1) || (i == 1 && j == 0)) && ((k == 0 && l == 1) || (k == 1 && l == 0));
          if (!in_orbit) EXPECT_NEAR(d.riemann(i, j, k, l), 0.0, 1e-13);
        }
  EXPECT_NEAR(d.scalar, -1.0, 1e-13);
}

TEST(Curvature, WarpedFlatBase) {
  const auto d = curvature_at(build(FamilySpec{Warped3dParams{"0"}}), std::vector<double>{0.0, 0.0, 2.0});
  EXPECT_NEAR(d.scalar, -0.5, 1e-13);
}

TEST(Curvature, FiedlerComponent) {
  const auto d = curvature_at(build(FamilySpec{FiedlerParams{2, Matrix(), "1/2*(u1*u1+u2*u2)"}}),
                              std::vector<double>{0.3, 0.5, -0.2, 1.0});
  EXPECT_NEAR(d.riemann(0, 1, 1, 0), 1.0, 1e-13);
  EXPECT_NEAR(d.riemann(0, 2, 2, 0), 1.0, 1e-13);
  EXPECT_NEAR(d.riemann(0, 1, 2, 0), 0.0, 1e-13);
}

TEST(Curvature, FlatModelIsZero) {
  const auto m = model_at(euclidean_chart(3), std::vector<double>{1, 1, 1});
  EXPECT_EQ(m.max_norm(), 0.0);
}

TEST(Curvature, RangeRank) {
  EXPECT_EQ(curvature_range_rank(euclidean_chart(3), std::vector<double>{0, 0, 0}), 0u);
  EXPECT_EQ(curvature_range_rank(build(FamilySpec{MBetaParams{1.0}}), std::vector<double>{0, 0, 1, 1}), 2u);
  EXPECT_EQ(curvature_range_rank(build(FamilySpec{Warped3dParams{"0"}}), std::vector<double>{0, 0, 1}), 2u);
}

TEST(Curvature, MBetaSkewTsankovAndRankOnDomain) {
  std::mt19937_64 rng(21);
  for (double beta : {0.5, 1.0, 3.0}) {
    const FamilySpec spec{MBetaParams{beta}};
    const Chart chart = build(spec);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = sample_domain_point(spec, rng);
      EXPECT_TRUE(is_skew_tsankov(model_at(chart, p)).pass);
      EXPECT_EQ(curvature_range_rank(chart, p), 2u);
    }
  }
}

TEST(Curvature, SymmetriesAtRandomPoints) {
  std::mt19937_64 rng(22);
  for (const auto& spec : catalog_specs()) {
    const Chart chart = build(spec);
    for (int trial = 0; trial < 200; ++trial) {
      const auto p = sample_domain_point(spec, rng);
      const ZeroModel m = model_at(chart, p);
      EXPECT_TRUE(check_symmetries(m, 1e-9).pass) << spec.id();
    }
  }
}

TEST(Curvature, ScalarTwoWays) {
  std::mt19937_64 rng(23);
  for (const auto& spec : catalog_specs()) {
    const Chart chart = build(spec);
    for (int trial = 0; trial < 50; ++trial) {
      const auto d = curvature_at(chart, sample_domain_point(spec, rng));
      const double other = scalar_from_riemann(d);
      EXPECT_LE(std::abs(other - d.scalar), 1e-10 * std::max(1.0, std::abs(d.scalar))) << spec.id();
    }
  }
}

TEST(Curvature, AgreesWithClosedFormOracle) {
  std::mt19937_64 rng(24);
  for (const auto& spec : catalog_specs()) {
    const Chart chart = build(spec);
    for (int trial = 0; trial < 100; ++trial) {
      const auto p = sample_domain_point(spec, rng);
      const auto got = curvature_at(chart, p);
      const auto want = oracle_curvature(spec, p);
      const double gamma_scale = std::max(1.0, want.gamma_second.data().empty() ? 0.0 : [&] {
        double s = 0.0;
        for (double v : want.gamma_second.data()) s = std::max(s, std::abs(v));
        return s;
      }());
      EXPECT_LE(max_abs_difference(got.gamma_second, want.gamma_second), 1e-9 * gamma_scale) << spec.id();
      EXPECT_LE(max_abs_difference(got.riemann, want.riemann), 1e-9 * scale_of(want.riemann)) << spec.id();
    }
  }
}

TEST(Curvature, WarpedSignConvention) {
  // R(d1, d2) d1 = (alpha_11 + alpha_22 + e^{2 alpha}) d2, alpha derivatives from the expression itself
  const std::string alpha_text = "x1*x1 - 0.5*x2 + x1*x2*x2";
  const Expression alpha = parse(alpha_text, 2);
  const Chart chart = build(FamilySpec{Warped3dParams{alpha_text}});
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(-1.0, 1.0), t(0.5, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> p{u(rng), u(rng), t(rng)};
    const auto a = alpha.eval_jet2(std::span<const double>(p.data(), 2));
    const double coeff = a.hessian(0, 0) + a.hessian(1, 1) + std::exp(2 * a.value);
    const auto d = curvature_at(chart, p);
    for (std::size_t m = 0; m < 3; ++m) {
      double comp = 0.0;  // R(d1,d2)d1 = R_{0,1,0,l} g^{lm} d_m
      for (std::size_t l = 0; l < 3; ++l) comp += d.riemann(0, 1, 0, l) * d.inverse_metric(l, m);
      EXPECT_NEAR(comp, m == 1 ? coeff : 0.0, 1e-9 * std::max(1.0, std::abs(coeff)));
    }
  }
}

TEST(Hessian, MBetaSubspaceMatrix) {
  const std::vector<int> sub{2, 3};
  const auto h = hessian_log_scalar(build(FamilySpec{MBetaParams{2.0}}), std::vector<double>{0, 0, 1, 1}, sub);
  Matrix expected(2, 2);
  expected << 1.0 + 1.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 4.0 / 9.0;
  EXPECT_LE((h.restricted - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(h.determinant, 4.0 / 9.0, 1e-12);
}

TEST(Hessian, InvariantIsQuarterBetaSquared) {
  std::mt19937_64 rng(26);
  const std::vector<int> sub{2, 3};
  for (double beta : {0.5, 1.0, 2.0}) {
    const FamilySpec spec{MBetaParams{beta}};
    const Chart chart = build(spec);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = sample_domain_point(spec, rng);
      const auto h = hessian_log_scalar(chart, p, sub);
      const double x3 = p[2], x4 = p[3];
      // closed form beta^2 x3^-2 (x3 + beta x4)^-2
      EXPECT_NEAR(h.determinant, beta * beta / (x3 * x3 * (x3 + beta * x4) * (x3 + beta * x4)),
                  1e-9 * std::abs(h.determinant));
      EXPECT_NEAR(h.determinant / (h.scalar * h.scalar), beta * beta / 4.0, 1e-9);
    }
  }
}

TEST(Hessian, FlatChartHasNoLogScalar) {
  const std::vector<int> sub{0};
  EXPECT_THROW(hessian_log_scalar(euclidean_chart(2), std::vector<double>{0, 0}, sub), ChartError);
}

TEST(Chart, GuardsAndNames) {
  const Chart chart = build(FamilySpec{MBetaParams{1.0}});
  EXPECT_FALSE(chart.in_domain(std::vector<double>{0, 0, 0, 1}));
  EXPECT_TRUE(chart.in_domain(std::vector<double>{0, 0, 1, 1}));
  EXPECT_EQ(chart.coordinate_names().size(), 4u);
  EXPECT_THROW(parse_guard("x1 > 0 > x2", 2, default_variables(2)), ParseError);
}

}  // namespace
}  // namespace skt

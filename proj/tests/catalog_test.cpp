#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "skt/catalog.hpp"
#include "skt/error.hpp"

namespace skt {
namespace {

TEST(Catalog, WarpedWithFlatBase) {
  const Chart chart = build(FamilySpec{Warped3dParams{"0"}});
  const std::vector<double> p{0.2, -0.4, 1.5};
  const MetricAt m = metric_at(chart, p);
  Matrix expected = Matrix::Zero(3, 3);
  expected.diagonal() << 1.5 * 1.5, 1.5 * 1.5, 1.0;
  EXPECT_LE((m.metric - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(chart.coordinate_names(), (std::vector<std::string>{"x1", "x2", "t"}));
}

TEST(Catalog, DunnIsNeutral) {
  const Chart chart = build(FamilySpec{DunnParams{2, {{"x2*x2", ""}, {"", ""}}}});
  EXPECT_EQ(chart.signature(), (Signature{2, 2}));
  const std::vector<double> p{0.5, 2.0, 0.0, 0.0};
  const MetricAt m = metric_at(chart, p);
  EXPECT_EQ(m.metric(0, 2), 1.0);
  EXPECT_EQ(m.metric(1, 3), 1.0);
  EXPECT_EQ(m.metric(0, 0), 4.0);
  EXPECT_EQ(m.metric(2, 3), 0.0);
}

TEST(Catalog, HypothesisGuards) {
  EXPECT_THROW(build(FamilySpec{MBetaParams{-1.0}}), CatalogError);
  EXPECT_THROW(build(FamilySpec{MBetaParams{0.0}}), CatalogError);
  EXPECT_THROW(build(FamilySpec{DunnParams{2, {{"x1", "x2"}, {"x1", ""}}}}), CatalogError);
  EXPECT_THROW(build(FamilySpec{DunnParams{1, {{"y1"}}}}), CatalogError);
  Matrix singular = Matrix::Zero(2, 2);
  EXPECT_THROW(build(FamilySpec{FiedlerParams{2, singular, "u1"}}), CatalogError);
  EXPECT_THROW(build(FamilySpec{LorentzMfParams{"x*y"}}), CatalogError);
  EXPECT_THROW(build(FamilySpec{Warped3dParams{"t"}}), CatalogError);
}

TEST(Catalog, PresetResolution) {
  EXPECT_EQ(resolve_lorentz_f("s_minus"), "-0.5*y^2");
  EXPECT_EQ(resolve_lorentz_f("y^3"), "y^3");
  EXPECT_EQ(family_list().size(), 5u);
}

TEST(Oracle, MBetaOrbit) {
  const auto d = oracle_curvature(FamilySpec{MBetaParams{1.0}}, std::vector<double>{0, 0, 1, 1});
  EXPECT_DOUBLE_EQ(d.riemann(0, 1, 1, 0), -2.0);
  EXPECT_DOUBLE_EQ(d.riemann(1, 0, 0, 1), -2.0);
  EXPECT_DOUBLE_EQ(d.riemann(0, 1, 0, 1), 2.0);
  EXPECT_DOUBLE_EQ(d.riemann(0, 2, 2, 0), 0.0);
}

TEST(Oracle, FiedlerOneDimensional) {
  const auto d = oracle_curvature(FamilySpec{FiedlerParams{1, Matrix::Identity(1, 1), "1/2*u1^2"}},
                                  std::vector<double>{0.1, 0.7, -0.3});
  EXPECT_DOUBLE_EQ(d.riemann(0, 1, 1, 0), 1.0);
}

TEST(Oracle, DunnConstantComponent) {
  const FamilySpec spec{DunnParams{2, {{"x2*x2", ""}, {"", ""}}}};
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = oracle_curvature(spec, sample_domain_point(spec, rng));
    EXPECT_NEAR(d.riemann(0, 1, 1, 0), -1.0, 1e-15);
  }
}

TEST(Oracle, FiedlerOperatorHitsNullDirection) {
  // A(dx, du_a) du_b = f_ab dy
  const FamilySpec spec{FiedlerParams{2, Matrix(), "u1*u1*u2 + 1/2*u2*u2"}};
  const std::vector<double> p{0.0, 0.6, -0.4, 2.0};
  const ZeroModel m = model_at(build(spec), p);
  const double f11 = 2 * p[2], f12 = 2 * p[1], f22 = 1.0;
  const double f[2][2] = {{f11, f12}, {f12, f22}};
  for (std::size_t a = 0; a < 2; ++a) {
    const SkewOperator op = basis_curvature_operator(m, 0, 1 + a);
    for (std::size_t b = 0; b < 2; ++b) {
      Vector expected = Vector::Zero(4);
      expected(3) = f[a][b];
      EXPECT_LE((op.apply(Vector::Unit(4, 1 + b)) - expected).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(ScalarClosedForm, Examples) {
  EXPECT_NEAR(scalar_curvature_closed_form(FamilySpec{Warped3dParams{"x1*x1+x2*x2"}}, std::vector<double>{0, 0, 1}),
              -10.0, 1e-13);
  EXPECT_NEAR(scalar_curvature_closed_form(FamilySpec{MBetaParams{2.0}}, std::vector<double>{0, 0, 1, 1}),
              -2.0 / 3.0, 1e-15);
  EXPECT_EQ(scalar_curvature_closed_form(FamilySpec{DunnParams{2, {{"x2*x2", ""}, {"", ""}}}},
                                         std::vector<double>{0.1, 0.2, 0.3, 0.4}),
            0.0);
}

TEST(ScalarClosedForm, NullValuedFamiliesTraceToZero) {
  // brute-force contraction of the generic engine's tensor
  std::mt19937_64 rng(42);
  const std::vector<FamilySpec> specs{
      FamilySpec{DunnParams{2, {{"x2*x2", "x1"}, {"x1", "x1*x2"}}}},
      FamilySpec{FiedlerParams{2, Matrix(), "u1^3 + u1*u2"}},
      FamilySpec{LorentzMfParams{"n2p"}},
  };
  for (const auto& spec : specs) {
    const Chart chart = build(spec);
    for (int trial = 0; trial < 20; ++trial) {
      const auto d = curvature_at(chart, sample_domain_point(spec, rng));
      const std::size_t n = chart.dim();
      double tau = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k)
            for (std::size_t l = 0; l < n; ++l)
              tau += d.inverse_metric(i, l) * d.inverse_metric(j, k) * d.riemann(i, j, k, l);
      EXPECT_NEAR(tau, 0.0, 1e-10) << spec.id();
    }
  }
}

TEST(WarpedProduct, ScalarRelation) {
  std::mt19937_64 rng(43);
  for (const std::string alpha : {"x1*x1+x2*x2", "log(2/(1+x1*x1+x2*x2))", "sin(x1)+x2/3"}) {
    const FamilySpec spec{Warped3dParams{alpha}};
    const Chart m = build(spec);
    const Chart n = surface_chart(alpha);
    for (int trial = 0; trial < 100; ++trial) {
      const auto p = sample_domain_point(spec, rng);
      const std::vector<double> x{p[0], p[1]};
      const double tau_m = curvature_at(m, p).scalar;
      const double tau_n = curvature_at(n, x).scalar;
      EXPECT_NEAR(tau_m, (tau_n - 2.0) / (p[2] * p[2]), 1e-9 * std::max(1.0, std::abs(tau_m))) << alpha;
      EXPECT_NEAR(tau_n, surface_scalar_closed_form(alpha, x), 1e-9 * std::max(1.0, std::abs(tau_n))) << alpha;
    }
  }
}

TEST(WarpedProduct, FlatConeOverRoundSphere) {
  const std::string alpha = "log(2/(1+x1*x1+x2*x2))";
  const Chart m = build(FamilySpec{Warped3dParams{alpha}});
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-0.5, 0.5), t(0.5, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = curvature_at(m, std::vector<double>{u(rng), u(rng), t(rng)});
    EXPECT_LE(std::abs(d.scalar), 1e-8);
    EXPECT_LE(max_abs(d.riemann), 1e-8);
  }
}

TEST(Sampling, PointsLieInDomain) {
  std::mt19937_64 rng(45);
  for (const auto& spec : {FamilySpec{Warped3dParams{}}, FamilySpec{MBetaParams{}}, FamilySpec{LorentzMfParams{}}}) {
    const Chart chart = build(spec);
    for (int trial = 0; trial < 100; ++trial) EXPECT_TRUE(chart.in_domain(sample_domain_point(spec, rng)));
  }
}

}  // namespace
}  // namespace skt

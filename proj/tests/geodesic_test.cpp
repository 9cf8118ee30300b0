#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "skt/catalog.hpp"
#include "skt/error.hpp"
#include "skt/geodesic.hpp"
#include "test_support.hpp"

namespace skt {
namespace {

using test::flat_chart;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

const FamilySpec kDunn{DunnParams{2, {{"x2*x2", ""}, {"", ""}}}};

TEST(Rhs, FlatHasNoAcceleration) {
  const auto r = geodesic_rhs(flat_chart(3), {vec({1, 2, 3}), vec({0.5, -1, 2}), 0.0});
  EXPECT_EQ(r.acceleration.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(r.velocity, vec({0.5, -1, 2}));
}

TEST(Rhs, MBetaAlongFirstAxis) {
  const auto r = geodesic_rhs(build(FamilySpec{MBetaParams{1.0}}), {vec({0, 0, 1, 1}), vec({1, 0, 0, 0}), 0.0});
  EXPECT_LE((r.acceleration - vec({0, 0, 1, 0})).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Rhs, WarpedRadialLines) {
  const auto r = geodesic_rhs(build(FamilySpec{Warped3dParams{"x1*x2"}}), {vec({0.3, 0.2, 1.4}), vec({0, 0, 1}), 0.0});
  EXPECT_LE(r.acceleration.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Integrate, FlatStraightLine) {
  const Vector x0 = vec({1, -2, 0.5}), v = vec({0.3, 0.7, -1.1});
  const auto tr = integrate(flat_chart(3), {x0, v, 0.0}, 7.5);
  EXPECT_EQ(tr.terminal().kind, EventKind::HorizonReached);
  EXPECT_DOUBLE_EQ(tr.final_state().affine_param, 7.5);
  EXPECT_LE((tr.final_state().position - (x0 + 7.5 * v)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(tr.drift, 0.0);
}

TEST(Integrate, DunnReachesLongHorizon) {
  const Chart chart = build(kDunn);
  const auto tr = integrate(chart, {vec({0.3, -0.2, 0.1, 0.4}), vec({0.2, 0.5, -0.3, 0.7}), 0.0}, 100.0);
  EXPECT_EQ(tr.terminal().kind, EventKind::HorizonReached);
  EXPECT_LE(tr.drift, 1e-8 * (1 + std::abs(tr.speed_norm.front())));
}

TEST(Integrate, MBetaBlowsUpBeforeUnitTime) {
  IntegrateOptions opts;
  opts.monitor = Monitor::ScalarCurvature;
  opts.blowup_threshold = 1e6;
  const auto tr = integrate(build(FamilySpec{MBetaParams{1.0}}), {vec({1, 1, 1, 1}), vec({0, 0, -1, 0}), 0.0}, 5.0, opts);
  EXPECT_EQ(tr.terminal().kind, EventKind::Blowup);
  EXPECT_LT(tr.terminal().affine_param, 1.0);
  EXPECT_LE(1.0 - tr.terminal().affine_param, 2e-3);
}

TEST(Integrate, MBetaBlowupLaw) {
  for (double beta : {0.5, 1.0, 2.0}) {
    const auto res = blowup_probe(build(FamilySpec{MBetaParams{beta}}), {vec({1, 1, 1, 1}), vec({0, 0, -1, 0}), 0.0},
                                  Monitor::ScalarCurvature, 1e6, 5.0);
    ASSERT_TRUE(res.crossing.has_value());
    for (std::size_t i = 0; i < res.trajectory.samples.size(); ++i) {
      const double s = res.trajectory.samples[i].affine_param;
      const double tau = res.trajectory.monitor[i];
      if (std::abs(tau) >= 1e6) continue;
      EXPECT_NEAR(tau * (1 - s) * (1 - s + beta), -2.0, 1e-6) << "beta " << beta << " s " << s;
    }
  }
}

TEST(Integrate, RejectsBadInput) {
  const Chart chart = flat_chart(2);
  const GeodesicState ok{vec({0, 0}), vec({1, 0}), 0.0};
  EXPECT_THROW(integrate(chart, ok, 0.0), IntegrationError);
  IntegrateOptions bad;
  bad.rel_tol = 0.0;
  EXPECT_THROW(integrate(chart, ok, 1.0, bad), IntegrationError);
  EXPECT_THROW(integrate(chart, {vec({0, 0, 0}), vec({1, 0, 0}), 0.0}, 1.0), IntegrationError);
  EXPECT_THROW(integrate(build(FamilySpec{MBetaParams{1.0}}), {vec({0, 0, -1, 1}), vec({1, 0, 0, 0}), 0.0}, 1.0),
               IntegrationError);
}

TEST(Integrate, ChartExitIsAnEvent) {
  const auto tr =
      integrate(build(FamilySpec{MBetaParams{1.0}}), {vec({0, 0, 1, 0.5}), vec({0, 0, 0, -1}), 0.0}, 2.0);
  EXPECT_EQ(tr.terminal().kind, EventKind::ChartExit);
  EXPECT_NEAR(tr.terminal().affine_param, 0.5, 1e-6);
}

TEST(Blowup, WarpedConeTip) {
  const auto res = blowup_probe(build(FamilySpec{Warped3dParams{"x1*x1+x2*x2"}}), {vec({0, 0, 1}), vec({0, 0, -1}), 0.0},
                                Monitor::ScalarCurvature, 1e6, 5.0);
  ASSERT_TRUE(res.crossing.has_value());
  EXPECT_LT(*res.crossing, 1.0);
}

TEST(Blowup, FlatHasNone) {
  const auto res =
      blowup_probe(flat_chart(3), {vec({0, 0, 0}), vec({1, 2, 3}), 0.0}, Monitor::RicciVV, 1e6, 10.0);
  EXPECT_FALSE(res.crossing.has_value());
  EXPECT_THROW(blowup_probe(flat_chart(3), {vec({0, 0, 0}), vec({1, 2, 3}), 0.0}, Monitor::None, 1e6, 10.0),
               IntegrationError);
}

TEST(Probe, FlatAndLorentzPresetsComplete) {
  const std::vector<double> origin3{0, 0, 0};
  auto flat = completeness_probe(flat_chart(3), origin3, 16, 50.0, 1);
  EXPECT_EQ(flat.count(EventKind::HorizonReached), 16u);
  for (const char* preset : {"s_plus", "s_minus"}) {
    auto rep = completeness_probe(build(FamilySpec{LorentzMfParams{preset}}), origin3, 64, 50.0, 2);
    EXPECT_EQ(rep.count(EventKind::HorizonReached), 64u) << preset;
  }
}

TEST(Probe, MBetaHasIncompleteDirections) {
  const std::vector<double> p{1, 1, 1, 1};
  auto rep = completeness_probe(build(FamilySpec{MBetaParams{1.0}}), p, 64, 50.0, 3);
  EXPECT_GE(rep.directions.size() - rep.count(EventKind::HorizonReached), 1u);
}

TEST(Probe, ThreadCountDoesNotChangeResults) {
  const std::vector<double> p{0.3, -0.2, 0.1, 0.4};
  const Chart chart = build(kDunn);
  const auto a = completeness_probe(chart, p, 12, 5.0, 77, {}, 1);
  const auto b = completeness_probe(chart, p, 12, 5.0, 77, {}, 3);
  ASSERT_EQ(a.directions.size(), b.directions.size());
  for (std::size_t i = 0; i < a.directions.size(); ++i) {
    EXPECT_EQ(a.directions[i].velocity, b.directions[i].velocity);
    EXPECT_EQ(a.directions[i].end_param, b.directions[i].end_param);
    EXPECT_EQ(a.directions[i].max_drift, b.directions[i].max_drift);
  }
}

TEST(Probe, RiemannianDirectionsAreUnit) {
  const Chart chart = build(FamilySpec{MBetaParams{2.0}});
  const std::vector<double> p{0, 0, 0.5, 1.5};
  const Matrix g = metric_at(chart, p).metric;
  for (const Vector& v : sample_directions(chart, p, 20, 9)) EXPECT_NEAR(v.dot(g * v), 1.0, 1e-13);
}

TEST(ExpMap, ZeroAndFlat) {
  const std::vector<double> p{0.2, 0.1, 0.3, 0.4};
  const Vector got = exp_map(build(kDunn), p, Vector::Zero(4));
  EXPECT_EQ(got, vec({0.2, 0.1, 0.3, 0.4}));
  const Vector v = vec({1, -2, 0.5, 3});
  EXPECT_LE((exp_map(flat_chart(4), p, v) - (vec({0.2, 0.1, 0.3, 0.4}) + v)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ExpMap, UnreachableReportsEvent) {
  const std::vector<double> p{0, 0, 0.5, 1};
  try {
    exp_map(build(FamilySpec{MBetaParams{1.0}}), p, vec({0, 0, -1, 0}));
    FAIL();
  } catch (const UnreachableError& e) {
    EXPECT_NE(e.event().kind, EventKind::HorizonReached);
  }
}

TEST(ExpMap, SMinusGridIsInjective) {
  const Chart chart = build(FamilySpec{LorentzMfParams{"s_minus"}});
  const std::vector<double> origin{0, 0, 0};
  std::vector<Vector> images;
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j)
      for (int k = -3; k <= 3; ++k) images.push_back(exp_map(chart, origin, vec({double(i), double(j), double(k)})));
  double nearest = INFINITY;
  for (std::size_t a = 0; a < images.size(); ++a)
    for (std::size_t b = a + 1; b < images.size(); ++b) nearest = std::min(nearest, (images[a] - images[b]).norm());
  EXPECT_GT(nearest, 0.0);
}

TEST(Coverage, FlatMatchingBoxes) {
  const Box box{{-1, -1}, {1, 1}, {4, 4}};
  const auto rep = exp_coverage(flat_chart(2), std::vector<double>{0, 0}, box, box);
  EXPECT_EQ(rep.coverage, 1.0);
  EXPECT_TRUE(rep.uncovered.empty());
  EXPECT_EQ(rep.samples, 16u);
}

TEST(Coverage, BoxGeometry) {
  const Box box{{0, 0}, {2, 4}, {2, 4}};
  EXPECT_EQ(box.total(), 8u);
  EXPECT_EQ(box.center(0), vec({0.5, 0.5}));
  EXPECT_EQ(box.locate(vec({1.5, 3.5})), std::optional<std::size_t>(7));
  EXPECT_FALSE(box.locate(vec({2.5, 0})).has_value());
  const Box big = box.scaled(2.0);
  EXPECT_EQ(big.lower, (std::vector<double>{-1, -2}));
  EXPECT_EQ(big.cells, (std::vector<int>{4, 8}));
}

TEST(Properties, EnergyIsConserved) {
  std::mt19937_64 rng(61);
  const std::vector<FamilySpec> specs{kDunn, FamilySpec{FiedlerParams{2, Matrix(), "1/2*(u1*u1+u2*u2)"}},
                                      FamilySpec{LorentzMfParams{"s_plus"}}, FamilySpec{LorentzMfParams{"n1p"}},
                                      FamilySpec{Warped3dParams{"x1*x2"}}};
  for (const auto& spec : specs) {
    const Chart chart = build(spec);
    for (int trial = 0; trial < 8; ++trial) {
      const auto p = sample_domain_point(spec, rng);
      const auto rep = completeness_probe(chart, p, 4, 10.0, rng());
      for (const auto& d : rep.directions) {
        if (d.outcome != EventKind::HorizonReached) continue;
        EXPECT_LE(d.max_drift, 1e-8 * (1 + std::abs(d.speed_norm))) << spec.id();
      }
    }
  }
}

TEST(Properties, StepHalvingConverges) {
  // trajectories whose step control is truncation-limited; a nearly
  // polynomial Dunn geodesic sits at the rounding floor instead
  struct Case {
    FamilySpec spec;
    GeodesicState init;
    double horizon;
  };
  const std::vector<Case> cases{
      {FamilySpec{MBetaParams{1.0}}, {vec({0, 0, 1, 1}), vec({1, 0.5, 0.3, 0.2}), 0.0}, 3.0},
      {FamilySpec{LorentzMfParams{"n1p"}}, {vec({0, 0, 0}), vec({1, 0.3, 0.8}), 0.0}, 5.0},
      {FamilySpec{Warped3dParams{"x1*x2"}}, {vec({0.1, 0.2, 1}), vec({1, 0.5, 0.3}), 0.0}, 2.0},
  };
  for (const auto& c : cases) {
    const Chart chart = build(c.spec);
    for (double step : {0.5, 0.2, 0.1}) {
      IntegrateOptions coarse;
      coarse.max_step = step;
      IntegrateOptions fine = coarse;
      fine.max_step = step / 2;
      const auto a = integrate(chart, c.init, c.horizon, coarse);
      const auto b = integrate(chart, c.init, c.horizon, fine);
      const double diff = (a.final_state().position - b.final_state().position).cwiseAbs().maxCoeff();
      EXPECT_LE(diff, 10 * std::max(a.error_estimate, b.error_estimate)) << c.spec.id() << " step " << step;
    }
  }
}

TEST(Properties, Reversibility) {
  struct Case {
    Chart chart;
    GeodesicState init;
  };
  const std::vector<Case> cases{
      {flat_chart(3), {vec({1, 2, 3}), vec({-0.5, 0.25, 1}), 0.0}},
      {build(kDunn), {vec({0.3, -0.2, 0.1, 0.4}), vec({0.2, 0.5, -0.3, 0.7}), 0.0}},
  };
  for (const auto& c : cases) {
    const auto fwd = integrate(c.chart, c.init, 5.0);
    ASSERT_EQ(fwd.terminal().kind, EventKind::HorizonReached);
    GeodesicState back = fwd.final_state();
    back.velocity = -back.velocity;
    back.affine_param = 0.0;
    const auto rev = integrate(c.chart, back, 5.0);
    EXPECT_LE((rev.final_state().position - c.init.position).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Properties, DunnWithZeroPsiHasStraightGeodesics) {
  const Chart chart = build(FamilySpec{DunnParams{2, {}}});
  const Vector x0 = vec({0.1, 0.2, 0.3, 0.4}), v = vec({1, -1, 0.5, 2});
  EXPECT_EQ(geodesic_rhs(chart, {x0, v, 0.0}).acceleration.cwiseAbs().maxCoeff(), 0.0);
  const auto tr = integrate(chart, {x0, v, 0.0}, 3.0);
  EXPECT_LE((tr.final_state().position - (x0 + 3.0 * v)).cwiseAbs().maxCoeff(), 1e-12);
}

}  // namespace
}  // namespace skt

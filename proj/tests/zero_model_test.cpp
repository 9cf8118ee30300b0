#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "skt/catalog.hpp"
#include "skt/error.hpp"
#include "skt/zero_model.hpp"
#include "test_support.hpp"

namespace skt {
namespace {

using test::random_orthogonal;
using test::random_vector;
using test::set_orbit;

ZeroModel euclidean(const Tensor4<double>& t) {
  return ZeroModel(Matrix::Identity(static_cast<Eigen::Index>(t.dim()), static_cast<Eigen::Index>(t.dim())), t);
}

// A(x,y,z,w) = <y,z><x,w> - <x,z><y,w> on Euclidean R^m
ZeroModel round_sphere(std::size_t m) {
  Tensor4<double> t(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) t(i, j, k, l) = (j == k && i == l) - (i == k && j == l);
  return euclidean(t);
}

TEST(Symmetries, ZeroTensorPasses) {
  const auto r = check_symmetries(euclidean(Tensor4<double>(3)));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.worst, 0.0);
}

TEST(Symmetries, CompletedSingleBlockPasses) {
  Tensor4<double> t(2);
  set_orbit(t, 0, 1, 1, 0, 3.0);
  EXPECT_TRUE(check_symmetries(euclidean(t)).pass);
}

TEST(Symmetries, BrokenAntisymmetryFails) {
  Tensor4<double> t(2);
  t(0, 1, 1, 0) = 3.0;
  t(1, 0, 0, 1) = 3.0;
  t(0, 1, 0, 1) = -3.0;
  const auto r = check_symmetries(euclidean(t));
  EXPECT_FALSE(r.pass);
  EXPECT_DOUBLE_EQ(r.worst, 3.0);
}

TEST(Symmetries, BianchiViolationIsNamed) {
  Tensor4<double> t(4);
  set_orbit(t, 0, 1, 2, 3, 1.0);
  const auto r = check_symmetries(euclidean(t));
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.worst_kind, "bianchi");
}

TEST(CurvatureOperator, DiagonalPairIsZero) {
  std::mt19937_64 rng(5);
  const ZeroModel m = block_model(5, {1.5, -2.0}, random_orthogonal(5, rng));
  const Vector x = random_vector(5, rng);
  EXPECT_LE(curvature_operator(m, x, x).matrix().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(CurvatureOperator, PlaneOrientation) {
  // hand contraction: <A(e1,e2)e1, e2> = A_1212 = -a
  const double a = 2.5;
  Tensor4<double> t(2);
  set_orbit(t, 0, 1, 1, 0, a);
  const SkewOperator op = basis_curvature_operator(euclidean(t), 0, 1);
  const Vector img = op.apply(Vector::Unit(2, 0));
  EXPECT_NEAR(img(0), 0.0, 1e-15);
  EXPECT_NEAR(img(1), -a, 1e-15);
}

TEST(CurvatureOperator, AntisymmetricAndSkewAdjoint) {
  std::mt19937_64 rng(6);
  std::vector<ZeroModel> models;
  models.push_back(block_model(6, {1.0, -0.5, 3.0}, random_orthogonal(6, rng)));
  models.push_back(round_sphere(4));
  DunnParams dunn{2, {{"x2*x2", "x1*x2"}, {"x1*x2", "x1^3"}}};
  const std::vector<double> p{0.4, -0.7, 1.0, 2.0};
  models.push_back(model_at(build(FamilySpec{dunn}), p));
  for (const auto& m : models) {
    const std::size_t n = m.dim();
    for (int trial = 0; trial < 50; ++trial) {
      const Vector x = random_vector(n, rng), y = random_vector(n, rng), z = random_vector(n, rng);
      const SkewOperator a = curvature_operator(m, x, y);
      const SkewOperator b = curvature_operator(m, y, x);
      EXPECT_LE((a.matrix() + b.matrix()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE(std::abs(z.dot(m.inner() * a.apply(z))), 1e-10);
      EXPECT_LE(a.skew_adjoint_defect(m.inner()), 1e-10);
    }
  }
}

TEST(SkewTsankov, TwoDimensionalModelsPass) {
  Tensor4<double> t(2);
  set_orbit(t, 0, 1, 1, 0, -4.0);
  EXPECT_TRUE(is_skew_tsankov(euclidean(t)).pass);
}

TEST(SkewTsankov, RoundSphereFailsWithBruteForceNorm) {
  const ZeroModel m = round_sphere(4);
  // brute force: the largest commutator norm over basis pairs
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          Matrix a(4, 4), b(4, 4);
          for (int z = 0; z < 4; ++z)
            for (int w = 0; w < 4; ++w) {
              a(w, z) = (j == z && i == w) - (i == z && j == w);
              b(w, z) = (l == z && k == w) - (k == z && l == w);
            }
          worst = std::max(worst, (a * b - b * a).norm());
        }
  const auto r = is_skew_tsankov(m);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.worst_norm, worst, 1e-12);
  EXPECT_NEAR(worst, std::sqrt(2.0), 1e-12);
}

TEST(SkewTsankov, RandomBlockModelsPass) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(2, 10);
  std::uniform_real_distribution<double> curv(-5.0, 5.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = static_cast<std::size_t>(dim(rng));
    std::uniform_int_distribution<std::size_t> blocks(1, m / 2);
    std::vector<double> a(blocks(rng));
    for (auto& v : a) {
      do v = curv(rng);
      while (std::abs(v) < 0.1);
    }
    const ZeroModel model = block_model(m, a, random_orthogonal(m, rng));
    EXPECT_TRUE(check_symmetries(model).pass);
    EXPECT_TRUE(is_skew_tsankov(model, 1e-10).pass);
  }
}

TEST(SkewTsankov, CrossBlockComponentIsDetected) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const ZeroModel base = block_model(4, {1.0 + trial * 0.1, -2.0});
    Tensor4<double> t = base.tensor();
    set_orbit(t, 0, 1, 2, 3, 0.1);
    const Matrix q = random_orthogonal(4, rng);
    // conjugate the perturbed tensor by q
    Tensor4<double> r(4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            double s = 0.0;
            for (int a = 0; a < 4; ++a)
              for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                  for (int d = 0; d < 4; ++d) s += q(i, a) * q(j, b) * q(k, c) * q(l, d) * t(a, b, c, d);
            r(i, j, k, l) = s;
          }
    const ZeroModel m = euclidean(r);
    EXPECT_TRUE(!check_symmetries(m).pass || !is_skew_tsankov(m).pass);
  }
}

TEST(Nilpotency, DunnOrderTwo) {
  DunnParams dunn{2, {{"x2*x2", ""}, {"", ""}}};
  const std::vector<double> p{0.3, -0.2, 0.1, 0.4};
  const auto r = nilpotency_order(model_at(build(FamilySpec{dunn}), p), 6, 1e-10);
  ASSERT_TRUE(r.order.has_value());
  EXPECT_EQ(*r.order, 2);
}

TEST(Nilpotency, FiedlerOrderThree) {
  FiedlerParams f{2, Matrix(), "1/2*(u1*u1+u2*u2)"};
  const std::vector<double> p{0.0, 0.0, 0.0, 0.0};
  const auto r = nilpotency_order(model_at(build(FamilySpec{f}), p), 6, 1e-10);
  ASSERT_TRUE(r.order.has_value());
  EXPECT_EQ(*r.order, 3);
}

TEST(Nilpotency, RiemannianModelsAreNotNilpotent) {
  std::mt19937_64 rng(9);
  const auto r = nilpotency_order(block_model(5, {0.7, 2.0}, random_orthogonal(5, rng)), 6, 1e-10);
  EXPECT_FALSE(r.order.has_value());
  EXPECT_EQ(r.max_order, 6);
}

TEST(Nilpotency, RejectsBadBound) {
  EXPECT_THROW(nilpotency_order(round_sphere(3), 0), ModelError);
}

TEST(Decompose, ZeroTensor) {
  std::mt19937_64 rng(10);
  const auto d = decompose(euclidean(Tensor4<double>(4)), rng);
  EXPECT_TRUE(d.planes.empty());
  EXPECT_EQ(d.kernel_basis.cols(), 4);
}

TEST(Decompose, SingleCoordinateBlock) {
  std::mt19937_64 rng(11);
  const ZeroModel m = block_model(4, {3.0});
  const auto d = decompose(m, rng);
  ASSERT_EQ(d.planes.size(), 1u);
  EXPECT_NEAR(d.planes[0].curvature, 3.0, 1e-12);
  // the plane is span{e1, e2}
  for (const Vector* v : {&d.planes[0].first, &d.planes[0].second}) {
    EXPECT_NEAR(v->head(2).norm(), 1.0, 1e-12);
    EXPECT_NEAR(v->tail(2).norm(), 0.0, 1e-12);
  }
  EXPECT_LE(max_abs_difference(reconstruct(d, m.inner()), m.tensor()), 1e-12);
}

TEST(Decompose, ConjugatedTwoBlocks) {
  std::mt19937_64 rng(12);
  const ZeroModel m = block_model(5, {1.0, 2.0}, random_orthogonal(5, rng));
  const auto d = decompose(m, rng);
  auto eig = d.eigencurvatures();
  std::sort(eig.begin(), eig.end());
  ASSERT_EQ(eig.size(), 2u);
  EXPECT_NEAR(eig[0], 1.0, 1e-9);
  EXPECT_NEAR(eig[1], 2.0, 1e-9);
  const auto& a = d.planes[0];
  const auto& b = d.planes[1];
  for (const Vector* u : {&a.first, &a.second})
    for (const Vector* v : {&b.first, &b.second}) EXPECT_NEAR(u->dot(*v), 0.0, 1e-9);
  EXPECT_LE(max_abs_difference(reconstruct(d, m.inner()), m.tensor()), 1e-9);
}

TEST(Decompose, RandomRoundTrips) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> curv(-5.0, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(trial % 9);
    std::vector<double> a(std::min<std::size_t>(m / 2, 1 + trial % 4));
    for (auto& v : a) {
      do v = curv(rng);
      while (std::abs(v) < 0.1);
    }
    const ZeroModel model = block_model(m, a, random_orthogonal(m, rng));
    const auto d = decompose(model, rng);
    auto got = d.eigencurvatures();
    std::sort(got.begin(), got.end());
    std::sort(a.begin(), a.end());
    ASSERT_EQ(got.size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(got[i], a[i], 1e-9);
    EXPECT_LE(max_abs_difference(reconstruct(d, model.inner()), model.tensor()), 1e-9);
  }
}

TEST(Decompose, RejectsIndefiniteAndNonCommuting) {
  std::mt19937_64 rng(14);
  EXPECT_THROW(decompose(round_sphere(4), rng), ModelError);
  DunnParams dunn{1, {{"x1*x1"}}};
  const std::vector<double> p{0.2, 0.0};
  EXPECT_THROW(decompose(model_at(build(FamilySpec{dunn}), p), rng), ModelError);
}

TEST(Decompose, RotationCoefficientProductFormula) {
  std::mt19937_64 rng(15);
  const ZeroModel m = block_model(6, {1.5, -0.75, 2.5}, random_orthogonal(6, rng));
  const auto d = decompose(m, rng);
  ASSERT_EQ(d.planes.size(), 3u);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = random_vector(6, rng), y = random_vector(6, rng);
    const Vector xb = random_vector(6, rng), yb = random_vector(6, rng);
    const Matrix a = curvature_operator(m, x, y).matrix();
    const Matrix b = curvature_operator(m, xb, yb).matrix();
    for (const auto& plane : d.planes) {
      Matrix basis(6, 2);
      basis << plane.first, plane.second;
      const double eps = rotation_coefficient(m, plane, x, y);
      const double epsb = rotation_coefficient(m, plane, xb, yb);
      Matrix j(2, 2);
      j << 0.0, 1.0, -1.0, 0.0;  // e1 -> -e2, e2 -> e1
      const Matrix restricted = basis.transpose() * a * basis;
      EXPECT_LE((restricted - eps * j).cwiseAbs().maxCoeff(), 1e-10);
      const Matrix product = basis.transpose() * a * b * basis;
      EXPECT_LE((product + eps * epsb * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(Signature, CountsNegativeDirections) {
  Matrix g(3, 3);
  g << -2.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  const Signature s = signature_of(g);
  EXPECT_EQ(s.p, 1);
  EXPECT_EQ(s.q, 2);
  EXPECT_THROW(ZeroModel(Matrix::Zero(2, 2), Tensor4<double>(2)), ModelError);
}

}  // namespace
}  // namespace skt

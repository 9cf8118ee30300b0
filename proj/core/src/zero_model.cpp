#include "skt/zero_model.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <functional>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "skt/error.hpp"

namespace skt {

namespace {

template <class M>
Eigen::Matrix<double, Eigen::Dynamic, 1, 0, M::MaxRowsAtCompileTime, 1> equilibrate_impl(const M& symmetric) {
  using V = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, M::MaxRowsAtCompileTime, 1>;
  const Eigen::Index n = symmetric.rows();
  V d = V::Ones(n);
  M a = symmetric;
  V r(n);
  for (int iter = 0; iter < 64; ++iter) {
    bool balanced = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      r[i] = a.row(i).cwiseAbs().maxCoeff();
      if (!(r[i] > 0.0) || !std::isfinite(r[i])) throw ModelError("inner product is degenerate (zero row)");
      if (r[i] < 0.5 || r[i] > 2.0) balanced = false;
    }
    if (balanced) break;
    const V s = r.cwiseSqrt().cwiseInverse();
    d = d.cwiseProduct(s);
    a = s.asDiagonal() * a * s.asDiagonal();
  }
  return d;
}

template <class M>
SymmetricAnalysis analyze_impl(const M& symmetric, double rel_tol, bool with_signature) {
  // Congruence by the balancing diagonal preserves inertia and degeneracy,
  // so rescaled coordinates give the same verdict.
  const auto d = equilibrate_impl(symmetric);
  const M a = d.asDiagonal() * symmetric * d.asDiagonal();
  double hadamard = 1.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) hadamard *= a.row(i).norm();
  const Eigen::PartialPivLU<M> lu(a);
  const double det = lu.determinant();
  if (!(std::abs(det) > rel_tol * hadamard)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", det);
    throw ModelError(std::string("inner product is degenerate (balanced determinant ") + buf + ")");
  }
  SymmetricAnalysis out;
  if (with_signature) {
    const Eigen::SelfAdjointEigenSolver<M> es(a, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) (ev[i] < 0 ? out.signature.p : out.signature.q) += 1;
  }
  const M inv = lu.inverse();
  out.inverse = d.asDiagonal() * inv * d.asDiagonal();
  return out;
}

// Stack storage for the small matrices met in practice.
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;

}  // namespace

Vector equilibrate(const Matrix& symmetric) {
  if (symmetric.rows() <= 8) return equilibrate_impl(SmallMatrix(symmetric));
  return equilibrate_impl(symmetric);
}

SymmetricAnalysis analyze_symmetric(const Matrix& symmetric, double rel_tol, bool with_signature) {
  if (symmetric.rows() <= 8) return analyze_impl(SmallMatrix(symmetric), rel_tol, with_signature);
  return analyze_impl(symmetric, rel_tol, with_signature);
}

Signature signature_of(const Matrix& symmetric, double rel_tol) { return analyze_symmetric(symmetric, rel_tol).signature; }

Matrix symmetric_inverse(const Matrix& symmetric) { return analyze_symmetric(symmetric).inverse; }

ZeroModel::ZeroModel(Matrix inner, Tensor4<double> tensor)
    : inner_(std::move(inner)), tensor_(std::move(tensor)) {
  const auto m = static_cast<Eigen::Index>(tensor_.dim());
  if (m < 1) throw ModelError("model dimension must be at least 1");
  if (inner_.rows() != m || inner_.cols() != m) {
    throw ModelError("inner product is " + std::to_string(inner_.rows()) + "x" +
                     std::to_string(inner_.cols()) + " but tensor dimension is " + std::to_string(m));
  }
  const double asym = (inner_ - inner_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, inner_.cwiseAbs().maxCoeff())) {
    throw ModelError("inner product matrix is not symmetric");
  }
  SymmetricAnalysis a = analyze_symmetric(inner_);
  signature_ = a.signature;
  inner_inverse_ = std::move(a.inverse);
}

double ZeroModel::evaluate(const Vector& x, const Vector& y, const Vector& z, const Vector& w) const {
  const std::size_t m = dim();
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (x[i] == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      if (y[j] == 0.0) continue;
      for (std::size_t k = 0; k < m; ++k) {
        if (z[k] == 0.0) continue;
        double inner = 0.0;
        for (std::size_t l = 0; l < m; ++l) inner += tensor_(i, j, k, l) * w[l];
        sum += x[i] * y[j] * z[k] * inner;
      }
    }
  }
  return sum;
}

double scaled_tolerance(const ZeroModel& model, double tol, int degree) {
  return tol * std::pow(std::max(1.0, model.max_norm()), degree);
}

SymmetryReport check_symmetries(const ZeroModel& model, double tol) {
  const auto& a = model.tensor();
  const std::size_t m = model.dim();
  SymmetryReport r;
  auto note = [&r](double v, const char* kind, std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    if (v > r.worst) {
      r.worst = v;
      r.worst_kind = kind;
      r.worst_index = {static_cast<int>(i), static_cast<int>(j), static_cast<int>(k), static_cast<int>(l)};
    }
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) {
          const double v = a(i, j, k, l);
          note(std::abs(v - a(k, l, i, j)), "pair", i, j, k, l);
          note(std::abs(v + a(j, i, k, l)), "antisymmetry", i, j, k, l);
          note(std::abs(v + a(i, j, l, k)), "antisymmetry", i, j, k, l);
          note(std::abs(v + a(j, k, i, l) + a(k, i, j, l)), "bianchi", i, j, k, l);
        }
  r.pass = r.worst <= tol;
  return r;
}

double SkewOperator::skew_adjoint_defect(const Matrix& inner) const {
  const Matrix gm = inner * matrix_;
  return (gm + gm.transpose()).cwiseAbs().maxCoeff();
}

SkewOperator curvature_operator(const ZeroModel& model, const Vector& x, const Vector& y) {
  const std::size_t m = model.dim();
  if (static_cast<std::size_t>(x.size()) != m || static_cast<std::size_t>(y.size()) != m) {
    throw ModelError("curvature_operator: vector length does not match model dimension");
  }
  const auto& a = model.tensor();
  // lowered(z, w) = A(x, y, z, w)
  Matrix lowered = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    if (x[i] == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      const double c = x[i] * y[j];
      if (c == 0.0) continue;
      for (std::size_t z = 0; z < m; ++z)
        for (std::size_t w = 0; w < m; ++w) lowered(z, w) += c * a(i, j, z, w);
    }
  }
  // M(k, z) = sum_w ginv(k, w) lowered(z, w)
  return SkewOperator(model.inner_inverse() * lowered.transpose());
}

SkewOperator basis_curvature_operator(const ZeroModel& model, std::size_t i, std::size_t j) {
  const auto m = static_cast<Eigen::Index>(model.dim());
  return curvature_operator(model, Vector::Unit(m, static_cast<Eigen::Index>(i)),
                            Vector::Unit(m, static_cast<Eigen::Index>(j)));
}

namespace {

struct IndexedOperator {
  int i;
  int j;
  Matrix matrix;
};

std::vector<IndexedOperator> basis_operators(const ZeroModel& model) {
  std::vector<IndexedOperator> ops;
  const int m = static_cast<int>(model.dim());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      ops.push_back({i, j, basis_curvature_operator(model, static_cast<std::size_t>(i), static_cast<std::size_t>(j)).matrix()});
  return ops;
}

}  // namespace

CommutatorReport is_skew_tsankov(const ZeroModel& model, double tol) {
  const auto ops = basis_operators(model);
  CommutatorReport r;
  r.threshold = scaled_tolerance(model, tol, 2);
  for (std::size_t a = 0; a < ops.size(); ++a) {
    for (std::size_t b = a + 1; b < ops.size(); ++b) {
      const double norm = (ops[a].matrix * ops[b].matrix - ops[b].matrix * ops[a].matrix).norm();
      if (norm > r.worst_norm) {
        r.worst_norm = norm;
        r.worst_pairs = {ops[a].i, ops[a].j, ops[b].i, ops[b].j};
      }
    }
  }
  r.pass = r.worst_norm <= r.threshold;
  return r;
}

NilpotencyReport nilpotency_order(const ZeroModel& model, int max_order, double tol) {
  if (max_order < 1) throw ModelError("nilpotency_order: max_order must be at least 1");
  const auto ops = basis_operators(model);
  const auto m = static_cast<Eigen::Index>(model.dim());
  NilpotencyReport r;
  r.max_order = max_order;

  // Representatives of the span of the previous level's products; products of
  // length 0 are spanned by the identity.
  std::vector<Matrix> reps{Matrix::Identity(m, m)};
  for (int n = 1; n <= max_order; ++n) {
    const double threshold = scaled_tolerance(model, tol, n);
    std::vector<Matrix> next;
    std::vector<Matrix> orthonormal;  // Gram-Schmidt copies of `next`, vectorised
    double level_max = 0.0;
    for (const auto& op : ops) {
      for (const auto& rep : reps) {
        Matrix product = op.matrix * rep;
        const double norm = product.norm();
        level_max = std::max(level_max, norm);
        if (norm <= threshold || static_cast<Eigen::Index>(next.size()) >= m * m) continue;
        Matrix residual = product;
        for (const auto& q : orthonormal) residual -= (q.cwiseProduct(residual).sum()) * q;
        const double rn = residual.norm();
        if (rn > threshold) {
          next.push_back(product);
          orthonormal.push_back(residual / rn);
        }
      }
    }
    r.level_norms.push_back(level_max);
    if (level_max <= threshold) {
      r.order = n;
      return r;
    }
    reps = std::move(next);
  }
  return r;
}

std::vector<double> BlockDecomposition::eigencurvatures() const {
  std::vector<double> out;
  out.reserve(planes.size());
  for (const auto& p : planes) out.push_back(p.curvature);
  return out;
}

namespace {

class Decomposer {
 public:
  Decomposer(const ZeroModel& model, std::mt19937_64& rng, const DecomposeOptions& opts)
      : model_(model), rng_(rng), opts_(opts) {
    const auto m = static_cast<Eigen::Index>(model.dim());
    Eigen::LLT<Matrix> llt(model.inner());
    const Matrix lower = llt.matrixL();
    // frame_ columns are orthonormal for the inner product.
    frame_ = lower.transpose().triangularView<Eigen::Upper>().solve(Matrix::Identity(m, m));
    const Matrix frame_inv = lower.transpose();
    for (const auto& op : basis_operators(model)) {
      Matrix t = frame_inv * op.matrix * frame_;
      ops_.push_back(0.5 * (t - t.transpose()));
    }
    op_tol_ = scaled_tolerance(model, opts.tol, 1);
  }

  BlockDecomposition run() {
    const auto m = static_cast<Eigen::Index>(model_.dim());
    split(Matrix::Identity(m, m));
    BlockDecomposition out;
    for (const auto& plane_basis : planes_) {
      CurvaturePlane p;
      p.first = normalize_sign(frame_ * plane_basis.col(0));
      p.second = normalize_sign(frame_ * plane_basis.col(1));
      p.curvature = model_.evaluate(p.first, p.second, p.second, p.first);
      if (std::abs(p.curvature) <= op_tol_) {
        kernel_.push_back(plane_basis.col(0));
        kernel_.push_back(plane_basis.col(1));
        continue;
      }
      out.planes.push_back(std::move(p));
    }
    std::sort(out.planes.begin(), out.planes.end(),
              [](const CurvaturePlane& a, const CurvaturePlane& b) { return a.curvature > b.curvature; });
    out.kernel_basis = Matrix(m, static_cast<Eigen::Index>(kernel_.size()));
    for (std::size_t c = 0; c < kernel_.size(); ++c) {
      out.kernel_basis.col(static_cast<Eigen::Index>(c)) = frame_ * kernel_[c];
    }
    return out;
  }

 private:
  static Vector normalize_sign(Vector v) {
    Eigen::Index idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    if (v[idx] < 0) v = -v;
    return v;
  }

  // Q: orthonormal columns (frame coordinates) spanning a subspace invariant
  // under every operator.
  void split(const Matrix& q) {
    const Eigen::Index d = q.cols();
    std::vector<Matrix> restricted;
    double largest = 0.0;
    for (const auto& op : ops_) {
      restricted.push_back(q.transpose() * op * q);
      largest = std::max(largest, restricted.back().norm());
    }
    if (largest <= op_tol_) {
      for (Eigen::Index c = 0; c < d; ++c) kernel_.push_back(q.col(c));
      return;
    }
    std::normal_distribution<double> gauss;
    for (int attempt = 0; attempt <= opts_.max_retries; ++attempt) {
      Matrix t = Matrix::Zero(d, d);
      for (const auto& r : restricted) t += gauss(rng_) * r;
      const Matrix s = t * t;
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
      const Vector& ev = es.eigenvalues();
      const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
      const double cluster_tol = 1e-7 * scale;

      std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;  // [begin, end)
      Eigen::Index begin = 0;
      for (Eigen::Index i = 1; i <= d; ++i) {
        if (i == d || ev[i] - ev[i - 1] > cluster_tol) {
          clusters.emplace_back(begin, i);
          begin = i;
        }
      }
      if (clusters.size() > 1) {
        for (auto [b, e] : clusters) {
          Matrix sub = q * es.eigenvectors().middleCols(b, e - b);
          split(orthonormalize(sub));
        }
        return;
      }
      if (d == 2 && std::abs(ev[0]) > cluster_tol) {
        verify_plane(q);
        planes_.push_back(q);
        return;
      }
      // A single cluster: this combination did not separate the subspace.
    }
    throw ModelError("decompose: degenerate curvature eigenspace unresolved after " +
                     std::to_string(opts_.max_retries) + " retries");
  }

  static Matrix orthonormalize(const Matrix& a) {
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  }

  void verify_plane(const Matrix& q) const {
    for (const auto& op : ops_) {
      const Matrix image = op * q;
      const Matrix block = q.transpose() * image;
      const double leak = (image - q * block).norm();
      const double diag = std::max(std::abs(block(0, 0)), std::abs(block(1, 1)));
      if (leak > op_tol_ * 10 || diag > op_tol_ * 10 || std::abs(block(0, 1) + block(1, 0)) > op_tol_ * 10) {
        throw ModelError("decompose: an operator does not act on a recovered plane as a rotation");
      }
    }
  }

  const ZeroModel& model_;
  std::mt19937_64& rng_;
  DecomposeOptions opts_;
  Matrix frame_;
  std::vector<Matrix> ops_;
  double op_tol_ = 0.0;
  std::vector<Matrix> planes_;
  std::vector<Vector> kernel_;
};

}  // namespace

BlockDecomposition decompose(const ZeroModel& model, std::mt19937_64& rng, const DecomposeOptions& opts) {
  if (!model.signature().riemannian()) {
    throw ModelError("decompose: only Riemannian (positive definite) models are supported");
  }
  const SymmetryReport sym = check_symmetries(model, scaled_tolerance(model, opts.tol, 1));
  if (!sym.pass) {
    throw ModelError("decompose: tensor violates the " + sym.worst_kind + " symmetry (violation " +
                     std::to_string(sym.worst) + ")");
  }
  const CommutatorReport comm = is_skew_tsankov(model, opts.tol);
  if (!comm.pass) {
    throw ModelError("decompose: curvature operators do not commute (worst commutator norm " +
                     std::to_string(comm.worst_norm) + ")");
  }
  return Decomposer(model, rng, opts).run();
}

Tensor4<double> reconstruct(const BlockDecomposition& blocks, const Matrix& inner) {
  const auto m = static_cast<std::size_t>(inner.rows());
  Tensor4<double> a(m, 0.0);
  for (const auto& p : blocks.planes) {
    const Vector t1 = inner * p.first;
    const Vector t2 = inner * p.second;
    Matrix omega = t1 * t2.transpose() - t2 * t1.transpose();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const double oij = omega(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (oij == 0.0) continue;
        for (std::size_t k = 0; k < m; ++k)
          for (std::size_t l = 0; l < m; ++l)
            a(i, j, k, l) += p.curvature * oij * omega(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k));
      }
  }
  return a;
}

double rotation_coefficient(const ZeroModel& model, const CurvaturePlane& plane, const Vector& x, const Vector& y) {
  const SkewOperator op = curvature_operator(model, x, y);
  return plane.first.dot(model.inner() * op.apply(plane.second));
}

ZeroModel block_model(std::size_t m, const std::vector<double>& curvatures, const Matrix& rotation) {
  if (2 * curvatures.size() > m) throw ModelError("block_model: too many blocks for dimension");
  const auto md = static_cast<Eigen::Index>(m);
  const Matrix rot = rotation.size() == 0 ? Matrix::Identity(md, md) : rotation;
  BlockDecomposition blocks;
  for (std::size_t b = 0; b < curvatures.size(); ++b) {
    CurvaturePlane p;
    p.first = rot.col(static_cast<Eigen::Index>(2 * b));
    p.second = rot.col(static_cast<Eigen::Index>(2 * b + 1));
    p.curvature = curvatures[b];
    blocks.planes.push_back(p);
  }
  const Matrix identity = Matrix::Identity(md, md);
  return ZeroModel(identity, reconstruct(blocks, identity));
}

}  // namespace skt

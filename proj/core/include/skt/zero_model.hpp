#pragma once

// Algebraic curvature models (V, <.,.>, A) and the pointwise checks run on
// them: curvature symmetries, commutativity of the skew-symmetric curvature
// operators, nilpotency order, and the orthogonal two-plane block
// decomposition of commuting Riemannian curvature tensors.

#include <array>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "skt/tensor.hpp"

namespace skt {

/// Counts of negative (p) and positive (q) directions of a metric form.
struct Signature {
  int p = 0;
  int q = 0;

  int dimension() const { return p + q; }
  bool riemannian() const { return p == 0; }
  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Diagonal d such that diag(d) S diag(d) has row maxima near 1. Throws
/// ModelError on a zero row.
Vector equilibrate(const Matrix& symmetric);

/// Signature of a symmetric matrix; throws ModelError when, after
/// equilibration, |det| is at most `rel_tol` times the product of the row
/// norms.
Signature signature_of(const Matrix& symmetric, double rel_tol = 1e-12);

/// Inverse computed on the equilibrated matrix; throws like signature_of.
Matrix symmetric_inverse(const Matrix& symmetric);

struct SymmetricAnalysis {
  Signature signature;
  Matrix inverse;
};

/// signature_of and symmetric_inverse from a single factorisation.
/// Without `with_signature` the signature is left as (0,0) and only the
/// degeneracy test and inverse are computed.
SymmetricAnalysis analyze_symmetric(const Matrix& symmetric, double rel_tol = 1e-12, bool with_signature = true);

inline constexpr double kDefaultTolerance = 1e-10;

/// Inner product Gram matrix plus a 4-index tensor A[i][j][k][l]. The
/// constructor validates shapes, symmetry and non-degeneracy of the inner
/// product; the curvature symmetries of A are checked separately.
class ZeroModel {
 public:
  ZeroModel(Matrix inner, Tensor4<double> tensor);

  std::size_t dim() const { return tensor_.dim(); }
  const Matrix& inner() const { return inner_; }
  const Matrix& inner_inverse() const { return inner_inverse_; }
  const Tensor4<double>& tensor() const { return tensor_; }
  Signature signature() const { return signature_; }

  /// Largest |A[i][j][k][l]|.
  double max_norm() const { return max_abs(tensor_); }

  /// A(x, y, z, w) for arbitrary vectors.
  double evaluate(const Vector& x, const Vector& y, const Vector& z, const Vector& w) const;

 private:
  Matrix inner_;
  Matrix inner_inverse_;
  Tensor4<double> tensor_;
  Signature signature_;
};

/// Absolute tolerance for a quantity homogeneous of `degree` in A: the base
/// tolerance scaled by max(1, max|A|)^degree.
double scaled_tolerance(const ZeroModel& model, double tol, int degree);

struct SymmetryReport {
  bool pass = true;
  double worst = 0.0;            // largest violation over all index tuples
  std::string worst_kind;        // "pair", "antisymmetry" or "bianchi"
  std::array<int, 4> worst_index{};
};

/// Pair symmetry, antisymmetry in each pair, and the first Bianchi identity.
SymmetryReport check_symmetries(const ZeroModel& model, double tol = kDefaultTolerance);

/// The skew-adjoint operator A(x,y) with <A(x,y)z, w> = A(x,y,z,w).
class SkewOperator {
 public:
  explicit SkewOperator(Matrix matrix) : matrix_(std::move(matrix)) {}

  const Matrix& matrix() const { return matrix_; }
  Vector apply(const Vector& z) const { return matrix_ * z; }

  /// max |(G M) + (G M)^T|, zero for an operator skew-adjoint w.r.t. G.
  double skew_adjoint_defect(const Matrix& inner) const;

 private:
  Matrix matrix_;
};

SkewOperator curvature_operator(const ZeroModel& model, const Vector& x, const Vector& y);

/// A(e_i, e_j) for basis vectors.
SkewOperator basis_curvature_operator(const ZeroModel& model, std::size_t i, std::size_t j);

struct CommutatorReport {
  bool pass = true;
  double worst_norm = 0.0;  // max Frobenius norm of [A(e_i,e_j), A(e_k,e_l)]
  double threshold = 0.0;   // absolute threshold actually applied
  std::array<int, 4> worst_pairs{};
};

/// Checks that all curvature operators commute. Bilinearity reduces this to
/// the basis pairs i<j, k<l.
CommutatorReport is_skew_tsankov(const ZeroModel& model, double tol = kDefaultTolerance);

struct NilpotencyReport {
  std::optional<int> order;          // empty: not nilpotent within max_order
  int max_order = 0;
  std::vector<double> level_norms;   // max norm of products of length 1, 2, ...
};

/// Smallest n <= max_order such that every product of n curvature operators
/// vanishes. Products are built level by level over basis operators, keeping
/// a spanning subset of the previous level.
NilpotencyReport nilpotency_order(const ZeroModel& model, int max_order = 6,
                                  double tol = kDefaultTolerance);

/// One invariant two-plane with an orthonormal basis and its curvature
/// a = A(first, second, second, first).
struct CurvaturePlane {
  Vector first;
  Vector second;
  double curvature = 0.0;
};

struct BlockDecomposition {
  std::vector<CurvaturePlane> planes;
  Matrix kernel_basis;  // columns: orthonormal basis of the flat complement

  std::vector<double> eigencurvatures() const;
};

struct DecomposeOptions {
  double tol = kDefaultTolerance;
  int max_retries = 8;
};

/// Simultaneously skew-diagonalises the curvature operators of a Riemannian
/// skew-Tsankov model. Random operator combinations are drawn from `rng`.
/// Throws ModelError for indefinite signatures, symmetry violations, failed
/// commutativity, or degeneracy unresolved after max_retries.
BlockDecomposition decompose(const ZeroModel& model, std::mt19937_64& rng, const DecomposeOptions& opts = {});

/// Sum over planes of a_i * w_i (x) w_i with the pair orientation that makes
/// A(e1, e2, e2, e1) = a_i.
Tensor4<double> reconstruct(const BlockDecomposition& blocks, const Matrix& inner);

/// epsilon_i(x, y): the rotation coefficient of A(x,y) on a plane, so that
/// A(x,y) e1 = -eps e2 and A(x,y) e2 = eps e1.
double rotation_coefficient(const ZeroModel& model, const CurvaturePlane& plane, const Vector& x,
                            const Vector& y);

/// Builds the model sum_i a_i e_i^1 ^ e_i^2 on R^m with the Euclidean inner
/// product, using the coordinate planes (0,1), (2,3), ... then conjugated by
/// `rotation` (an orthogonal matrix; identity if empty).
ZeroModel block_model(std::size_t m, const std::vector<double>& curvatures, const Matrix& rotation = Matrix());

}  // namespace skt

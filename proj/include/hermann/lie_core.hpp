#pragma once

// Matrix Lie algebra substrate: so(n) with Killing-orthonormal coordinates,
// conjugation involutions, eigenspace splittings, the matrix exponential and
// the Cartan embedding of M = G/K used by the numerical oracles.
//
// Sign conventions: the bracket is the matrix commutator XY - YX. Viewed as
// Killing fields on M this is the negative of the vector-field bracket, so
// the curvature at the origin reads R(X,Y)Z = -[[X,Y],Z] for X, Y, Z in m.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "hermann/config.hpp"
#include "hermann/errors.hpp"
#include "hermann/linalg.hpp"

namespace hermann {

/// Lie bracket of two algebra elements (matrix commutator).
inline Mat bracket(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != x.cols())
    throw InputError("bracket: dimension mismatch");
  return x * y - y * x;
}

/// Relative skew-symmetry defect ‖X + Xᵀ‖ / max(1, ‖X‖).
inline double skew_defect(const Mat& x) {
  return (x + x.transpose()).norm() / std::max(1.0, x.norm());
}

/// exp(tX) by scaling-and-squaring with a degree-13 Padé approximant.
inline Mat mat_exp(const Mat& x, double t = 1.0) {
  if (x.rows() != x.cols()) throw InputError("mat_exp: matrix is not square");
  Mat scaled = t * x;
  return scaled.exp();
}

/// exp(tX) for skew X via the real Schur form (block-rotation
/// decomposition). Used as an independent cross-check of mat_exp.
inline Mat mat_exp_skew_eig(const Mat& x, double t = 1.0) {
  Mat s = 0.5 * (x - x.transpose()) * t;
  Eigen::RealSchur<Mat> schur(s);
  const Mat& tri = schur.matrixT();
  const Mat& u = schur.matrixU();
  const Eigen::Index n = s.rows();
  Mat block = Mat::Identity(n, n);
  for (Eigen::Index i = 0; i < n;) {
    if (i + 1 < n && std::abs(tri(i + 1, i)) > 0.0) {
      // Normal matrix: the 2x2 block is [[a, b], [-b, a]] with a ≈ 0.
      const double a = 0.5 * (tri(i, i) + tri(i + 1, i + 1));
      const double b = 0.5 * (tri(i, i + 1) - tri(i + 1, i));
      const double e = std::exp(a);
      block(i, i) = e * std::cos(b);
      block(i, i + 1) = e * std::sin(b);
      block(i + 1, i) = -e * std::sin(b);
      block(i + 1, i + 1) = e * std::cos(b);
      i += 2;
    } else {
      block(i, i) = std::exp(tri(i, i));
      i += 1;
    }
  }
  return u * block * u.transpose();
}

/// so(n) presented by the matrices R_ij = E_ij - E_ji (i < j), with
/// coordinates orthonormalised for the Killing inner product -B(X, Y).
/// The Killing form is computed from adjoint matrices, never from the
/// (n-2) tr(XY) shortcut.
class Algebra {
 public:
  static Algebra so(int n) {
    if (n < 3) throw InputError("so(n) requires n >= 3 for a semisimple algebra");
    Algebra a;
    a.n_ = n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Mat r = Mat::Zero(n, n);
        r(i, j) = 1.0;
        r(j, i) = -1.0;
        a.raw_.push_back(std::move(r));
        a.index_.emplace_back(i, j);
      }
    a.finish();
    return a;
  }

  int matrix_size() const { return n_; }
  int dim() const { return static_cast<int>(raw_.size()); }

  /// Killing-orthonormal basis matrices.
  const std::vector<Mat>& basis() const { return basis_; }
  const std::vector<Mat>& raw_basis() const { return raw_; }

  /// Killing-orthonormal coordinates of X (X must lie in the algebra).
  Vec coords(const Mat& x) const { return to_orth_ * raw_coords(x); }

  Mat element(const Vec& z) const {
    Vec r = from_orth_ * z;
    Mat x = Mat::Zero(n_, n_);
    for (int k = 0; k < dim(); ++k) x += r(k) * raw_[k];
    return x;
  }

  /// Columns of `cols` (coordinates) as matrices.
  std::vector<Mat> elements(const Mat& cols) const {
    std::vector<Mat> out;
    out.reserve(static_cast<size_t>(cols.cols()));
    for (Eigen::Index c = 0; c < cols.cols(); ++c) out.push_back(element(cols.col(c)));
    return out;
  }

  /// ad_X in raw coordinates.
  Mat ad_raw(const Mat& x) const {
    Mat a(dim(), dim());
    for (int k = 0; k < dim(); ++k) a.col(k) = raw_coords(x * raw_[k] - raw_[k] * x);
    return a;
  }

  /// ad_X in Killing-orthonormal coordinates (a skew-symmetric matrix).
  Mat ad(const Mat& x) const { return to_orth_ * ad_raw(x) * from_orth_; }

  /// -trace(ad_X ∘ ad_Y).
  double killing_inner(const Mat& x, const Mat& y) const {
    if (x.rows() != n_ || y.rows() != n_) throw InputError("killing_inner: dimension mismatch");
    return -(ad_raw(x) * ad_raw(y)).trace();
  }

  /// Coordinates of the bracket of two coordinate vectors.
  Vec bracket_coords(const Vec& a, const Vec& b) const {
    return coords(bracket(element(a), element(b)));
  }

 private:
  Vec raw_coords(const Mat& x) const {
    Vec r(dim());
    for (int k = 0; k < dim(); ++k) r(k) = 0.5 * (x(index_[k].first, index_[k].second) -
                                                  x(index_[k].second, index_[k].first));
    return r;
  }

  void finish() {
    const int d = dim();
    std::vector<Mat> ads;
    ads.reserve(static_cast<size_t>(d));
    for (const auto& r : raw_) ads.push_back(ad_raw(r));
    Mat gram(d, d);
    for (int k = 0; k < d; ++k)
      for (int l = k; l < d; ++l) gram(k, l) = gram(l, k) = -(ads[k] * ads[l]).trace();
    Eigen::LLT<Mat> llt(gram);
    if (llt.info() != Eigen::Success) throw DegenerateError("Killing form is degenerate (non-semisimple input)");
    Mat lower = llt.matrixL();
    to_orth_ = lower.transpose();
    from_orth_ = to_orth_.inverse();
    gram_ = gram;
    basis_.clear();
    for (int k = 0; k < d; ++k) basis_.push_back(element(Vec::Unit(d, k)));
  }

  int n_ = 0;
  std::vector<Mat> raw_;
  std::vector<std::pair<int, int>> index_;
  std::vector<Mat> basis_;
  Mat gram_, to_orth_, from_orth_;
};

/// Conjugation involution X ↦ C X C⁻¹ by an orthogonal matrix C.
struct Involution {
  Mat conjugator;

  Mat apply(const Mat& x) const { return conjugator * x * conjugator.transpose(); }

  /// Matrix of the involution in Killing-orthonormal coordinates.
  Mat coords_matrix(const Algebra& alg) const {
    Mat s(alg.dim(), alg.dim());
    for (int k = 0; k < alg.dim(); ++k) s.col(k) = alg.coords(apply(alg.basis()[k]));
    return s;
  }

  /// Checks orthogonality of C, σ² = id and σ[X,Y] = [σX,σY] on basis pairs.
  /// Returns the largest residual; throws InputError above `tol`.
  double validate(const Algebra& alg, double tol = 1e-10) const {
    const int n = alg.matrix_size();
    if (conjugator.rows() != n || conjugator.cols() != n)
      throw InputError("involution: conjugator has wrong size");
    double worst = (conjugator * conjugator.transpose() - Mat::Identity(n, n)).norm();
    if (worst > tol) throw InputError("involution: conjugator is not orthogonal");
    const auto& b = alg.basis();
    for (const auto& x : b) worst = std::max(worst, (apply(apply(x)) - x).norm());
    if (worst > tol) throw InputError("involution: map is not involutive");
    for (size_t i = 0; i < b.size(); ++i)
      for (size_t j = i + 1; j < b.size(); ++j) {
        const double r = (apply(bracket(b[i], b[j])) - bracket(apply(b[i]), apply(b[j]))).norm();
        worst = std::max(worst, r);
      }
    if (worst > tol) throw InputError("involution: bracket not preserved");
    return worst;
  }
};

/// Killing-orthonormal bases of the +1 and -1 eigenspaces of `inv` on the
/// span of `basis` (orthonormal coordinate columns).
inline std::pair<Mat, Mat> split_eigenspaces(const Algebra& alg, const Involution& inv, const Mat& basis,
                                             double tol = 1e-9) {
  if (basis.cols() == 0) return {basis, basis};
  const Mat s = inv.coords_matrix(alg);
  const Mat image = s * basis;
  const Mat restricted = basis.transpose() * image;
  const double leak = (image - basis * restricted).norm();
  if (leak > tol * std::max(1.0, image.norm()))
    throw InputError("split_eigenspaces: span is not invariant under the involution");
  const Eigen::Index k = basis.cols();
  if ((restricted * restricted - Mat::Identity(k, k)).norm() > tol * std::max<double>(1.0, static_cast<double>(k)))
    throw InputError("split_eigenspaces: map is not involutive on the span");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (restricted + restricted.transpose()));
  std::vector<Eigen::Index> plus, minus;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double ev = es.eigenvalues()(i);
    if (std::abs(ev - 1.0) < 1e-6)
      plus.push_back(i);
    else if (std::abs(ev + 1.0) < 1e-6)
      minus.push_back(i);
    else
      throw InputError("split_eigenspaces: eigenvalue " + std::to_string(ev) + " is not ±1");
  }
  Mat p(basis.rows(), static_cast<Eigen::Index>(plus.size()));
  Mat m(basis.rows(), static_cast<Eigen::Index>(minus.size()));
  for (size_t i = 0; i < plus.size(); ++i) p.col(static_cast<Eigen::Index>(i)) = basis * es.eigenvectors().col(plus[i]);
  for (size_t i = 0; i < minus.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = basis * es.eigenvectors().col(minus[i]);
  return {p, m};
}

/// Convenience overload on a list of algebra elements.
inline std::pair<Mat, Mat> split_eigenspaces(const Algebra& alg, const Involution& inv,
                                             const std::vector<Mat>& elements, double tol = 1e-9) {
  Mat cols(alg.dim(), static_cast<Eigen::Index>(elements.size()));
  for (size_t i = 0; i < elements.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = alg.coords(elements[i]);
  return split_eigenspaces(alg, inv, linalg::orthonormalize(cols, tol), tol);
}

/// Bases (Killing-orthonormal coordinate columns) of the Cartan
/// decompositions g = k ⊕ m (σ₁) and g = h ⊕ p (σ₂) and their intersections.
struct TriadDecomposition {
  Mat g, k, m, h, p;
  Mat kp, kh, mh, mp;
  bool commuting = false;
  double commutator_norm = 0.0;  ///< ‖σ₁σ₂ - σ₂σ₁‖ in coordinates
};

inline TriadDecomposition decompose(const Algebra& alg, const Involution& s1, const Involution& s2,
                                    const Tolerances& tol = {}) {
  TriadDecomposition d;
  const int dim = alg.dim();
  d.g = Mat::Identity(dim, dim);
  std::tie(d.k, d.m) = split_eigenspaces(alg, s1, d.g, tol.subspace);
  std::tie(d.h, d.p) = split_eigenspaces(alg, s2, d.g, tol.subspace);
  const Mat c1 = s1.coords_matrix(alg);
  const Mat c2 = s2.coords_matrix(alg);
  d.commutator_norm = (c1 * c2 - c2 * c1).norm();
  d.commuting = d.commutator_norm < 1e-12 * dim;
  if (d.commuting) {
    std::tie(d.kh, d.kp) = split_eigenspaces(alg, s2, d.k, tol.subspace);
    std::tie(d.mh, d.mp) = split_eigenspaces(alg, s2, d.m, tol.subspace);
  } else {
    d.kh = linalg::intersect(d.k, d.h, tol.subspace);
    d.kp = linalg::intersect(d.k, d.p, tol.subspace);
    d.mh = linalg::intersect(d.m, d.h, tol.subspace);
    d.mp = linalg::intersect(d.m, d.p, tol.subspace);
  }
  return d;
}

/// A point of M = G/K in its Cartan embedding gK ↦ g Θ(g)⁻¹, where Θ is
/// conjugation by the σ₁ conjugator C.
struct SpacePoint {
  Mat cartan_image;
};

/// Concrete model of M: Cartan embedding data plus the calibrated constant
/// relating the ambient Frobenius metric to the Killing metric.
class CartanModel {
 public:
  CartanModel() = default;
  CartanModel(const Algebra& alg, const Involution& s1, const Mat& m_basis) : c_(s1.conjugator) {
    // ‖X(p₀)‖²_F = κ ⟨X, X⟩ for X ∈ m; fitted on the basis and cross terms.
    const auto ms = alg.elements(m_basis);
    const SpacePoint o = origin();
    double num = 0.0, den = 0.0;
    std::vector<Mat> vals;
    for (const auto& x : ms) vals.push_back(killing_field_value(x, o));
    for (size_t i = 0; i < ms.size(); ++i) {
      num += vals[i].squaredNorm();
      den += 1.0;
    }
    kappa_ = ms.empty() ? 1.0 : num / den;
    defect_ = 0.0;
    for (size_t i = 0; i < ms.size(); ++i)
      for (size_t j = 0; j < ms.size(); ++j) {
        const double ambient = (vals[i].array() * vals[j].array()).sum();
        const double expect = (i == j) ? kappa_ : 0.0;
        defect_ = std::max(defect_, std::abs(ambient - expect) / kappa_);
      }
  }

  const Mat& conjugator() const { return c_; }
  double kappa() const { return kappa_; }
  double calibration_defect() const { return defect_; }

  SpacePoint origin() const { return {Mat::Identity(c_.rows(), c_.cols())}; }

  SpacePoint from_group(const Mat& g) const { return {g * c_ * g.transpose() * c_.transpose()}; }

  /// Exp(w) = exp(w)·p₀ for w ∈ m.
  SpacePoint exp_point(const Mat& w) const { return from_group(mat_exp(w)); }

  SpacePoint act(const Mat& g, const SpacePoint& x) const {
    return {g * x.cartan_image * c_ * g.transpose() * c_.transpose()};
  }

  /// Linear action of g on ambient tangent vectors at any point.
  Mat push(const Mat& g, const Mat& v) const { return g * v * c_ * g.transpose() * c_.transpose(); }

  /// d/ds|₀ of the Cartan image of exp(sX)·x.
  Mat killing_field_value(const Mat& x, const SpacePoint& p) const {
    return x * p.cartan_image - p.cartan_image * c_ * x * c_.transpose();
  }

  /// Orthogonality defect and twisted-symmetry defect σ₁(x) = x⁻¹.
  double point_defect(const SpacePoint& p) const {
    const Mat& x = p.cartan_image;
    const Eigen::Index n = x.rows();
    const double orth = (x * x.transpose() - Mat::Identity(n, n)).norm();
    const double twist = (c_ * x * c_.transpose() - x.transpose()).norm();
    return std::max(orth, twist);
  }

 private:
  Mat c_;
  double kappa_ = 1.0;
  double defect_ = 0.0;
};

}  // namespace hermann

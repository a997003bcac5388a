#pragma once

// Dense subspace utilities. A subspace is stored as a matrix whose columns
// form an orthonormal basis in the Euclidean structure of the ambient
// coordinates (for Lie-algebra coordinates this is the Killing inner product).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace hermann {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace linalg {

/// Orthonormal basis of the column span of `a`. Singular values below
/// `rel_tol * max(1, sigma_max)` are dropped.
inline Mat orthonormalize(const Mat& a, double rel_tol = 1e-9) {
  if (a.cols() == 0) return Mat(a.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  const double cutoff = rel_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of ker(a) (right null space).
inline Mat null_space(const Mat& a, double rel_tol = 1e-9) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  const double cutoff = rel_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  return svd.matrixV().rightCols(n - r);
}

inline Eigen::Index numeric_rank(const Mat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
  return r;
}

/// Orthonormal basis of span(a) ∩ span(b); both inputs orthonormal.
inline Mat intersect(const Mat& a, const Mat& b, double rel_tol = 1e-9) {
  if (a.cols() == 0 || b.cols() == 0) return Mat(a.rows(), 0);
  // x ∈ span(a) lies in span(b) iff (I - b bᵀ) a c = 0.
  Mat residual = a - b * (b.transpose() * a);
  Mat c = null_space(residual, rel_tol);
  return orthonormalize(a * c, rel_tol);
}

/// Orthogonal complement of span(sub) inside span(whole); both orthonormal.
inline Mat complement(const Mat& whole, const Mat& sub, double rel_tol = 1e-9) {
  if (sub.cols() == 0) return whole;
  Mat projected = whole - sub * (sub.transpose() * whole);
  return orthonormalize(projected, rel_tol);
}

inline Mat hstack(const std::vector<Mat>& blocks, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  Mat out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    if (b.cols() == 0) continue;
    out.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

/// Largest principal-angle sine between two subspaces of equal dimension;
/// returns 1 when the dimensions differ.
inline double subspace_distance(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) return 1.0;
  if (a.cols() == 0) return 0.0;
  Mat residual = a - b * (b.transpose() * a);
  return residual.norm() / std::sqrt(static_cast<double>(a.cols()));
}

inline Mat commutator(const Mat& x, const Mat& y) { return x * y - y * x; }

}  // namespace linalg
}  // namespace hermann

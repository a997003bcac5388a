#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hermann/catalog.hpp"
#include "hermann/lie_core.hpp"

using namespace hermann;

namespace {

Mat hat(const Eigen::Vector3d& a) {
  Mat m(3, 3);
  m << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  return m;
}

Mat random_skew(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat x = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      x(i, j) = nd(rng);
      x(j, i) = -x(i, j);
    }
  return x;
}

Mat diag_sign(int n, int minus) {
  Mat c = Mat::Identity(n, n);
  for (int i = 0; i < minus; ++i) c(i, i) = -1.0;
  return c;
}

}  // namespace

TEST(LieCore, So3BracketIsCrossProduct) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int s = 0; s < 10; ++s) {
    Eigen::Vector3d a(nd(rng), nd(rng), nd(rng)), b(nd(rng), nd(rng), nd(rng));
    EXPECT_LT((bracket(hat(a), hat(b)) - hat(a.cross(b))).norm(), 1e-13);
  }
}

TEST(LieCore, JacobiIdentity) {
  std::mt19937_64 rng(2);
  for (int n : {3, 5, 7}) {
    const Mat x = random_skew(n, rng), y = random_skew(n, rng), z = random_skew(n, rng);
    const Mat j = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
    EXPECT_LT(j.norm(), 1e-12 * (1 + x.norm() * y.norm() * z.norm()));
  }
}

// Killing form of so(n): B(X, Y) = (n-2) tr(XY).
TEST(LieCore, KillingFormMatchesTraceFormula) {
  std::mt19937_64 rng(3);
  for (int n : {3, 4, 6}) {
    const Algebra alg = Algebra::so(n);
    EXPECT_EQ(alg.dim(), n * (n - 1) / 2);
    const Mat x = random_skew(n, rng), y = random_skew(n, rng);
    EXPECT_NEAR(alg.killing_inner(x, y), -(n - 2) * (x * y).trace(), 1e-10 * (1 + x.norm() * y.norm()));
  }
}

TEST(LieCore, BasisIsKillingOrthonormal) {
  const Algebra alg = Algebra::so(5);
  const auto& b = alg.basis();
  for (size_t i = 0; i < b.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) EXPECT_NEAR(alg.killing_inner(b[i], b[j]), i == j ? 1.0 : 0.0, 1e-12);
}

TEST(LieCore, CoordsRoundTripAndAdIsSkew) {
  std::mt19937_64 rng(4);
  const Algebra alg = Algebra::so(5);
  const Mat x = random_skew(5, rng);
  EXPECT_LT((alg.element(alg.coords(x)) - x).norm(), 1e-12);
  const Mat ad = alg.ad(x);
  EXPECT_LT((ad + ad.transpose()).norm(), 1e-12);
  const Mat y = random_skew(5, rng);
  EXPECT_LT((ad * alg.coords(y) - alg.coords(bracket(x, y))).norm(), 1e-11);
}

// Rodrigues: exp(θ hat(k)) = I + sinθ K + (1 - cosθ) K² for a unit axis.
TEST(LieCore, ExpMatchesRodrigues) {
  Eigen::Vector3d k(1, 2, -2);
  k.normalize();
  const Mat kk = hat(k);
  for (double th : {0.0, 0.3, 1.7, 3.1, 7.0}) {
    const Mat r = Mat::Identity(3, 3) + std::sin(th) * kk + (1 - std::cos(th)) * kk * kk;
    EXPECT_LT((mat_exp(kk, th) - r).norm(), 1e-13);
    EXPECT_LT((mat_exp_skew_eig(kk, th) - r).norm(), 1e-12);
  }
}

TEST(LieCore, ExpIsOrthogonalForRandomSkew) {
  std::mt19937_64 rng(5);
  for (int n : {4, 6}) {
    const Mat g = mat_exp(random_skew(n, rng));
    EXPECT_LT((g * g.transpose() - Mat::Identity(n, n)).norm(), 1e-12);
    EXPECT_NEAR(g.determinant(), 1.0, 1e-12);
  }
}

// C = diag(-1_a, 1_b): k = so(a) + so(b), m = R^{a b}.
TEST(LieCore, InvolutionSplitsDimensions) {
  for (auto [a, b] : {std::pair{1, 2}, std::pair{2, 3}, std::pair{2, 2}}) {
    const int n = a + b;
    const Algebra alg = Algebra::so(n);
    const Involution s{diag_sign(n, a)};
    EXPECT_LT(s.validate(alg), 1e-12);
    const auto [k, m] = split_eigenspaces(alg, s, Mat::Identity(alg.dim(), alg.dim()), 1e-9);
    EXPECT_EQ(k.cols(), a * (a - 1) / 2 + b * (b - 1) / 2);
    EXPECT_EQ(m.cols(), a * b);
    // [k, m] ⊂ m and [m, m] ⊂ k
    const auto ks = alg.elements(k), ms = alg.elements(m);
    for (const auto& x : ks)
      for (const auto& y : ms) EXPECT_LT((k.transpose() * alg.coords(bracket(x, y))).norm(), 1e-12);
    for (const auto& x : ms)
      for (const auto& y : ms) EXPECT_LT((m.transpose() * alg.coords(bracket(x, y))).norm(), 1e-12);
  }
}

TEST(LieCore, DecomposeDetectsCommutation) {
  const Algebra alg = Algebra::so(4);
  const Involution s1{diag_sign(4, 2)}, s2{diag_sign(4, 1)};
  const auto d = decompose(alg, s1, s2);
  EXPECT_TRUE(d.commuting);
  EXPECT_EQ(d.kh.cols() + d.kp.cols() + d.mh.cols() + d.mp.cols(), alg.dim());
  // rotate the second involution by a generic angle: no longer commuting
  std::mt19937_64 rng(6);
  const Mat g = mat_exp(random_skew(4, rng), 0.4);
  const Involution s3{g * diag_sign(4, 1) * g.transpose()};
  const auto d2 = decompose(alg, s1, s3);
  EXPECT_FALSE(d2.commuting);
  EXPECT_GT(d2.commutator_norm, 1e-3);
}

TEST(LieCore, CartanEmbeddingAndKillingField) {
  std::mt19937_64 rng(7);
  const Triad tr = build_triad(catalog::make_grassmannian_isotropy(2, 3));
  const CartanModel& cm = tr.model;
  EXPECT_LT(cm.calibration_defect(), 1e-12);
  const Mat w = tr.alg.element(tr.decomp.m * Vec::Random(tr.decomp.m.cols()));
  const SpacePoint x = cm.exp_point(w);
  EXPECT_LT(cm.point_defect(x), 1e-12);
  // killing field value against a central difference of the action
  const Mat y = random_skew(5, rng);
  const double h = 1e-5;
  const Mat fd = (cm.act(mat_exp(y, h), x).cartan_image - cm.act(mat_exp(y, -h), x).cartan_image) / (2 * h);
  EXPECT_LT((fd - cm.killing_field_value(y, x)).norm(), 1e-8);
  // k fixes the origin
  for (const auto& k : tr.alg.elements(tr.decomp.k)) EXPECT_LT(cm.killing_field_value(k, cm.origin()).norm(), 1e-13);
}

TEST(LieCore, RejectsBadInput) {
  EXPECT_THROW(Algebra::so(2), InputError);
  const Algebra alg = Algebra::so(3);
  EXPECT_THROW(alg.killing_inner(Mat::Zero(4, 4), Mat::Zero(3, 3)), InputError);
}

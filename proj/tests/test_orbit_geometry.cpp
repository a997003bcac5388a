#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hermann/catalog.hpp"
#include "hermann/orbit_geometry.hpp"

using namespace hermann;

namespace {

constexpr double pi = std::numbers::pi;

Vec v1(double x) {
  Vec v(1);
  v << x;
  return v;
}

Mat random_skew(int n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd;
  Mat x = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      x(i, j) = scale * nd(rng);
      x(j, i) = -x(i, j);
    }
  return x;
}

}  // namespace

// p-blocks: -β(u) cot β(w); h-blocks: β(u) tan β(w); z_m∩h: 0.
TEST(OrbitGeometry, UnitaryOneTwoClosedSpectrumAtPiOverSix) {
  const Triad tr = build_triad(catalog::make_unitary_on_grassmannian(1, 2));
  const RootSystem rs = analyze_roots(tr);
  auto s = shape_spectrum_closed(tr, rs, v1(pi / 6), v1(1.0)).expanded();
  std::sort(s.begin(), s.end());
  const double r3 = std::sqrt(3.0);
  const std::vector<double> expect{-r3, -r3, -2 / r3, 0, 0, 1 / r3, 1 / r3};
  ASSERT_EQ(s.size(), expect.size());
  for (size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i], expect[i], 1e-12);
}

TEST(OrbitGeometry, AlgebraicAndFiniteDifferenceAgreeWithClosedForm) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.15, 1.4);
  std::normal_distribution<double> nd;
  for (const TriadSpec& spec : {catalog::make_unitary_on_grassmannian(1, 2), catalog::make_unitary_on_grassmannian(2, 3),
                                catalog::make_double_grassmannian(2, 4, 3, 3), catalog::make_isotropy(4)}) {
    SCOPED_TRACE(spec.name);
    const Triad tr = build_triad(spec);
    const RootSystem rs = analyze_roots(tr);
    for (int k = 0; k < 3; ++k) {
      Vec w(rs.rank()), u(rs.rank());
      for (int i = 0; i < rs.rank(); ++i) {
        w(i) = uni(rng) * (i + 1) / rs.rank();
        u(i) = nd(rng);
      }
      if (!orbit_frame(tr, rs, w).regular) continue;
      const auto ref = shape_spectrum_closed(tr, rs, w, u).expanded();
      const auto alg = operator_eigenvalues(shape_operator_algebraic(tr, rs, w, u));
      const auto fd = operator_eigenvalues(shape_operator_numeric(tr, rs, w, u));
      EXPECT_LT(max_relative_eigen_error(alg, ref), 1e-9);
      EXPECT_LT(max_relative_eigen_error(fd, ref), 1e-6);
    }
  }
}

// Central differences: error ~ h².
TEST(OrbitGeometry, FiniteDifferenceIsSecondOrder) {
  const Triad tr = build_triad(catalog::make_unitary_on_grassmannian(1, 2));
  const RootSystem rs = analyze_roots(tr);
  const Vec w = v1(0.6), u = v1(1.0);
  const auto ref = shape_spectrum_closed(tr, rs, w, u).expanded();
  const double e1 = max_relative_eigen_error(operator_eigenvalues(shape_operator_numeric(tr, rs, w, u, 2e-3)), ref);
  const double e2 = max_relative_eigen_error(operator_eigenvalues(shape_operator_numeric(tr, rs, w, u, 1e-3)), ref);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.3);
  EXPECT_THROW(shape_operator_numeric(tr, rs, w, u, 0.5), InputError);
}

TEST(OrbitGeometry, SingularPointsAreRejected) {
  const Triad tr = build_triad(catalog::make_unitary_on_grassmannian(1, 2));
  const RootSystem rs = analyze_roots(tr);
  EXPECT_THROW(shape_spectrum_closed(tr, rs, v1(0.0), v1(1.0)), SingularPointError);
  EXPECT_THROW(shape_spectrum_closed(tr, rs, v1(pi / 2), v1(1.0)), SingularPointError);
  EXPECT_NO_THROW(shape_spectrum_closed(tr, rs, v1(0.3), v1(1.0)));
}

// Principal orbit: dim m - rank = 7. At w = 0 and w = π/2 three directions
// collapse, leaving z_m∩h (2) plus one (2,2)-block half.
TEST(OrbitGeometry, TangentDimensionsRegularAndSingular) {
  const Triad tr = build_triad(catalog::make_unitary_on_grassmannian(1, 2));
  const RootSystem rs = analyze_roots(tr);
  EXPECT_EQ(orbit_frame(tr, rs, v1(0.3)).tangent_dim(), 7);
  EXPECT_EQ(tangent_rank_numeric(tr, rs, v1(0.3)), 7);
  for (double w : {0.0, pi / 2}) {
    const auto f = orbit_frame(tr, rs, v1(w));
    EXPECT_FALSE(f.regular);
    EXPECT_EQ(f.tangent_dim(), 4);
    EXPECT_EQ(tangent_rank_numeric(tr, rs, v1(w)), 4);
  }
}

TEST(OrbitGeometry, CurvatureEigenvaluesAreRootSquares) {
  const Triad tr = build_triad(catalog::make_unitary_on_grassmannian(2, 3));
  const RootSystem rs = analyze_roots(tr);
  Vec w(2), v(2);
  w << 0.3, 0.7;
  v << 0.8, -0.5;
  const Mat tangent = tangent_space(tr, rs, w);
  double inv = 1.0;
  const Mat r = curvature_on_tangent(tr, rs, tangent, v, &inv);
  EXPECT_LT(inv, 1e-10);
  Eigen::SelfAdjointEigenSolver<Mat> es(r);
  std::vector<double> got(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::vector<double> want(static_cast<size_t>(rs.centralizer.zm_h.cols()), 0.0);
  for (const auto& a : rs.adapted) {
    const double b = a.chart_coeffs.dot(v);
    for (int k = 0; k < a.p_mult + a.h_mult; ++k) want.push_back(b * b);
  }
  std::sort(want.begin(), want.end());
  ASSERT_EQ(got.size(), want.size());
  for (size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10);
}

TEST(OrbitGeometry, CommutationHoldsAtRegularAndSingularPoints) {
  const Triad tr = build_triad(catalog::make_unitary_on_grassmannian(2, 3));
  const RootSystem rs = analyze_roots(tr);
  Vec v(2), u(2);
  v << 0.4, 1.1;
  u << -0.7, 0.2;
  Vec w(2);
  for (auto [a, b] : {std::pair{0.3, 0.7}, std::pair{pi / 2, 0.4}, std::pair{0.5, 0.5}}) {
    w << a, b;
    const auto cr = commutation_residual(tr, rs, w, v, u);
    EXPECT_LT(cr.curvature_shape, 1e-8);
    EXPECT_LT(cr.shape_shape, 1e-8);
  }
}

// Commuting triads through the general path: t ∈ {π/2, π}, c = cot t.
TEST(OrbitGeometry, GeneralPathReducesToClosedForm) {
  const Triad tr = build_triad(catalog::make_unitary_on_grassmannian(1, 2));
  const RootSystem rs = analyze_roots(tr);
  const auto g = general_spectrum(tr, rs, v1(0.4), 5);
  for (const auto& b : g.blocks) {
    const double t = g.t_from_origin(b, rs);
    EXPECT_TRUE(std::abs(t - pi / 2) < 1e-8 || std::abs(t - pi) < 1e-8) << t;
    EXPECT_NEAR(b.c, std::cos(b.t) / std::sin(b.t), 1e-10);
  }
  EXPECT_EQ(g.zero_block_dim, rs.centralizer.zm_h.cols());
  for (double x : {0.2, 0.9, 1.3}) {
    auto a = eval_general_shape(rs, g, v1(x), v1(1.0)).expanded();
    auto b = shape_spectrum_closed(tr, rs, v1(x), v1(1.0)).expanded();
    EXPECT_LT(max_relative_eigen_error(a, b), 1e-8);
  }
}

TEST(OrbitGeometry, GeneralPathMatchesFiniteDifferenceOnConjugatedTriad) {
  std::mt19937_64 rng(17);
  const TriadSpec spec = catalog::make_conjugated(catalog::make_double_grassmannian(2, 3, 3, 2), random_skew(5, rng, 0.3));
  const Triad tr = build_triad(spec);
  ASSERT_FALSE(tr.decomp.commuting);
  const RootSystem rs = analyze_roots(tr);
  Vec ref(rs.rank());
  ref.setConstant(0.35);
  const auto g = general_spectrum(tr, rs, ref, 9);
  EXPECT_LT(g.joint_residual, 1e-8);
  for (const auto& b : g.blocks) EXPECT_LT(b.law_residual, 1e-8);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 3; ++k) {
    Vec w = ref, u(rs.rank());
    for (int i = 0; i < rs.rank(); ++i) {
      w(i) += 0.1 * nd(rng);
      u(i) = nd(rng);
    }
    const auto want = eval_general_shape(rs, g, w, u).expanded();
    const auto fd = operator_eigenvalues(shape_operator_numeric(tr, rs, w, u));
    EXPECT_LT(max_relative_eigen_error(fd, want), 1e-6);
  }
}

// θ(π/4)/θ(π/6) with θ = sin²s cos²s |sin 2s| = 8/(3√3).
TEST(OrbitGeometry, DensityRatioUnitaryOneTwo) {
  const Triad tr = build_triad(catalog::make_unitary_on_grassmannian(1, 2));
  const RootSystem rs = analyze_roots(tr);
  const double want = 8.0 / (3.0 * std::sqrt(3.0));
  EXPECT_NEAR(relative_density(rs, v1(pi / 6), v1(pi / 4)), want, 1e-12);
  EXPECT_NEAR(gram_density_ratio(tr, rs, v1(pi / 6), v1(pi / 4)), want, 1e-9);
  // crossing the h-wall at π/2 is not a single chamber segment
  EXPECT_THROW(relative_density(rs, v1(0.3), v1(2.0)), SingularPointError);
}

TEST(OrbitGeometry, NonCommutingTriadRejectedByClosedForms) {
  std::mt19937_64 rng(2);
  const Triad tr = build_triad(catalog::make_conjugated(catalog::make_isotropy(4), random_skew(4, rng, 0.4)));
  const RootSystem rs = analyze_roots(tr);
  EXPECT_THROW(orbit_frame(tr, rs, Vec::Constant(rs.rank(), 0.3)), InputError);
}

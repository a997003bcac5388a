#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hermann/catalog.hpp"
#include "hermann/integration.hpp"

using namespace hermann;

namespace {

constexpr double pi = std::numbers::pi;

struct World {
  Triad tr;
  RootSystem rs;
  DensityProfile prof;
  SectionLattice lat;
  explicit World(const TriadSpec& s) : tr(build_triad(s)), rs(analyze_roots(tr)), prof(density_profile(rs)) {
    lat = section_lattice(tr, rs, prof, LatticeConfig{});
  }
};

// I1 = tr(x C1 C2)/n. Haar average of tr(g A gᵀ B) is tr A tr B / n, so
// the mean over M is tr(C1) tr(C2) / n².
NamedFunction trace_invariant(const Triad& tr) {
  const Mat c = tr.spec.sigma1 * tr.spec.sigma2;
  const double n = tr.n();
  return {"I1", [c, n](const Mat& x) { return (x * c).trace() / n; }};
}

double exact_trace_mean(const Triad& tr) {
  const double n = tr.n();
  return tr.spec.sigma1.trace() * tr.spec.sigma2.trace() / (n * n);
}

}  // namespace

TEST(Integration, ThetaUnitaryOneTwo) {
  World s(catalog::make_unitary_on_grassmannian(1, 2));
  for (double w : {0.2, pi / 4, 1.1}) {
    Vec v(1);
    v << w;
    const double want = std::pow(std::sin(w), 2) * std::pow(std::cos(w), 2) * std::abs(std::sin(2 * w));
    EXPECT_NEAR(theta(v, s.prof), want, 1e-14);
  }
  Vec v(1);
  v << pi / 4;
  EXPECT_NEAR(theta(v, s.prof), 0.25, 1e-15);
  Vec z(1);
  z << 0.0;
  EXPECT_THROW(orbit_volume_ratio(z, v, s.prof), SingularPointError);
}

TEST(Integration, LatticePeriods) {
  for (const TriadSpec& spec : {catalog::make_isotropy(3), catalog::make_unitary_on_grassmannian(1, 2)}) {
    World s(spec);
    ASSERT_EQ(s.lat.axis_periods.size(), 1u);
    EXPECT_NEAR(s.lat.axis_periods[0], pi, 1e-10);
    EXPECT_LT(s.lat.max_period_residual, 1e-8);
  }
  World s2(catalog::make_isotropy(3));
  ASSERT_TRUE(s2.lat.weyl_order_estimate.has_value());
  EXPECT_EQ(*s2.lat.weyl_order_estimate, 2);
}

TEST(Integration, ConstantFunctionIntegratesToOne) {
  for (const TriadSpec& spec : {catalog::make_unitary_on_grassmannian(1, 2), catalog::make_grassmannian_isotropy(2, 3)}) {
    World s(spec);
    const auto q = integrate_invariant(s.tr, s.rs, s.prof, s.lat, {find_function(invariant_test_functions(s.tr), "one")});
    EXPECT_NEAR(q[0].value, 1.0, 1e-13);
  }
}

// S^{n-1}: mean of cos² of the colatitude is 1/n.
TEST(Integration, SphereCosSquared) {
  World s(catalog::make_isotropy(3));
  const auto q = integrate_invariant(s.tr, s.rs, s.prof, s.lat, {find_function(invariant_test_functions(s.tr), "cos2")});
  EXPECT_NEAR(q[0].value, 1.0 / 3.0, 1e-9);
  EXPECT_LT(q[0].error_estimate, 1e-9);
  // S⁴: E v_n² = 1/5
  World s5(catalog::make_isotropy(5));
  const auto q5 = integrate_invariant(s5.tr, s5.rs, s5.prof, s5.lat, {find_function(invariant_test_functions(s5.tr), "cos2")});
  EXPECT_NEAR(q5[0].value, 0.2, 1e-9);
}

TEST(Integration, TraceInvariantMatchesWeingartenMean) {
  for (const TriadSpec& spec : {catalog::make_grassmannian_isotropy(2, 3), catalog::make_double_grassmannian(2, 3, 3, 2),
                                catalog::make_unitary_on_grassmannian(1, 2), catalog::make_isotropy(4)}) {
    SCOPED_TRACE(spec.name);
    World s(spec);
    const auto q = integrate_invariant(s.tr, s.rs, s.prof, s.lat, {trace_invariant(s.tr)});
    EXPECT_NEAR(q[0].value, exact_trace_mean(s.tr), 1e-7);
  }
}

TEST(Integration, QuadratureAgreesWithMonteCarlo) {
  World s(catalog::make_unitary_on_grassmannian(1, 2));
  const auto fs = invariant_test_functions(s.tr);
  const auto q = integrate_invariant(s.tr, s.rs, s.prof, s.lat, fs);
  const auto m = haar_mc_integrate(s.tr, fs, McConfig{100000, 99, 4});
  for (size_t i = 0; i < fs.size(); ++i) {
    SCOPED_TRACE(fs[i].name);
    EXPECT_LE(std::abs(q[i].value - m[i].mean), 4 * m[i].std_error + q[i].error_estimate + 1e-12);
  }
}

TEST(Integration, MonteCarloIsSeedDeterministic) {
  const Triad tr = build_triad(catalog::make_isotropy(3));
  const auto fs = invariant_test_functions(tr);
  const auto a = haar_mc_integrate(tr, fs, McConfig{20000, 5, 4});
  const auto b = haar_mc_integrate(tr, fs, McConfig{20000, 5, 4});
  const auto c = haar_mc_integrate(tr, fs, McConfig{20000, 6, 4});
  for (size_t i = 0; i < fs.size(); ++i) {
    EXPECT_EQ(a[i].mean, b[i].mean);
    EXPECT_EQ(a[i].std_error, b[i].std_error);
  }
  EXPECT_NE(a[1].mean, c[1].mean);
}

TEST(Integration, HaarSamplesAreSpecialOrthogonal) {
  std::mt19937_64 rng(8);
  double sum = 0.0;
  const int n = 4, count = 20000;
  for (int k = 0; k < count; ++k) {
    const Mat g = haar_so(n, rng);
    ASSERT_LT((g * g.transpose() - Mat::Identity(n, n)).norm(), 1e-12);
    ASSERT_NEAR(g.determinant(), 1.0, 1e-12);
    sum += g(0, 0) * g(0, 0);
  }
  // E g_11² = 1/n, Var = 2(n-1)/(n²(n+2))
  const double se = std::sqrt(2.0 * (n - 1) / (n * n * (n + 2.0)) / count);
  EXPECT_NEAR(sum / count, 1.0 / n, 4 * se);
}

TEST(Integration, HaarHCommutesWithSecondInvolution) {
  std::mt19937_64 rng(9);
  for (const TriadSpec& spec : {catalog::make_unitary_on_grassmannian(1, 2), catalog::make_double_grassmannian(2, 3, 3, 2)}) {
    const HaarH hh(spec.sigma2);
    for (int k = 0; k < 20; ++k) {
      const Mat h = hh.sample(rng);
      const int n = spec.n;
      EXPECT_LT((h * h.transpose() - Mat::Identity(n, n)).norm(), 1e-12);
      EXPECT_NEAR(h.determinant(), 1.0, 1e-12);
      EXPECT_LT((h * spec.sigma2 - spec.sigma2 * h).norm(), 1e-12);
    }
  }
}

TEST(Integration, NonInvariantFunctionGivesWitness) {
  World s(catalog::make_unitary_on_grassmannian(1, 2));
  const NamedFunction bad{"entry01", [](const Mat& x) { return x(0, 1); }};
  try {
    check_invariance(s.tr, bad, 8, 1e-8, 1);
    FAIL() << "expected InvarianceError";
  } catch (const InvarianceError& e) {
    EXPECT_FALSE(e.witness().empty());
  }
  EXPECT_THROW(integrate_invariant(s.tr, s.rs, s.prof, s.lat, {bad}), InvarianceError);
}

// Sampled H-averaging: quadrature of the averaged bump converges to the
// Haar mean of the raw bump at the Monte-Carlo rate in the H sample count.
TEST(Integration, HAveragingConvergesAtMonteCarloRate) {
  World s(catalog::make_unitary_on_grassmannian(1, 2));
  Vec ref(1);
  ref << 0.7;
  const NamedFunction bump = coordinate_bump(s.tr, s.rs, ref, 1.5);
  QuadratureConfig qc;
  qc.invariance_tol = 1.0;  // averaged functions are only approximately invariant
  const double truth = integrate_invariant(s.tr, s.rs, s.prof, s.lat,
                                           {h_averaged_function(s.tr, bump, 8192, 1, 8, 1.0).function}, qc)[0].value;
  std::vector<double> err;
  for (int nh : {16, 64, 256, 1024}) {
    double acc = 0.0;
    for (std::uint64_t seed = 10; seed < 18; ++seed) {
      const auto avg = h_averaged_function(s.tr, bump, nh, seed, 8, 1.0);
      const double v = integrate_invariant(s.tr, s.rs, s.prof, s.lat, {avg.function}, qc)[0].value;
      acc += (v - truth) * (v - truth);
    }
    err.push_back(std::sqrt(acc / 8));
  }
  const double slope = std::log(err.back() / err.front()) / std::log(1024.0 / 16.0);
  EXPECT_NEAR(slope, -0.5, 0.2) << err[0] << " " << err[1] << " " << err[2] << " " << err[3];
  // Haar mean of the raw bump, within the combined error.
  const auto m = haar_mc_integrate(s.tr, {bump}, McConfig{200000, 3, 4});
  EXPECT_LE(std::abs(truth - m[0].mean), 4 * std::hypot(m[0].std_error, err.back() / 2.0));
}

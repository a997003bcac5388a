// Walk-through on the U(1+2) action on the real Grassmannian of 2-planes in R^6,
// then S^2 integration. Prints plain text.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "hermann/catalog.hpp"
#include "hermann/integration.hpp"

using namespace hermann;

int main() {
  const double pi = std::numbers::pi;
  const Triad tr = build_triad(catalog::make_unitary_on_grassmannian(1, 2));
  const RootSystem rs = analyze_roots(tr, kDefaultSeed, true);
  const auto& d = tr.decomp;
  std::printf("U(3) on SO(6)/S(O(2)xO(4))\n");
  std::printf("  dim k=%ld m=%ld h=%ld p=%ld  commuting=%d\n", static_cast<long>(d.k.cols()), static_cast<long>(d.m.cols()),
              static_cast<long>(d.h.cols()), static_cast<long>(d.p.cols()), d.commuting ? 1 : 0);
  std::printf("  adapted roots on the section:\n");
  for (const auto& a : rs.adapted)
    std::printf("    beta=%s  m_p=%d  m_h=%d\n", a.label.c_str(), a.p_mult, a.h_mult);

  const DensityProfile prof = density_profile(rs);
  Vec w(1), u(1);
  w << pi / 6;
  u << 1.0;
  const ShapeSpectrum cs = shape_spectrum_closed(tr, rs, w, u);
  const auto fd = operator_eigenvalues(shape_operator_numeric(tr, rs, w, u));
  std::printf("\nshape operator at w=pi/6, u=e1\n  closed form:");
  for (double x : cs.expanded()) std::printf(" %.6f", x);
  std::printf("\n  finite diff:");
  for (double x : fd) std::printf(" %.6f", x);
  std::printf("\n  max rel error %.2e\n", max_relative_eigen_error(fd, cs.expanded()));

  Vec a(1), b(1);
  a << pi / 6;
  b << pi / 4;
  std::printf("\nvolume ratio theta(pi/4)/theta(pi/6) = %.12f  (8/(3 sqrt3) = %.12f)\n", orbit_volume_ratio(a, b, prof),
              8.0 / (3.0 * std::sqrt(3.0)));
  std::printf("  Gram-determinant oracle            = %.12f\n", gram_density_ratio(tr, rs, a, b));

  const Triad s2 = build_triad(catalog::make_isotropy(3));
  const RootSystem rs2 = analyze_roots(s2, kDefaultSeed, true);
  const DensityProfile p2 = density_profile(rs2);
  const SectionLattice lat = section_lattice(s2, rs2, p2, LatticeConfig{});
  const auto fs = std::vector<NamedFunction>{find_function(invariant_test_functions(s2), "cos2")};
  const auto q = integrate_invariant(s2, rs2, p2, lat, fs, QuadratureConfig{});
  const auto mc = haar_mc_integrate(s2, fs, McConfig{200000, 7, 4});
  std::printf("\nS^2, f = cos^2 of the polar angle\n  section quadrature %.12f (+- %.1e)\n  Haar Monte Carlo   %.6f +- %.6f\n  exact              %.12f\n",
              q[0].value, q[0].error_estimate, mc[0].mean, mc[0].std_error, 1.0 / 3.0);
  return 0;
}

#pragma once

// A symmetric triad (G, K, H) with G = SO(n), K and H the fixed groups of
// conjugation involutions σ₁ and σ₂.

#include <map>
#include <string>
#include <vector>

#include "hermann/lie_core.hpp"

namespace hermann {

/// Expected adapted root: coefficients on the explicit section frame plus
/// the multiplicities (p_β, h_β).
struct ExpectedRoot {
  std::vector<double> coeffs;
  int p_mult = 0;
  int h_mult = 0;
  std::string label;
};

struct TriadSpec {
  std::string name;
  int n = 0;
  Mat sigma1;  ///< conjugator of σ₁ (defines K)
  Mat sigma2;  ///< conjugator of σ₂ (defines H)
  bool commuting_expected = true;
  std::vector<Mat> t_frame;       ///< optional explicit section frame (axes of the chart)
  std::vector<Mat> tprime_frame;  ///< optional complement t' with a = t ⊕ t'
  std::vector<ExpectedRoot> expected_roots;
  std::map<std::string, int> params;
};

/// Built triad: algebra, involutions, decomposition and Cartan model.
struct Triad {
  TriadSpec spec;
  Tolerances tol;
  Algebra alg;
  Involution sigma1, sigma2;
  TriadDecomposition decomp;
  CartanModel model;
  double involution_residual = 0.0;

  const std::string& name() const { return spec.name; }
  int n() const { return spec.n; }
};

inline Triad build_triad(const TriadSpec& spec, const Tolerances& tol = {}) {
  if (spec.n < 3) throw InputError("triad: matrix size must be at least 3");
  if (spec.sigma1.rows() != spec.n || spec.sigma1.cols() != spec.n || spec.sigma2.rows() != spec.n ||
      spec.sigma2.cols() != spec.n)
    throw InputError("triad: conjugators must be n x n");
  Triad t{spec, tol, Algebra::so(spec.n), Involution{spec.sigma1}, Involution{spec.sigma2}, {}, {}, 0.0};
  t.involution_residual = std::max(t.sigma1.validate(t.alg), t.sigma2.validate(t.alg));
  t.decomp = decompose(t.alg, t.sigma1, t.sigma2, tol);
  if (spec.commuting_expected && !t.decomp.commuting)
    throw InputError("triad '" + spec.name + "': involutions were declared commuting but do not commute");
  if (t.decomp.m.cols() == 0) throw InputError("triad: sigma1 has no -1 eigenspace (M is a point)");
  t.model = CartanModel(t.alg, t.sigma1, t.decomp.m);
  return t;
}

}  // namespace hermann

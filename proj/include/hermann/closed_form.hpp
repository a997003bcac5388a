#pragma once

// Factor-by-factor comparison of the printed product formula for θ of the
// U(p+q) example against the θ derived from computed multiplicities.
//
// The printed product runs over 1 ≤ i ≤ p, 1 ≤ j ≤ 2p of
// |sin(λ_i ± λ_j)| |cos(λ_i ± λ_j)|, times |sin λ_i|^{2(q-p)} |cos λ_i|^{2(q-p)},
// with λ_{i+p} = -λ_i on t. Factors whose argument vanishes identically are
// excluded (|sin 0| = 0 would kill the product, |cos 0| = 1 is inert) and
// named in the report.

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hermann/catalog.hpp"
#include "hermann/integration.hpp"

namespace hermann::catalog {

struct ClosedFormFactor {
  std::vector<int> argument;  ///< integer coefficients on Q_ii coordinates, first nonzero > 0
  std::string label;
  int printed_sin = 0, printed_cos = 0;
  int derived_sin = 0, derived_cos = 0;
  bool matches() const { return printed_sin == derived_sin && printed_cos == derived_cos; }
};

struct ClosedFormComparison {
  int p = 0, q = 0;
  std::vector<ClosedFormFactor> factors;
  std::vector<std::string> excluded;  ///< degenerate factors of the printed product
  double max_relative_difference = 0.0;  ///< pointwise |θ_printed/θ_derived - 1| on samples
  bool all_factors_match() const {
    for (const auto& f : factors)
      if (!f.matches()) return false;
    return true;
  }
};

namespace detail {

inline std::string argument_label(const std::vector<int>& a) {
  std::string s;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    if (a[i] < 0) s += "-";
    else if (!s.empty()) s += "+";
    if (std::abs(a[i]) != 1) s += std::to_string(std::abs(a[i]));
    s += "l" + std::to_string(i + 1);
  }
  return s.empty() ? "0" : s;
}

/// Returns false for the zero vector; otherwise flips the sign so that the
/// first nonzero entry is positive (|sin| and |cos| are even).
inline bool normalize_sign(std::vector<int>& a) {
  for (int v : a)
    if (v != 0) {
      if (v < 0)
        for (int& x : a) x = -x;
      return true;
    }
  return false;
}

}  // namespace detail

/// Evaluates the printed product (degenerate factors excluded) at w in Q_ii
/// coordinates.
inline double printed_theta(const ClosedFormComparison& c, const Vec& w) {
  double v = 1.0;
  for (const auto& f : c.factors) {
    double arg = 0.0;
    for (size_t i = 0; i < f.argument.size(); ++i) arg += f.argument[i] * w(static_cast<Eigen::Index>(i));
    v *= std::pow(std::abs(std::sin(arg)), f.printed_sin) * std::pow(std::abs(std::cos(arg)), f.printed_cos);
  }
  return v;
}

inline ClosedFormComparison compare_closed_form(int p, int q, std::uint64_t seed = kDefaultSeed) {
  const Triad tr = build_triad(make_unitary_on_grassmannian(p, q));
  const RootSystem rs = analyze_roots(tr, seed, true);
  ClosedFormComparison c;
  c.p = p;
  c.q = q;
  std::map<std::vector<int>, ClosedFormFactor> table;
  auto entry = [&](std::vector<int> a) -> ClosedFormFactor& {
    auto& f = table[a];
    f.argument = a;
    f.label = detail::argument_label(a);
    return f;
  };
  auto lam = [p](int j) {  // λ_j restricted to t, j in 1..2p
    std::vector<int> v(static_cast<size_t>(p), 0);
    if (j <= p) v[static_cast<size_t>(j - 1)] = 1;
    else v[static_cast<size_t>(j - p - 1)] = -1;
    return v;
  };
  for (int i = 1; i <= p; ++i)
    for (int j = 1; j <= 2 * p; ++j)
      for (int sgn : {+1, -1}) {
        std::vector<int> a = lam(i), b = lam(j);
        for (size_t k = 0; k < a.size(); ++k) a[k] += sgn * b[k];
        const std::string src = "(i=" + std::to_string(i) + ",j=" + std::to_string(j) + (sgn > 0 ? ",+)" : ",-)");
        if (!detail::normalize_sign(a)) {
          c.excluded.push_back("|sin 0| and |cos 0| from " + src);
          continue;
        }
        auto& f = entry(a);
        ++f.printed_sin;
        ++f.printed_cos;
      }
  for (int i = 1; i <= p && q > p; ++i) {
    auto& f = entry(lam(i));
    f.printed_sin += 2 * (q - p);
    f.printed_cos += 2 * (q - p);
  }
  for (const auto& d : rs.adapted) {
    std::vector<int> a(static_cast<size_t>(p));
    for (int k = 0; k < p; ++k) a[static_cast<size_t>(k)] = static_cast<int>(std::lround(d.chart_coeffs(k)));
    detail::normalize_sign(a);
    auto& f = entry(a);
    f.derived_sin += d.p_mult;
    f.derived_cos += d.h_mult;
  }
  for (auto& [k, f] : table) c.factors.push_back(f);

  const DensityProfile prof = density_profile(rs);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 1.5);
  for (int s = 0; s < 64; ++s) {
    Vec w(p);
    for (int k = 0; k < p; ++k) w(k) = u(rng);
    const double derived = prof.eval(w);
    if (derived < 1e-12) continue;
    c.max_relative_difference = std::max(c.max_relative_difference, std::abs(printed_theta(c, w) / derived - 1.0));
  }
  return c;
}

}  // namespace hermann::catalog

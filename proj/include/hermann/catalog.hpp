#pragma once

// Built-in symmetric triads. Every triad is presented on so(n) with σ₁ and σ₂
// given by conjugation with orthogonal matrices.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hermann/triad.hpp"

namespace hermann::catalog {

/// diag(+1 × a, -1 × b).
inline Mat signature_matrix(int a, int b) {
  Vec d(a + b);
  d.head(a).setOnes();
  d.tail(b).setConstant(-1.0);
  return d.asDiagonal();
}

/// Matrices of the U(p+q) example on so(2p+2q). Row blocks have sizes
/// p, p, q, q; `e` is the p×q matrix unit E_{i,j} (0-based i, j).
struct UnitaryBlocks {
  int p = 0, q = 0;

  int n() const { return 2 * p + 2 * q; }
  int b1() const { return 0; }
  int b2() const { return p; }
  int b3() const { return 2 * p; }
  int b4() const { return 2 * p + q; }

  /// Skew matrix with upper-right blocks (b1,b3) = x13, (b1,b4) = x14,
  /// (b2,b3) = x23, (b2,b4) = x24.
  Mat skew_from(const Mat& x13, const Mat& x14, const Mat& x23, const Mat& x24) const {
    Mat m = Mat::Zero(n(), n());
    m.block(b1(), b3(), p, q) = x13;
    m.block(b1(), b4(), p, q) = x14;
    m.block(b2(), b3(), p, q) = x23;
    m.block(b2(), b4(), p, q) = x24;
    return m - m.transpose();
  }
  Mat unit(int i, int j) const {
    Mat e = Mat::Zero(p, q);
    e(i, j) = 1.0;
    return e;
  }
  Mat zero() const { return Mat::Zero(p, q); }

  Mat Q(int i, int j) const { return skew_from(unit(i, j), zero(), zero(), -unit(i, j)); }
  Mat R(int i, int j) const { return skew_from(zero(), unit(i, j), unit(i, j), zero()); }
  Mat F(int i, int j) const { return skew_from(unit(i, j), zero(), zero(), unit(i, j)); }
  Mat G(int i, int j) const { return skew_from(zero(), -unit(i, j), unit(i, j), zero()); }

  Mat sigma1() const {
    Vec d(n());
    d.head(2 * p).setOnes();
    d.tail(2 * q).setConstant(-1.0);
    return d.asDiagonal();
  }
  Mat sigma2() const {
    Mat j = Mat::Zero(n(), n());
    j.block(b1(), b2(), p, p) = Mat::Identity(p, p);
    j.block(b2(), b1(), p, p) = -Mat::Identity(p, p);
    j.block(b3(), b4(), q, q) = Mat::Identity(q, q);
    j.block(b4(), b3(), q, q) = -Mat::Identity(q, q);
    return j;
  }
};

/// H = U(p+q) acting on SO(2p+2q)/S(O(2p)×O(2q)), with t = span{Q_ii},
/// t' = span{F_ii}.
inline TriadSpec make_unitary_on_grassmannian(int p, int q) {
  if (p < 1 || q < 1) throw InputError("u-on-grassmannian: p and q must be positive");
  if (p > q) throw InputError("u-on-grassmannian: requires p <= q");
  UnitaryBlocks b{p, q};
  TriadSpec s;
  s.name = "u-on-grassmannian";
  s.n = b.n();
  s.sigma1 = b.sigma1();
  s.sigma2 = b.sigma2();
  s.params = {{"p", p}, {"q", q}};
  for (int i = 0; i < p; ++i) {
    s.t_frame.push_back(b.Q(i, i));
    s.tprime_frame.push_back(b.F(i, i));
  }
  // Adapted roots in Q_ii coordinates. ±λ_i and ±λ_{i+p} restrict to ±ε_i;
  // λ_i - λ_{i+p} restricts to 2ε_i; for i < j ≤ p the F/Q and G/R families
  // both restrict to ε_i ± ε_j and each contributes (1, 1).
  for (int i = 0; i < p; ++i) {
    if (q > p) {
      ExpectedRoot r;
      r.coeffs.assign(static_cast<size_t>(p), 0.0);
      r.coeffs[static_cast<size_t>(i)] = 1.0;
      r.p_mult = r.h_mult = 2 * (q - p);
      r.label = "lambda_" + std::to_string(i + 1);
      s.expected_roots.push_back(r);
    }
    ExpectedRoot two;
    two.coeffs.assign(static_cast<size_t>(p), 0.0);
    two.coeffs[static_cast<size_t>(i)] = 2.0;
    two.p_mult = 1;
    two.h_mult = 0;
    two.label = "2lambda_" + std::to_string(i + 1);
    s.expected_roots.push_back(two);
  }
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      for (int sign : {+1, -1}) {
        ExpectedRoot r;
        r.coeffs.assign(static_cast<size_t>(p), 0.0);
        r.coeffs[static_cast<size_t>(i)] = 1.0;
        r.coeffs[static_cast<size_t>(j)] = sign;
        r.p_mult = r.h_mult = 2;
        r.label = "lambda_" + std::to_string(i + 1) + (sign > 0 ? "+" : "-") + "lambda_" + std::to_string(j + 1);
        s.expected_roots.push_back(r);
      }
  return s;
}

/// H = K on the sphere S^{n-1} = SO(n)/SO(n-1).
inline TriadSpec make_isotropy(int n) {
  if (n < 3) throw InputError("sphere-isotropy: n must be at least 3");
  TriadSpec s;
  s.name = "sphere-isotropy";
  s.n = n;
  s.sigma1 = signature_matrix(n - 1, 1);
  s.sigma2 = s.sigma1;
  s.params = {{"n", n}};
  Mat e = Mat::Zero(n, n);
  e(0, n - 1) = 1.0;
  e(n - 1, 0) = -1.0;
  s.t_frame.push_back(e);
  ExpectedRoot r;
  r.coeffs = {1.0};
  r.p_mult = n - 2;
  r.h_mult = 0;
  r.label = "alpha";
  s.expected_roots.push_back(r);
  return s;
}

/// H = K on the real Grassmannian SO(a+b)/S(O(a)×O(b)).
inline TriadSpec make_grassmannian_isotropy(int a, int b) {
  if (a < 1 || b < 1 || a + b < 3) throw InputError("grassmannian-isotropy: invalid block sizes");
  TriadSpec s;
  s.name = "grassmannian-isotropy";
  s.n = a + b;
  s.sigma1 = signature_matrix(a, b);
  s.sigma2 = s.sigma1;
  s.params = {{"a", a}, {"b", b}};
  return s;
}

/// S(O(c)×O(d)) acting on SO(a+b)/S(O(a)×O(b)), a + b = c + d.
inline TriadSpec make_double_grassmannian(int a, int b, int c, int d) {
  if (a < 1 || b < 1 || c < 1 || d < 1 || a + b != c + d || a + b < 3)
    throw InputError("double-grassmannian: block sizes must be positive with a+b = c+d >= 3");
  TriadSpec s;
  s.name = "double-grassmannian";
  s.n = a + b;
  s.sigma1 = signature_matrix(a, b);
  s.sigma2 = signature_matrix(c, d);
  s.params = {{"a", a}, {"b", b}, {"c", c}, {"d", d}};
  return s;
}

/// Replaces H by g H g⁻¹ with g = exp(X). Generally breaks commutation of the
/// involutions; frames and expected data are dropped.
inline TriadSpec make_conjugated(const TriadSpec& base, const Mat& x) {
  TriadSpec s = base;
  const Mat g = x.exp();
  s.name = base.name + "-conjugated";
  s.sigma2 = g * base.sigma2 * g.transpose();
  s.commuting_expected = false;
  s.t_frame.clear();
  s.tprime_frame.clear();
  s.expected_roots.clear();
  return s;
}

struct CatalogEntry {
  std::string name;
  std::string description;
  std::vector<std::string> params;
};

inline std::vector<CatalogEntry> list() {
  return {
      {"sphere-isotropy", "SO(n-1) acting on S^{n-1} = SO(n)/SO(n-1) (H = K)", {"n"}},
      {"grassmannian-isotropy", "S(O(a)xO(b)) acting on SO(a+b)/S(O(a)xO(b)) (H = K)", {"a", "b"}},
      {"double-grassmannian", "S(O(c)xO(d)) acting on SO(a+b)/S(O(a)xO(b))", {"a", "b", "c", "d"}},
      {"u-on-grassmannian", "U(p+q) acting on SO(2p+2q)/S(O(2p)xO(2q)), p <= q", {"p", "q"}},
  };
}

/// Selects a catalog triad by name; every listed parameter is required.
inline TriadSpec make(const std::string& name, const std::map<std::string, int>& params) {
  auto get = [&](const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw InputError("triad '" + name + "' requires --" + key);
    return it->second;
  };
  if (name == "sphere-isotropy") return make_isotropy(get("n"));
  if (name == "grassmannian-isotropy") return make_grassmannian_isotropy(get("a"), get("b"));
  if (name == "double-grassmannian") return make_double_grassmannian(get("a"), get("b"), get("c"), get("d"));
  if (name == "u-on-grassmannian") return make_unitary_on_grassmannian(get("p"), get("q"));
  throw InputError("unknown triad '" + name + "'");
}

}  // namespace hermann::catalog

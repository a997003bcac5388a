#pragma once

// Restricted and adapted root systems of a symmetric triad.
//
// a ⊂ m is a maximal abelian subspace containing t, where t is maximal
// abelian in h^⊥ ∩ m = m ∩ p. Restricted roots α ∈ Δ⁺ are the joint
// eigenvalue functionals of {ad_W² : W ∈ a} on m (ad_W² X = -α(W)² X).
// Adapted roots β ∈ Δ_t⁺ are the nonzero restrictions α|_t up to sign, and
// the adapted root spaces m^t_β, k^t_β are the sums of the m_α, k_α with
// α|_t = ±β. In the commuting case each splits into ∩h and ∩p parts whose
// dimensions are the multiplicities h_β and p_β.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hermann/triad.hpp"

namespace hermann {

namespace detail {

inline Vec gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

/// Largest ‖[b_i, b_j]‖ over pairs of columns of `basis`.
inline double max_pair_bracket(const Algebra& alg, const Mat& basis) {
  const auto el = alg.elements(basis);
  double worst = 0.0;
  for (size_t i = 0; i < el.size(); ++i)
    for (size_t j = i + 1; j < el.size(); ++j) worst = std::max(worst, alg.coords(bracket(el[i], el[j])).norm());
  return worst;
}

/// Orthonormal basis of {Y ∈ span(space) : [X, Y] = 0 for every column X of `of`}.
inline Mat centralizer(const Algebra& alg, const Mat& of, const Mat& space, double tol) {
  if (space.cols() == 0) return space;
  Mat stacked(0, space.cols());
  for (Eigen::Index c = 0; c < of.cols(); ++c) {
    Mat block = alg.ad(alg.element(of.col(c))) * space;
    Mat grown(stacked.rows() + block.rows(), space.cols());
    grown << stacked, block;
    stacked = std::move(grown);
  }
  if (stacked.rows() == 0) return space;
  return linalg::orthonormalize(space * linalg::null_space(stacked, tol), tol);
}

}  // namespace detail

struct MaximalAbelian {
  Mat basis;
  double bracket_residual = 0.0;
  double maximality_residual = 0.0;  ///< dim(centralizer) - dim(span), as a real
  int iterations = 0;
};

/// Greedy maximal abelian subspace of span(subspace): repeatedly restrict to
/// the centralizer of a seeded random element until the span is abelian.
inline MaximalAbelian maximal_abelian(const Algebra& alg, const Mat& subspace, std::mt19937_64& rng,
                                      const Tolerances& tol = {}) {
  MaximalAbelian out;
  Mat current = subspace;
  const int limit = static_cast<int>(subspace.cols()) + 1;
  const double bracket_tol = 1e-9;
  for (out.iterations = 0; out.iterations <= limit; ++out.iterations) {
    if (current.cols() <= 1 || detail::max_pair_bracket(alg, current) < bracket_tol) break;
    Vec x = current * detail::gaussian_vector(rng, current.cols());
    current = detail::centralizer(alg, x, current, tol.subspace);
  }
  if (out.iterations > limit) throw DegenerateError("maximal_abelian: no abelian span after dim iterations");
  out.basis = current;
  out.bracket_residual = detail::max_pair_bracket(alg, current);
  const Mat cent = detail::centralizer(alg, current, subspace, tol.subspace);
  out.maximality_residual = static_cast<double>(cent.cols() - current.cols());
  if (out.bracket_residual > bracket_tol || cent.cols() != current.cols())
    throw DegenerateError("maximal_abelian: could not certify maximality");
  return out;
}

struct AbelianFrames {
  Mat t_basis;       ///< orthonormal basis of t ⊂ m ∩ p
  Mat tprime_basis;  ///< orthonormal basis of t' with a = t ⊕ t'
  Mat a_basis;       ///< [t_basis | tprime_basis]
  Mat chart;         ///< section chart axes (coordinate columns); w ↦ chart * w
  bool explicit_frames = false;
  double bracket_residual = 0.0;
  bool t_maximal = false;
  bool a_maximal = false;
  int rank() const { return static_cast<int>(t_basis.cols()); }
};

struct RestrictedRoot {
  Vec coeffs;  ///< α on a_basis: α(W) = coeffs · coords_a(W)
  Mat m_space;
  Mat k_space;
  double residual = 0.0;  ///< joint-eigenvalue reconstruction residual
};

struct AdaptedRootDatum {
  Vec beta_coeffs;   ///< β on t_basis
  Vec chart_coeffs;  ///< β(e_i) on the chart axes
  Mat m_space, k_space;
  Mat mh_space, mp_space, kh_space, kp_space;
  int h_mult = -1;
  int p_mult = -1;
  bool splits = false;  ///< m^t_β and k^t_β split into ∩h and ∩p parts
  std::vector<int> sources;  ///< indices into the restricted roots
  std::string label;

  /// β(w) for w given in chart coordinates.
  double eval(const Vec& w) const { return chart_coeffs.dot(w); }
};

struct CentralizerDatum {
  Mat zm, zk;           ///< z_m(t), z_k(t)
  Mat zm_h, zm_p;       ///< refined split (commuting case)
  Mat zk_h, zk_p;
  Mat zk_a;             ///< z_k(a)
};

struct RootSystem {
  AbelianFrames frames;
  Vec ordering;  ///< generic element of a (a_basis coordinates) fixing Δ⁺
  std::vector<RestrictedRoot> roots;
  std::vector<AdaptedRootDatum> adapted;
  CentralizerDatum centralizer;
  std::uint64_t seed = kDefaultSeed;

  int rank() const { return frames.rank(); }
  /// Coordinates (Killing-orthonormal) of the section element with chart coordinates w.
  Vec section_coords(const Vec& w) const { return frames.chart * w; }
};

/// Builds t ⊂ m ∩ p and a = t ⊕ t' (explicit catalog frames when present
/// and `use_explicit`, otherwise the greedy construction).
inline AbelianFrames abelian_frames(const Triad& tr, std::mt19937_64& rng, bool use_explicit = true) {
  const Algebra& alg = tr.alg;
  const Mat& mp = tr.decomp.mp;
  if (mp.cols() == 0) throw DegenerateError("abelian_frames: m ∩ p is trivial (H acts transitively)");
  AbelianFrames f;
  const bool have_frame = use_explicit && !tr.spec.t_frame.empty();
  if (have_frame) {
    Mat cols(alg.dim(), static_cast<Eigen::Index>(tr.spec.t_frame.size()));
    for (size_t i = 0; i < tr.spec.t_frame.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = alg.coords(tr.spec.t_frame[i]);
    f.t_basis = linalg::orthonormalize(cols, tr.tol.subspace);
    if (f.t_basis.cols() != cols.cols()) throw InputError("explicit t frame is linearly dependent");
    if ((cols - mp * (mp.transpose() * cols)).norm() > 1e-9 * cols.norm())
      throw InputError("explicit t frame does not lie in m ∩ p");
    f.chart = cols;
    f.explicit_frames = true;
  } else {
    f.t_basis = maximal_abelian(alg, mp, rng, tr.tol).basis;
  }
  f.t_maximal = detail::centralizer(alg, f.t_basis, mp, tr.tol.subspace).cols() == f.t_basis.cols();
  if (!f.t_maximal) throw DegenerateError("abelian_frames: t is not maximal abelian in m ∩ p");

  const Mat zm = detail::centralizer(alg, f.t_basis, tr.decomp.m, tr.tol.subspace);
  const Mat rest = linalg::complement(zm, f.t_basis, tr.tol.subspace);
  if (have_frame && !tr.spec.tprime_frame.empty()) {
    Mat cols(alg.dim(), static_cast<Eigen::Index>(tr.spec.tprime_frame.size()));
    for (size_t i = 0; i < tr.spec.tprime_frame.size(); ++i)
      cols.col(static_cast<Eigen::Index>(i)) = alg.coords(tr.spec.tprime_frame[i]);
    f.tprime_basis = linalg::orthonormalize(cols, tr.tol.subspace);
  } else if (rest.cols() > 0) {
    f.tprime_basis = maximal_abelian(alg, rest, rng, tr.tol).basis;
  } else {
    f.tprime_basis = Mat(alg.dim(), 0);
  }
  f.a_basis = linalg::hstack({f.t_basis, f.tprime_basis}, alg.dim());
  f.bracket_residual = detail::max_pair_bracket(alg, f.a_basis);
  f.a_maximal = f.bracket_residual < 1e-9 &&
                detail::centralizer(alg, f.a_basis, tr.decomp.m, tr.tol.subspace).cols() == f.a_basis.cols();
  if (!f.a_maximal) throw DegenerateError("abelian_frames: a is not maximal abelian in m");
  return f;
}

/// Restricted roots of (g, k) with respect to a; positivity is α(W₀) > 0 for
/// the generic element W₀ = a_basis * ordering.
inline std::vector<RestrictedRoot> restricted_roots(const Triad& tr, const AbelianFrames& f, const Vec& ordering,
                                                    Mat* zk_a = nullptr) {
  const Algebra& alg = tr.alg;
  const Mat& m = tr.decomp.m;
  const Mat w0 = alg.element(f.a_basis * ordering);
  const Mat ad0 = alg.ad(w0);
  const Mat ad0sq_m = m.transpose() * ad0 * ad0 * m;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (ad0sq_m + ad0sq_m.transpose()));
  const Vec& mu = es.eigenvalues();  // ascending, all <= 0
  const double scale = std::max(1.0, mu.cwiseAbs().maxCoeff());
  const double ctol = tr.tol.root_cluster * scale;

  std::vector<Mat> ads;
  for (Eigen::Index i = 0; i < f.a_basis.cols(); ++i) ads.push_back(alg.ad(alg.element(f.a_basis.col(i))));

  std::vector<RestrictedRoot> roots;
  Eigen::Index zero_dim = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < mu.size();) {
    Eigen::Index j = i + 1;
    while (j < mu.size() && std::abs(mu(j) - mu(j - 1)) <= ctol) ++j;
    if (j < mu.size()) min_gap = std::min(min_gap, std::abs(mu(j) - mu(j - 1)));
    const Mat v = m * es.eigenvectors().middleCols(i, j - i);
    const double centre = mu.segment(i, j - i).mean();
    if (std::abs(centre) <= ctol) {
      zero_dim += j - i;
      i = j;
      continue;
    }
    // Joint eigenspace check for every basis direction of a.
    double resid = 0.0;
    for (const auto& a : ads) {
      const Mat img = a * a * v;
      const Mat rq = v.transpose() * img;
      const double c = rq.trace() / static_cast<double>(rq.rows());
      resid = std::max(resid, (img - c * v).norm());
    }
    if (resid > 1e-7 * scale) {
      std::ostringstream os;
      os << "restricted_roots: eigenvalue clusters not separable (joint residual " << resid
         << ", smallest gap " << min_gap << ")";
      throw DegenerateError(os.str());
    }
    RestrictedRoot r;
    const double alpha0 = std::sqrt(-centre);
    const Vec y = v.col(0);
    const Vec x_rel = ad0 * y / alpha0;  // related vector in k: [W₀, Y] = α(W₀) X
    r.coeffs.resize(static_cast<Eigen::Index>(ads.size()));
    for (size_t k = 0; k < ads.size(); ++k) r.coeffs(static_cast<Eigen::Index>(k)) = (ads[k] * y).dot(x_rel);
    r.m_space = v;
    r.k_space = linalg::orthonormalize(ad0 * v, 1e-9);
    // Reconstruction: ad_W² X = -α(W)² X for every basis W of a.
    for (size_t k = 0; k < ads.size(); ++k) {
      const double a = r.coeffs(static_cast<Eigen::Index>(k));
      r.residual = std::max(r.residual, (ads[k] * ads[k] * v + a * a * v).norm());
      r.residual = std::max(r.residual, (ads[k] * ads[k] * r.k_space + a * a * r.k_space).norm());
    }
    roots.push_back(std::move(r));
    i = j;
  }
  if (zero_dim != f.a_basis.cols())
    throw DegenerateError("restricted_roots: zero eigenspace of ad_W0^2 on m differs from a");
  if (zk_a) *zk_a = detail::centralizer(alg, f.a_basis, tr.decomp.k, tr.tol.subspace);
  return roots;
}

namespace detail {

/// Flips v so that its first entry above `tol` in magnitude is positive.
inline double lexicographic_sign(const Vec& v, double tol) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > tol) return v(i) > 0 ? 1.0 : -1.0;
  return 1.0;
}

inline std::string format_root_label(const Vec& c) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (i) os << ",";
    const double r = std::round(c(i));
    if (std::abs(c(i) - r) < 1e-9)
      os << static_cast<long long>(r);
    else
      os << c(i);
  }
  os << ")";
  return os.str();
}

}  // namespace detail

/// Groups restricted roots by ±-equal restrictions to t; builds m^t_β,
/// k^t_β, the σ₂ splits and the centralizers of t.
inline std::vector<AdaptedRootDatum> adapted_roots(const Triad& tr, const AbelianFrames& f,
                                                   const std::vector<RestrictedRoot>& roots,
                                                   CentralizerDatum* cent = nullptr) {
  const Algebra& alg = tr.alg;
  const Eigen::Index r = f.t_basis.cols();
  double scale = 1.0;
  for (const auto& a : roots) scale = std::max(scale, a.coeffs.norm());
  const double tol = 1e-8 * scale;
  const Mat to_chart = f.chart.transpose() * f.t_basis;  // β(e_i) = (to_chart * b)_i

  std::vector<AdaptedRootDatum> out;
  std::vector<Mat> zero_m{Mat(alg.dim(), 0)}, zero_k{Mat(alg.dim(), 0)};
  for (size_t idx = 0; idx < roots.size(); ++idx) {
    const Vec restr = roots[idx].coeffs.head(r);
    if (restr.norm() <= tol) {
      zero_m.push_back(roots[idx].m_space);
      zero_k.push_back(roots[idx].k_space);
      continue;
    }
    Vec chart = to_chart * restr;
    const double s = detail::lexicographic_sign(chart, tol);
    const Vec b = s * restr;
    auto hit = std::find_if(out.begin(), out.end(), [&](const AdaptedRootDatum& d) {
      return (d.beta_coeffs - b).norm() <= tol;
    });
    if (hit == out.end()) {
      AdaptedRootDatum d;
      d.beta_coeffs = b;
      d.chart_coeffs = s * chart;
      d.m_space = Mat(alg.dim(), 0);
      d.k_space = Mat(alg.dim(), 0);
      out.push_back(std::move(d));
      hit = out.end() - 1;
    }
    hit->sources.push_back(static_cast<int>(idx));
    hit->m_space = linalg::hstack({hit->m_space, roots[idx].m_space}, alg.dim());
    hit->k_space = linalg::hstack({hit->k_space, roots[idx].k_space}, alg.dim());
  }
  for (auto& d : out) {
    d.m_space = linalg::orthonormalize(d.m_space, 1e-9);
    d.k_space = linalg::orthonormalize(d.k_space, 1e-9);
    d.label = detail::format_root_label(d.chart_coeffs);
    try {
      std::tie(d.mh_space, d.mp_space) = split_eigenspaces(alg, tr.sigma2, d.m_space, tr.tol.subspace);
      std::tie(d.kh_space, d.kp_space) = split_eigenspaces(alg, tr.sigma2, d.k_space, tr.tol.subspace);
      d.splits = true;
      d.h_mult = static_cast<int>(d.mh_space.cols());
      d.p_mult = static_cast<int>(d.mp_space.cols());
    } catch (const InputError&) {
      // Expected when σ₁ and σ₂ do not commute: no refined split exists.
      d.splits = false;
    }
  }
  // Deterministic order: by chart-coefficient norm, then lexicographically.
  std::sort(out.begin(), out.end(), [](const AdaptedRootDatum& a, const AdaptedRootDatum& b) {
    const double na = a.chart_coeffs.norm(), nb = b.chart_coeffs.norm();
    if (std::abs(na - nb) > 1e-9) return na < nb;
    for (Eigen::Index i = 0; i < a.chart_coeffs.size(); ++i)
      if (std::abs(a.chart_coeffs(i) - b.chart_coeffs(i)) > 1e-9) return a.chart_coeffs(i) > b.chart_coeffs(i);
    return false;
  });
  if (cent) {
    cent->zm = linalg::orthonormalize(linalg::hstack({f.a_basis, linalg::hstack(zero_m, alg.dim())}, alg.dim()), 1e-9);
    cent->zk = detail::centralizer(alg, f.t_basis, tr.decomp.k, tr.tol.subspace);
    try {
      std::tie(cent->zm_h, cent->zm_p) = split_eigenspaces(alg, tr.sigma2, cent->zm, tr.tol.subspace);
      std::tie(cent->zk_h, cent->zk_p) = split_eigenspaces(alg, tr.sigma2, cent->zk, tr.tol.subspace);
    } catch (const InputError&) {
      cent->zm_h = linalg::intersect(cent->zm, tr.decomp.h, tr.tol.subspace);
      cent->zm_p = linalg::intersect(cent->zm, tr.decomp.p, tr.tol.subspace);
      cent->zk_h = linalg::intersect(cent->zk, tr.decomp.h, tr.tol.subspace);
      cent->zk_p = linalg::intersect(cent->zk, tr.decomp.p, tr.tol.subspace);
    }
  }
  return out;
}

/// Full root analysis of a triad. The ordering functional and every random
/// choice are derived from `seed`.
inline RootSystem analyze_roots(const Triad& tr, std::uint64_t seed = kDefaultSeed, bool use_explicit = true) {
  RootSystem rs;
  rs.seed = seed;
  std::mt19937_64 rng(seed);
  rs.frames = abelian_frames(tr, rng, use_explicit);
  rs.ordering = detail::gaussian_vector(rng, rs.frames.a_basis.cols());
  if (!rs.frames.explicit_frames) rs.frames.chart = rs.frames.t_basis;
  rs.roots = restricted_roots(tr, rs.frames, rs.ordering, &rs.centralizer.zk_a);
  if (!rs.frames.explicit_frames) {
    // Chart axes dual to r independent restricted roots (shortest first), so
    // every root is rational on the axes and each axis is a closed geodesic.
    const int r = rs.rank();
    std::vector<Vec> cands;
    for (const auto& a : rs.roots) {
      Vec c = a.coeffs.head(r);
      if (c.norm() > 1e-8) cands.push_back(c);
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Vec& x, const Vec& y) { return x.norm() < y.norm() - 1e-9; });
    Mat b(0, r);
    for (const auto& c : cands) {
      if (b.rows() == r) break;
      Mat trial(b.rows() + 1, r);
      trial << b, c.transpose();
      if (linalg::numeric_rank(trial, 1e-6) == trial.rows()) b = trial;
    }
    if (b.rows() == r && r > 0) {
      rs.frames.chart = rs.frames.t_basis * b.inverse();
    } else {
      double shortest = std::numeric_limits<double>::infinity();
      for (const auto& c : cands) shortest = std::min(shortest, c.norm());
      if (std::isfinite(shortest)) rs.frames.chart = rs.frames.t_basis / shortest;
    }
  }
  rs.adapted = adapted_roots(tr, rs.frames, rs.roots, &rs.centralizer);
  return rs;
}

struct RegularityReport {
  bool regular = true;
  std::vector<std::string> violations;
};

namespace detail {
/// Distance of x to the set offset + period·ℤ.
inline double lattice_distance(double x, double offset, double period) {
  const double y = (x - offset) / period;
  return std::abs(y - std::round(y)) * period;
}
}  // namespace detail

/// Regularity of Exp(w) (w in chart coordinates): β(w) ∉ π/2 + πℤ whenever
/// h_β ≠ 0 and β(w) ∉ πℤ whenever p_β ≠ 0.
inline RegularityReport is_regular(const Vec& w, const std::vector<AdaptedRootDatum>& adapted, double angle_tol = 1e-9) {
  RegularityReport rep;
  constexpr double pi = std::numbers::pi;
  for (const auto& d : adapted) {
    if (!d.splits) throw InputError("is_regular: adapted roots have no (p, h) split (non-commuting triad)");
    const double b = d.eval(w);
    if (d.h_mult > 0 && detail::lattice_distance(b, pi / 2, pi) < angle_tol) {
      rep.regular = false;
      rep.violations.push_back("cos: beta" + d.label + "(w) in pi/2 + pi Z (h=" + std::to_string(d.h_mult) + ")");
    }
    if (d.p_mult > 0 && detail::lattice_distance(b, 0.0, pi) < angle_tol) {
      rep.regular = false;
      rep.violations.push_back("sin: beta" + d.label + "(w) in pi Z (p=" + std::to_string(d.p_mult) + ")");
    }
  }
  return rep;
}

}  // namespace hermann

#pragma once

// Submanifold geometry of the H-orbits through section points Exp(w).
//
// Tangent vectors at p = Exp(w) are represented in m through the transvection
// exp(w), which is parallel translation along the geodesic t ↦ Exp(tw). In
// that picture
//   T_p Hp = pr_m(Ad_{exp(-w)} h),   R_v = -ad_v²,
//   A_u(pr_m X') = -pr_T [pr_k X', u]    (X' = Ad_{exp(-w)} X, X ⟂ h_p),
// where the last identity uses that the Killing field X commutes with the
// H-equivariant normal field. The finite-difference oracle works instead in
// the Cartan embedding of M and never uses these formulas.

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hermann/root_system.hpp"

namespace hermann {

enum class BlockTag { kCentralizerH, kRootH, kRootP };

inline const char* to_string(BlockTag t) {
  switch (t) {
    case BlockTag::kCentralizerH: return "zm_h";
    case BlockTag::kRootH: return "m_beta_h";
    case BlockTag::kRootP: return "m_beta_p";
  }
  return "?";
}

struct TangentBlock {
  BlockTag tag;
  int beta = -1;  ///< index into RootSystem::adapted, -1 for the centralizer block
  Mat basis;      ///< origin labels (coordinate columns in g)
};

struct OrbitFrame {
  Vec w;
  bool regular = false;
  std::vector<std::string> violations;
  std::vector<TangentBlock> tangent_blocks;
  Mat normal_basis;  ///< t plus the collapsed blocks
  int tangent_dim() const {
    int d = 0;
    for (const auto& b : tangent_blocks) d += static_cast<int>(b.basis.cols());
    return d;
  }
};

/// Tangent-space decomposition of the orbit through Exp(w), commuting triads.
inline OrbitFrame orbit_frame(const Triad& tr, const RootSystem& rs, const Vec& w) {
  if (!tr.decomp.commuting) throw InputError("orbit_frame: requires commuting involutions");
  constexpr double pi = std::numbers::pi;
  OrbitFrame f;
  f.w = w;
  const auto reg = is_regular(w, rs.adapted, tr.tol.angle);
  f.regular = reg.regular;
  f.violations = reg.violations;
  std::vector<Mat> normal{rs.frames.t_basis};
  if (rs.centralizer.zm_h.cols() > 0) f.tangent_blocks.push_back({BlockTag::kCentralizerH, -1, rs.centralizer.zm_h});
  for (size_t i = 0; i < rs.adapted.size(); ++i) {
    const auto& d = rs.adapted[i];
    const double b = d.eval(w);
    if (d.h_mult > 0) {
      if (detail::lattice_distance(b, pi / 2, pi) >= tr.tol.angle)
        f.tangent_blocks.push_back({BlockTag::kRootH, static_cast<int>(i), d.mh_space});
      else
        normal.push_back(d.mh_space);
    }
    if (d.p_mult > 0) {
      if (detail::lattice_distance(b, 0.0, pi) >= tr.tol.angle)
        f.tangent_blocks.push_back({BlockTag::kRootP, static_cast<int>(i), d.mp_space});
      else
        normal.push_back(d.mp_space);
    }
  }
  f.normal_basis = linalg::hstack(normal, tr.alg.dim());
  return f;
}

struct SpectrumEntry {
  double eigenvalue = 0.0;
  int multiplicity = 0;
  std::string tag;
  int beta = -1;
};

struct ShapeSpectrum {
  std::vector<SpectrumEntry> entries;
  Vec u;

  int total_multiplicity() const {
    int n = 0;
    for (const auto& e : entries) n += e.multiplicity;
    return n;
  }
  /// Eigenvalues repeated by multiplicity, ascending.
  std::vector<double> expanded() const {
    std::vector<double> out;
    for (const auto& e : entries)
      for (int k = 0; k < e.multiplicity; ++k) out.push_back(e.eigenvalue);
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// Shape operator A_{u(p)} of the orbit through a regular Exp(w):
/// β(u) tan β(w) on m^t_β ∩ h, -β(u) cot β(w) on m^t_β ∩ p, 0 on z_m(t) ∩ h.
inline ShapeSpectrum shape_spectrum_closed(const Triad& tr, const RootSystem& rs, const Vec& w, const Vec& u) {
  const OrbitFrame f = orbit_frame(tr, rs, w);
  if (!f.regular)
    throw SingularPointError("shape_spectrum_closed: Exp(w) is singular; use the general-spectrum path");
  ShapeSpectrum s;
  s.u = u;
  for (const auto& b : f.tangent_blocks) {
    SpectrumEntry e;
    e.multiplicity = static_cast<int>(b.basis.cols());
    e.tag = to_string(b.tag);
    e.beta = b.beta;
    if (b.tag == BlockTag::kCentralizerH) {
      e.eigenvalue = 0.0;
    } else {
      const auto& d = rs.adapted[static_cast<size_t>(b.beta)];
      const double bw = d.eval(w), bu = d.eval(u);
      e.eigenvalue = b.tag == BlockTag::kRootH ? bu * std::tan(bw) : -bu / std::tan(bw);
    }
    s.entries.push_back(e);
  }
  return s;
}

/// An operator on T_p Hp in an orthonormal basis of the tangent space.
struct TangentOperator {
  Mat tangent;  ///< orthonormal basis of T_p Hp (m-coordinates, or ambient for the oracle)
  Mat matrix;   ///< operator in that basis (symmetrised)
  double symmetry_defect = 0.0;  ///< ‖A - Aᵀ‖ / ‖A‖ before symmetrisation
};

namespace detail {

struct TangentData {
  Mat u_r;       ///< orthonormal tangent basis
  Vec s;         ///< singular values
  Mat v_r;       ///< h-coordinates of the directions complementary to the isotropy
};

inline TangentData tangent_svd(const Mat& pushforwards, double rank_tol) {
  TangentData t;
  if (pushforwards.cols() == 0 || pushforwards.norm() == 0.0) {
    t.u_r = Mat(pushforwards.rows(), 0);
    t.s = Vec(0);
    t.v_r = Mat(pushforwards.cols(), 0);
    return t;
  }
  Eigen::JacobiSVD<Mat> svd(pushforwards, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rank_tol * s(0)) ++r;
  t.u_r = svd.matrixU().leftCols(r);
  t.s = s.head(r);
  t.v_r = svd.matrixV().leftCols(r);
  return t;
}

inline TangentOperator finish_operator(const TangentData& td, const Mat& y) {
  TangentOperator op;
  op.tangent = td.u_r;
  Mat a = y * td.s.cwiseInverse().asDiagonal();
  const double nrm = a.norm();
  op.symmetry_defect = nrm > 0 ? (a - a.transpose()).norm() / nrm : 0.0;
  op.matrix = 0.5 * (a + a.transpose());
  return op;
}

/// Coordinates of Ad_{exp(-w)} X for every basis column X of h.
inline Mat transported_h(const Triad& tr, const Mat& w_elem) {
  const Mat g = mat_exp(w_elem, -1.0);
  const Mat& h = tr.decomp.h;
  Mat out(tr.alg.dim(), h.cols());
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    const Mat x = tr.alg.element(h.col(j));
    out.col(j) = tr.alg.coords(g * x * g.transpose());
  }
  return out;
}

}  // namespace detail

/// Tangent space of the orbit through Exp(w) in m-coordinates (orthonormal
/// columns over the basis of m).
inline Mat tangent_space(const Triad& tr, const RootSystem& rs, const Vec& w) {
  const Mat wel = tr.alg.element(rs.section_coords(w));
  const Mat xm = tr.decomp.m.transpose() * detail::transported_h(tr, wel);
  return detail::tangent_svd(xm, tr.tol.rank).u_r;
}

/// Shape operator A_u on T_p Hp from the Killing-field bracket formula
/// (exact up to rounding, valid at singular points for u in the section).
inline TangentOperator shape_operator_algebraic(const Triad& tr, const RootSystem& rs, const Vec& w, const Vec& u) {
  const Algebra& alg = tr.alg;
  const Mat wel = alg.element(rs.section_coords(w));
  const Mat uel = alg.element(rs.section_coords(u));
  const Mat z = detail::transported_h(tr, wel);
  const Mat xm = tr.decomp.m.transpose() * z;
  const detail::TangentData td = detail::tangent_svd(xm, tr.tol.rank);
  const Mat adu = alg.ad(uel);
  // -[X'_k, u] = ad_u(X'_k), then to m-coordinates.
  const Mat xk = tr.decomp.k * (tr.decomp.k.transpose() * z);
  const Mat b = tr.decomp.m.transpose() * (adu * xk);
  const Mat y = td.u_r.transpose() * b * td.v_r;
  return detail::finish_operator(td, y);
}

/// Curvature operator R_v = -ad_v² on T_p Hp (given as m-coordinate basis);
/// `invariance` receives ‖R T - T (Tᵀ R T)‖.
inline Mat curvature_on_tangent(const Triad& tr, const RootSystem& rs, const Mat& tangent, const Vec& v,
                                double* invariance = nullptr) {
  const Mat adv = tr.alg.ad(tr.alg.element(rs.section_coords(v)));
  const Mat rm = -(tr.decomp.m.transpose() * adv * adv * tr.decomp.m);
  const Mat restricted = tangent.transpose() * rm * tangent;
  if (invariance) *invariance = (rm * tangent - tangent * restricted).norm();
  return restricted;
}

/// R_v(x) at the origin representation: -[[x, v], v] with x, v ∈ m.
inline Mat curvature_operator(const Algebra&, const Mat& v, const Mat& x) {
  return -bracket(bracket(x, v), v);
}

struct CommutationResidual {
  double curvature_shape = 0.0;  ///< ‖[R_v|_T, A_u]‖ / (max(‖R_v‖, |v|²) max(‖A_u‖, |u|))
  double shape_shape = 0.0;      ///< ‖[A_v, A_u]‖ / (max(‖A_v‖, |v|) max(‖A_u‖, |u|))
  double invariance = 0.0;       ///< ‖R_v T - T R_v|_T‖
  int tangent_dim = 0;
};

inline CommutationResidual commutation_residual(const Triad& tr, const RootSystem& rs, const Vec& w, const Vec& v,
                                                const Vec& u) {
  // Operator norms are floored at the size of the section vector (squared
  // for R_v): a vanishing A_u (totally geodesic singular orbit) would
  // otherwise turn rounding noise into an O(1) relative residual.
  auto normalized = [](const Mat& a, double fa, const Mat& b, double fb) {
    const double d = std::max(a.norm(), fa) * std::max(b.norm(), fb);
    return d > 0 ? (a * b - b * a).norm() / d : 0.0;
  };
  const TangentOperator au = shape_operator_algebraic(tr, rs, w, u);
  const TangentOperator av = shape_operator_algebraic(tr, rs, w, v);
  CommutationResidual r;
  const Mat rv = curvature_on_tangent(tr, rs, au.tangent, v, &r.invariance);
  const double nu = u.norm(), nv = v.norm();
  r.curvature_shape = normalized(rv, nv * nv, au.matrix, nu);
  r.shape_shape = normalized(av.matrix, nv, au.matrix, nu);
  r.tangent_dim = static_cast<int>(au.tangent.cols());
  return r;
}

/// Finite-difference oracle for A_u in the Cartan embedding: the
/// H-equivariant normal field ξ(h·p) = dh(u(p)) is differentiated along the
/// orbit by central differences, projected onto T_p Hp (Frobenius metric) and
/// symmetrised.
inline TangentOperator shape_operator_numeric(const Triad& tr, const RootSystem& rs, const Vec& w, const Vec& u,
                                              double step = 1e-4) {
  if (!(step > 1e-8 && step < 0.1)) throw InputError("shape_operator_numeric: finite-difference step out of range");
  const Algebra& alg = tr.alg;
  const CartanModel& cm = tr.model;
  const Mat wel = alg.element(rs.section_coords(w));
  const Mat uel = alg.element(rs.section_coords(u));
  const SpacePoint p = cm.exp_point(wel);
  const Mat xi = cm.killing_field_value(uel, p);  // u(p) = d/dt Exp(w + t u)
  const Eigen::Index n2 = p.cartan_image.size();
  const Eigen::Index dh = tr.decomp.h.cols();
  Mat tangents(n2, dh), derivs(n2, dh);
  for (Eigen::Index j = 0; j < dh; ++j) {
    const Mat x = alg.element(tr.decomp.h.col(j));
    const Mat tv = cm.killing_field_value(x, p);
    tangents.col(j) = Eigen::Map<const Vec>(tv.data(), n2);
    const Mat plus = cm.push(mat_exp(x, step), xi);
    const Mat minus = cm.push(mat_exp(x, -step), xi);
    const Mat d = (plus - minus) / (2.0 * step);
    derivs.col(j) = Eigen::Map<const Vec>(d.data(), n2);
  }
  const detail::TangentData td = detail::tangent_svd(tangents, tr.tol.rank);
  const Mat y = -(td.u_r.transpose() * derivs * td.v_r);
  TangentOperator op = detail::finish_operator(td, y);
  if (op.symmetry_defect > 1e-3)
    throw DegenerateError("shape_operator_numeric: unstable finite differences (symmetry defect " +
                          std::to_string(op.symmetry_defect) + ")");
  return op;
}

/// Sorted eigenvalues of a symmetric operator.
inline std::vector<double> operator_eigenvalues(const TangentOperator& op) {
  if (op.matrix.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Mat> es(op.matrix);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(v.begin(), v.end());
  return v;
}

/// Max over matched sorted eigenvalues of |a - b| / max(1, |b|); infinity
/// when the counts differ.
inline double max_relative_eigen_error(const std::vector<double>& numeric, const std::vector<double>& reference) {
  if (numeric.size() != reference.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (size_t i = 0; i < numeric.size(); ++i)
    worst = std::max(worst, std::abs(numeric[i] - reference[i]) / std::max(1.0, std::abs(reference[i])));
  return worst;
}

/// Spectrum of a numeric operator grouped into (eigenvalue, multiplicity).
inline ShapeSpectrum spectrum_from_operator(const TangentOperator& op, const Vec& u, double cluster_tol = 1e-6) {
  ShapeSpectrum s;
  s.u = u;
  for (double ev : operator_eigenvalues(op)) {
    if (!s.entries.empty() && std::abs(s.entries.back().eigenvalue - ev) <= cluster_tol * std::max(1.0, std::abs(ev))) {
      auto& e = s.entries.back();
      e.eigenvalue = (e.eigenvalue * e.multiplicity + ev) / (e.multiplicity + 1);
      ++e.multiplicity;
    } else {
      s.entries.push_back({ev, 1, "numeric", -1});
    }
  }
  return s;
}

/// Numeric rank of the Gram matrix of the Killing fields X(p), X ∈ h, at Exp(w).
inline int tangent_rank_numeric(const Triad& tr, const RootSystem& rs, const Vec& w, double rel_tol = 1e-7) {
  const Mat wel = tr.alg.element(rs.section_coords(w));
  const SpacePoint p = tr.model.exp_point(wel);
  const Eigen::Index n2 = p.cartan_image.size();
  Mat t(n2, tr.decomp.h.cols());
  for (Eigen::Index j = 0; j < tr.decomp.h.cols(); ++j) {
    const Mat v = tr.model.killing_field_value(tr.alg.element(tr.decomp.h.col(j)), p);
    t.col(j) = Eigen::Map<const Vec>(v.data(), n2);
  }
  const Mat gram = t.transpose() * t;
  return static_cast<int>(linalg::numeric_rank(gram, rel_tol));
}

// ---------------------------------------------------------------------------
// General (not necessarily commuting) triads.

struct GeneralBlock {
  int beta = -1;  ///< adapted root index
  int index = 0;  ///< i in V_{β,i}
  Mat basis;      ///< V_{β,i} (m-coordinates at the reference point)
  double c = 0.0;
  double t = 0.0;                ///< t_{β,i} ∈ (0, π)
  double law_residual = 0.0;     ///< ‖A_v - c β(v)‖ over the chart axes
  int dim() const { return static_cast<int>(basis.cols()); }
};

struct GeneralSpectrumDatum {
  Vec reference;  ///< chart coordinates of the reference (regular) point
  std::vector<GeneralBlock> blocks;
  int zero_block_dim = 0;
  double zero_block_residual = 0.0;
  double joint_residual = 0.0;

  /// t_{β,i} measured from Exp(0) instead of the reference point, in (0, π].
  double t_from_origin(const GeneralBlock& b, const RootSystem& rs) const {
    constexpr double pi = std::numbers::pi;
    double t = b.t + rs.adapted[static_cast<size_t>(b.beta)].eval(reference);
    t = std::fmod(t, pi);
    if (t < 1e-9) t += pi;  // (0, π]; rounding near 0 means π
    return t;
  }
};

/// Solves cos t - c sin t = 0 on (0, π) by bisection to a bracket of 1e-12.
inline double first_jacobi_zero(double c) {
  constexpr double pi = std::numbers::pi;
  auto f = [c](double t) { return std::cos(t) - c * std::sin(t); };
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12; };
  const auto r = boost::math::tools::bisect(f, 0.0, pi, tol);
  return 0.5 * (r.first + r.second);
}

/// Refines every m^t_β at the regular reference point into joint eigenspaces
/// V_{β,i} of {A_v, R_v : v ∈ t}; records c_{β,i} and t_{β,i}.
inline GeneralSpectrumDatum general_spectrum(const Triad& tr, const RootSystem& rs, const Vec& reference,
                                             std::uint64_t seed = kDefaultSeed) {
  const int r = rs.rank();
  GeneralSpectrumDatum g;
  g.reference = reference;
  std::vector<TangentOperator> shapes;
  std::vector<Mat> curvs;
  for (int j = 0; j < r; ++j) {
    const Vec e = Vec::Unit(r, j);
    shapes.push_back(shape_operator_algebraic(tr, rs, reference, e));
  }
  const Mat tangent = shapes.front().tangent;
  const int expected_dim = static_cast<int>(tr.decomp.m.cols()) - r;
  if (tangent.cols() != expected_dim)
    throw SingularPointError("general_spectrum: reference point is not regular (tangent dim " +
                             std::to_string(tangent.cols()) + ", expected " + std::to_string(expected_dim) + ")");
  for (int j = 0; j < r; ++j) curvs.push_back(curvature_on_tangent(tr, rs, tangent, Vec::Unit(r, j)));
  // R along e_i + e_j separates β from roots with the same squares on the axes.
  std::vector<Vec> probes;
  std::vector<Mat> probe_curvs;
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      probes.push_back(Vec::Unit(r, i) + Vec::Unit(r, j));
      probe_curvs.push_back(curvature_on_tangent(tr, rs, tangent, probes.back()));
    }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(0.5, 1.5);
  Mat l = Mat::Zero(tangent.cols(), tangent.cols());
  for (int j = 0; j < r; ++j) l += coef(rng) * curvs[static_cast<size_t>(j)] + coef(rng) * shapes[static_cast<size_t>(j)].matrix;
  Eigen::SelfAdjointEigenSolver<Mat> es(l);
  const Vec& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<int> count(rs.adapted.size(), 0);
  for (Eigen::Index i = 0; i < ev.size();) {
    Eigen::Index j = i + 1;
    while (j < ev.size() && std::abs(ev(j) - ev(j - 1)) <= 1e-8 * scale) ++j;
    const Mat v = es.eigenvectors().middleCols(i, j - i);
    Vec rv(r), av(r);
    for (int k = 0; k < r; ++k) {
      const Mat rr = v.transpose() * curvs[static_cast<size_t>(k)] * v;
      const Mat aa = v.transpose() * shapes[static_cast<size_t>(k)].matrix * v;
      rv(k) = rr.trace() / static_cast<double>(rr.rows());
      av(k) = aa.trace() / static_cast<double>(aa.rows());
      g.joint_residual = std::max(g.joint_residual, (curvs[static_cast<size_t>(k)] * v - rv(k) * v).norm());
      g.joint_residual = std::max(g.joint_residual, (shapes[static_cast<size_t>(k)].matrix * v - av(k) * v).norm());
    }
    if (rv.norm() < 1e-8 * scale) {
      g.zero_block_dim += static_cast<int>(v.cols());
      g.zero_block_residual = std::max(g.zero_block_residual, av.norm());
    } else {
      int best = -1;
      double best_err = std::numeric_limits<double>::infinity();
      Vec pv(static_cast<Eigen::Index>(probes.size()));
      for (size_t k = 0; k < probes.size(); ++k) {
        const Mat rr = v.transpose() * probe_curvs[k] * v;
        pv(static_cast<Eigen::Index>(k)) = rr.trace() / static_cast<double>(rr.rows());
      }
      for (size_t b = 0; b < rs.adapted.size(); ++b) {
        const Vec bc = rs.adapted[b].chart_coeffs;
        double err = (bc.cwiseProduct(bc) - rv).squaredNorm();
        for (size_t k = 0; k < probes.size(); ++k) {
          const double bp = bc.dot(probes[k]);
          err += std::pow(bp * bp - pv(static_cast<Eigen::Index>(k)), 2);
        }
        err = std::sqrt(err);
        if (err < best_err) {
          best_err = err;
          best = static_cast<int>(b);
        }
      }
      if (best_err > 1e-6 * scale) throw DegenerateError("general_spectrum: curvature eigenvalues match no adapted root");
      const Vec bc = rs.adapted[static_cast<size_t>(best)].chart_coeffs;
      GeneralBlock blk;
      blk.beta = best;
      blk.index = count[static_cast<size_t>(best)]++;
      blk.basis = tangent * v;
      blk.c = av.dot(bc) / bc.squaredNorm();
      blk.law_residual = (av - blk.c * bc).norm();
      blk.t = first_jacobi_zero(blk.c);
      g.blocks.push_back(std::move(blk));
    }
    i = j;
  }
  return g;
}

/// A_v at Exp(w): β(v) cot(t_{β,i} - β(w - w_ref)) on V_{β,i}, 0 on the
/// centralizer block.
inline ShapeSpectrum eval_general_shape(const RootSystem& rs, const GeneralSpectrumDatum& g, const Vec& w, const Vec& v) {
  ShapeSpectrum s;
  s.u = v;
  const Vec delta = w - g.reference;
  for (const auto& b : g.blocks) {
    const auto& d = rs.adapted[static_cast<size_t>(b.beta)];
    const double arg = b.t - d.eval(delta);
    if (std::abs(std::sin(arg)) < 1e-12) {
      std::ostringstream os;
      os << "eval_general_shape: focal point for block V_{" << d.label << "," << b.index << "}";
      throw SingularPointError(os.str());
    }
    s.entries.push_back({d.eval(v) * std::cos(arg) / std::sin(arg), b.dim(), "V_beta_i", b.beta});
  }
  if (g.zero_block_dim > 0) s.entries.push_back({0.0, g.zero_block_dim, "zm_prh", -1});
  return s;
}

// ---------------------------------------------------------------------------
// Relative densities.

/// F_p(q) for p = Exp(w), q = Exp(w_target) in one chamber segment.
inline double relative_density(const RootSystem& rs, const Vec& w, const Vec& w_target) {
  constexpr double pi = std::numbers::pi;
  const Vec delta = w_target - w;
  double f = 1.0;
  for (const auto& d : rs.adapted) {
    if (!d.splits) throw InputError("relative_density: requires the (p, h) split of a commuting triad");
    const double b0 = d.eval(w), b1 = d.eval(w_target), bd = d.eval(delta);
    auto crosses = [&](double offset) {
      const double lo = std::min(b0, b1), hi = std::max(b0, b1);
      const double k = std::ceil((lo - offset) / pi);
      return offset + k * pi <= hi + 1e-12;
    };
    if ((d.p_mult > 0 && crosses(0.0)) || (d.h_mult > 0 && crosses(pi / 2)))
      throw SingularPointError("relative_density: segment crosses a singular hyperplane of beta" + d.label);
    const double fp = std::cos(bd) + std::sin(bd) / std::tan(b0);
    const double fh = std::cos(bd) - std::tan(b0) * std::sin(bd);
    f *= std::pow(fp, d.p_mult) * std::pow(fh, d.h_mult);
  }
  return f;
}

/// Independent oracle for F_p(q): ratio of √det Gram matrices of the
/// pushforwards of a fixed basis of an isotropy complement in h.
inline double gram_density_ratio(const Triad& tr, const RootSystem& rs, const Vec& w, const Vec& w_target) {
  auto pushforwards = [&](const Vec& at) {
    const SpacePoint p = tr.model.exp_point(tr.alg.element(rs.section_coords(at)));
    const Eigen::Index n2 = p.cartan_image.size();
    Mat t(n2, tr.decomp.h.cols());
    for (Eigen::Index j = 0; j < tr.decomp.h.cols(); ++j) {
      const Mat v = tr.model.killing_field_value(tr.alg.element(tr.decomp.h.col(j)), p);
      t.col(j) = Eigen::Map<const Vec>(v.data(), n2);
    }
    return t;
  };
  const Mat tp = pushforwards(w);
  const detail::TangentData td = detail::tangent_svd(tp, tr.tol.rank);
  const Mat basis = td.v_r;  // fixed complement of the isotropy algebra at p
  const Mat gp = (tp * basis).transpose() * (tp * basis);
  const Mat tq = pushforwards(w_target) * basis;
  const Mat gq = tq.transpose() * tq;
  Eigen::LLT<Mat> lp(gp), lq(gq);
  if (lp.info() != Eigen::Success || lq.info() != Eigen::Success)
    throw SingularPointError("gram_density_ratio: degenerate Gram matrix (singular orbit)");
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < gp.rows(); ++i)
    logdet += std::log(Mat(lq.matrixL())(i, i)) - std::log(Mat(lp.matrixL())(i, i));
  return std::exp(logdet);
}

}  // namespace hermann

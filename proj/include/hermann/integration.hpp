#pragma once

// Density θ on the section, orbit-volume ratios, the section-quadrature form
// of the integration formula and its Haar Monte-Carlo oracle.
//
// Every density factor is stored as |sin(β(w) - t)|^d. For commuting triads
// the p-part of a root has t = 0 and the h-part t = π/2, so
// |sin β|^{p_β} |cos β|^{h_β} and the general-case product coincide exactly.

#include <boost/math/tools/minima.hpp>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hermann/orbit_geometry.hpp"

namespace hermann {

struct DensityFactor {
  Vec coeffs;  ///< β on chart coordinates
  double t = 0.0;
  int dim = 0;
  std::string label;
  std::string kind;  ///< "p", "h" or "V" (general case)
};

struct DensityProfile {
  std::vector<DensityFactor> factors;
  bool general = false;

  double eval(const Vec& w) const {
    double v = 1.0;
    for (const auto& f : factors) v *= std::pow(std::abs(std::sin(f.coeffs.dot(w) - f.t)), f.dim);
    return v;
  }
};

/// θ(w) = Π |sin β(w)|^{p_β} |cos β(w)|^{h_β} over Δ_t⁺.
inline DensityProfile density_profile(const RootSystem& rs) {
  DensityProfile d;
  for (const auto& r : rs.adapted) {
    if (!r.splits) throw InputError("density_profile: roots do not split; use the general-spectrum profile");
    if (r.p_mult > 0) d.factors.push_back({r.chart_coeffs, 0.0, r.p_mult, r.label, "p"});
    if (r.h_mult > 0) d.factors.push_back({r.chart_coeffs, std::numbers::pi / 2, r.h_mult, r.label, "h"});
  }
  return d;
}

/// General-case θ(w) = Π_{β,i} |sin(β(w) - t_{β,i})|^{dim V_{β,i}}, with the
/// t_{β,i} moved to the chart origin so that w is an absolute coordinate.
inline DensityProfile density_profile(const RootSystem& rs, const GeneralSpectrumDatum& g) {
  DensityProfile d;
  d.general = true;
  for (const auto& b : g.blocks) {
    const auto& r = rs.adapted[static_cast<size_t>(b.beta)];
    d.factors.push_back({r.chart_coeffs, g.t_from_origin(b, rs), b.dim(), r.label, "V"});
  }
  return d;
}

inline double theta(const Vec& w, const DensityProfile& p) { return p.eval(w); }

/// Vol(H·Exp(w2)) / Vol(H·Exp(w1)) = θ(w2)/θ(w1).
inline double orbit_volume_ratio(const Vec& w1, const Vec& w2, const DensityProfile& p) {
  const double a = p.eval(w1), b = p.eval(w2);
  if (a < 1e-300 || b < 1e-300) throw SingularPointError("orbit_volume_ratio: singular point (theta = 0)");
  return b / a;
}

// ---------------------------------------------------------------------------
// Section lattice.

struct ReflectionCheck {
  std::string label;
  double offset = 0.0;  ///< hyperplane β(w) = offset
  bool accepted = false;
  double theta_residual = 0.0;
};

struct SectionLattice {
  std::vector<double> axis_periods;
  Vec box;                        ///< cell [0, T_1] × ... × [0, T_r]
  double metric_jacobian = 1.0;   ///< √det of the flat metric in chart coordinates
  std::optional<int> weyl_order_estimate;
  std::string weyl_note;
  std::vector<ReflectionCheck> reflections;
  double max_reflection_residual = 0.0;  ///< θ(r w) - θ(w) over accepted reflections
  double max_period_residual = 0.0;      ///< ‖cartan(Exp(T_i e_i)) - I‖
};

struct LatticeConfig {
  double max_period = 16.0 * std::numbers::pi;
  double scan_step = 0.01;
  int weyl_cap = 4096;
  std::uint64_t seed = kDefaultSeed;
};

namespace detail {

inline double origin_distance(const Triad& tr, const RootSystem& rs, const Vec& w) {
  const SpacePoint p = tr.model.exp_point(tr.alg.element(rs.section_coords(w)));
  return (p.cartan_image - Mat::Identity(tr.n(), tr.n())).norm();
}

inline Vec reduce_to_box(Vec w, const Vec& box) {
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w(i) = std::fmod(w(i), box(i));
    if (w(i) < 0) w(i) += box(i);
  }
  return w;
}

/// Conjugation invariants of y = x C₁ under the fixed group of σ₂.
inline Vec orbit_invariants(const Mat& x, const Mat& c1, const Mat& c2, int count = 4) {
  const Mat yc = x * c1 * c2;
  const Mat z = x * c1 * c2 * x * c1 * c2.transpose();
  Vec v(2 * count);
  Mat a = Mat::Identity(x.rows(), x.cols()), b = a;
  for (int k = 0; k < count; ++k) {
    a = a * yc;
    b = b * z;
    v(2 * k) = a.trace();
    v(2 * k + 1) = b.trace();
  }
  return v;
}

}  // namespace detail

/// Per-axis period search: coarse scan of ‖cartan(Exp(T e_i)) - I‖ followed
/// by Brent refinement of the first near-zero local minimum. The |W| estimate
/// closes a generic point under the wall reflections that preserve θ and the
/// orbit invariants, modulo the cell, and counts distinct Cartan images.
inline SectionLattice section_lattice(const Triad& tr, const RootSystem& rs, const DensityProfile& prof,
                                      const LatticeConfig& cfg = {}) {
  const int r = rs.rank();
  if (r == 0) throw InputError("section_lattice: the section is a point");
  SectionLattice lat;
  lat.box = Vec(r);
  for (int i = 0; i < r; ++i) {
    const Vec e = Vec::Unit(r, i);
    auto dist = [&](double t) { return detail::origin_distance(tr, rs, t * e); };
    double prev2 = dist(cfg.scan_step), prev = dist(2 * cfg.scan_step);
    std::optional<double> found;
    for (double t = 3 * cfg.scan_step; t <= cfg.max_period + cfg.scan_step; t += cfg.scan_step) {
      const double cur = dist(t);
      if (prev < prev2 && prev <= cur && prev < 0.1) {
        const double mid = t - cfg.scan_step;
        std::uintmax_t it = 200;
        const auto m = boost::math::tools::brent_find_minima(dist, mid - cfg.scan_step, mid + cfg.scan_step, 52, it);
        if (m.second < 1e-6) {
          // Brent stalls near √eps on this V-shaped distance; bisect the
          // signed projection onto the initial velocity (x(t) = exp(2tE)).
          const SpacePoint o = tr.model.origin();
          const Mat v0 = tr.model.killing_field_value(tr.alg.element(rs.section_coords(e)), o);
          auto signed_dist = [&](double s) {
            const SpacePoint p = tr.model.exp_point(tr.alg.element(rs.section_coords(s * e)));
            return ((p.cartan_image - o.cartan_image).array() * v0.array()).sum();
          };
          double t0 = m.first;
          const double a = t0 - 1e-5, b = t0 + 1e-5;
          if (signed_dist(a) * signed_dist(b) < 0) {
            auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-15 * std::max(1.0, std::abs(x)); };
            const auto br = boost::math::tools::bisect(signed_dist, a, b, tol);
            t0 = 0.5 * (br.first + br.second);
          }
          found = t0;
          lat.max_period_residual = std::max(lat.max_period_residual, dist(t0));
          break;
        }
      }
      prev2 = prev;
      prev = cur;
    }
    if (!found) {
      std::ostringstream os;
      os << "section_lattice: no period found on axis " << i << " below " << cfg.max_period;
      throw DegenerateError(os.str());
    }
    lat.axis_periods.push_back(*found);
    lat.box(i) = *found;
  }
  const Mat gram = rs.frames.chart.transpose() * rs.frames.chart;
  lat.metric_jacobian = std::sqrt(gram.determinant());

  // Wall reflections.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  auto random_point = [&] {
    Vec w(r);
    for (int i = 0; i < r; ++i) w(i) = unit(rng) * lat.box(i);
    return w;
  };
  std::vector<Vec> probes;
  for (int k = 0; k < 6; ++k) probes.push_back(random_point());
  const Mat ginv = gram.inverse();
  auto image = [&](const Vec& w) { return tr.model.exp_point(tr.alg.element(rs.section_coords(w))).cartan_image; };
  auto invariants = [&](const Vec& w) { return detail::orbit_invariants(image(w), tr.spec.sigma1, tr.spec.sigma2); };
  struct Refl {
    Vec b, grad;
    double c;
  };
  std::vector<Refl> accepted;
  auto reflect = [](const Refl& f, const Vec& w) -> Vec { return w - 2.0 * (f.b.dot(w) - f.c) * f.grad; };
  for (const auto& fac : prof.factors) {
    double lo = 0, hi = 0;
    for (int corner = 0; corner < (1 << r); ++corner) {
      Vec c(r);
      for (int i = 0; i < r; ++i) c(i) = (corner >> i & 1) ? lat.box(i) : 0.0;
      const double v = fac.coeffs.dot(c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const Vec grad = ginv * fac.coeffs / fac.coeffs.dot(ginv * fac.coeffs);
    for (int k = static_cast<int>(std::floor((lo - fac.t) / std::numbers::pi));
         k <= static_cast<int>(std::ceil((hi - fac.t) / std::numbers::pi)); ++k) {
      Refl f{fac.coeffs, grad, fac.t + k * std::numbers::pi};
      ReflectionCheck chk;
      chk.label = fac.label;
      chk.offset = f.c;
      bool ok = true;
      for (const auto& w : probes) {
        const Vec rw = reflect(f, w);
        const double th = prof.eval(w);
        chk.theta_residual = std::max(chk.theta_residual, std::abs(prof.eval(rw) - th));
        const Vec a = invariants(w), b = invariants(rw);
        if ((a - b).norm() > 1e-7 * std::max(1.0, a.norm())) ok = false;
      }
      chk.accepted = ok && chk.theta_residual < 1e-9;
      if (chk.accepted) {
        accepted.push_back(f);
        lat.max_reflection_residual = std::max(lat.max_reflection_residual, chk.theta_residual);
      }
      lat.reflections.push_back(chk);
    }
  }

  // Orbit of a generic point under the accepted reflections, deduplicated by
  // Cartan image.
  std::vector<Vec> orbit{random_point()};
  std::vector<Mat> images{image(orbit.front())};
  bool capped = false;
  for (size_t head = 0; head < orbit.size() && !capped; ++head) {
    for (const auto& f : accepted) {
      const Vec w2 = detail::reduce_to_box(reflect(f, orbit[head]), lat.box);
      const Mat im = image(w2);
      bool seen = false;
      for (const auto& m : images)
        if ((m - im).norm() < 1e-7) {
          seen = true;
          break;
        }
      if (!seen) {
        orbit.push_back(w2);
        images.push_back(im);
        if (static_cast<int>(orbit.size()) > cfg.weyl_cap) {
          capped = true;
          break;
        }
      }
    }
  }
  std::ostringstream note;
  if (capped) {
    note << "unavailable: reflection orbit exceeded " << cfg.weyl_cap << " points";
  } else {
    lat.weyl_order_estimate = static_cast<int>(orbit.size());
    note << "heuristic estimate: orbit of a generic point under " << accepted.size()
         << " accepted wall reflections (theta and trace invariants checked), deduplicated by Cartan image";
  }
  lat.weyl_note = note.str();
  return lat;
}

/// Vol(Hp)/Vol(M) = |W| θ(w) / ∫_Σ θ. Without a |W| estimate the |W|-free
/// quantity θ(w)/∫_Σ θ is returned and `estimate_used` is false.
struct VolumeFraction {
  double value = 0.0;
  bool estimate_used = false;
  std::string note;
};

// ---------------------------------------------------------------------------
// Invariant test functions on M, in terms of the Cartan image x.

using SpaceFunction = std::function<double(const Mat&)>;

struct NamedFunction {
  std::string name;
  SpaceFunction fn;
};

/// Exactly H-invariant functions built from y = x C₁, on which h acts by
/// conjugation: I1 = tr(y C₂)/n, I2 = tr(y C₂ y C₂ᵀ)/n, I3 = tr((y C₂)²)/n.
inline std::vector<NamedFunction> invariant_test_functions(const Triad& tr) {
  const Mat c1 = tr.spec.sigma1, c2 = tr.spec.sigma2;
  const double n = tr.n();
  auto inv = [c1, c2, n](const Mat& x, int which) {
    const Mat yc = x * c1 * c2;
    if (which == 1) return yc.trace() / n;
    if (which == 2) return (yc * x * c1 * c2.transpose()).trace() / n;
    return (yc * yc).trace() / n;
  };
  std::vector<NamedFunction> out;
  out.push_back({"one", [](const Mat&) { return 1.0; }});
  out.push_back({"inv1", [inv](const Mat& x) { return inv(x, 1) + inv(x, 2); }});
  out.push_back({"inv2", [inv](const Mat& x) { return inv(x, 2) * inv(x, 2); }});
  out.push_back({"inv3", [inv](const Mat& x) { return std::exp(inv(x, 3)); }});
  out.push_back({"inv4", [inv](const Mat& x) { return std::cos(3.0 * inv(x, 2)) + inv(x, 1) * inv(x, 3); }});
  if (tr.spec.name == "sphere-isotropy") {
    // cos² of the colatitude of the line g e_n: y = I - 2 v vᵀ, so v_n² = (1 - y_nn)/2.
    out.push_back({"cos2", [c1](const Mat& x) {
                     const Mat y = x * c1;
                     const Eigen::Index k = y.rows() - 1;
                     return 0.5 * (1.0 - y(k, k));
                   }});
  }
  return out;
}

inline const NamedFunction& find_function(const std::vector<NamedFunction>& fs, const std::string& name) {
  for (const auto& f : fs)
    if (f.name == name) return f;
  std::string known;
  for (const auto& f : fs) known += " " + f.name;
  throw InputError("unknown test function '" + name + "' (available:" + known + ")");
}

// ---------------------------------------------------------------------------
// Haar sampling.

/// Haar-uniform element of SO(n): Gaussian matrix, QR, sign-corrected
/// diagonal, then a column flip if the determinant is -1.
template <class Rng>
Mat haar_orthogonal(int n, Rng& rng, bool special = true) {
  std::normal_distribution<double> nd;
  Mat a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = nd(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  const Mat& r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  if (special && q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

template <class Rng>
Mat haar_so(int n, Rng& rng) {
  return haar_orthogonal(n, rng, true);
}

/// Haar sampler for H = {g ∈ SO(n) : g C₂ = C₂ g}, for C₂ symmetric
/// (H = S(O(k₊) × O(k₋)) in the ±1 eigenbasis) or skew (H = U(n/2) in a
/// J-adapted basis).
class HaarH {
 public:
  explicit HaarH(const Mat& c2) : n_(static_cast<int>(c2.rows())) {
    if ((c2 - c2.transpose()).norm() < 1e-10) {
      symmetric_ = true;
      Eigen::SelfAdjointEigenSolver<Mat> es(c2);
      std::vector<Eigen::Index> plus, minus;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        (es.eigenvalues()(i) > 0 ? plus : minus).push_back(i);
      kp_ = static_cast<int>(plus.size());
      basis_ = Mat(n_, n_);
      int c = 0;
      for (auto i : plus) basis_.col(c++) = es.eigenvectors().col(i);
      for (auto i : minus) basis_.col(c++) = es.eigenvectors().col(i);
    } else if ((c2 + c2.transpose()).norm() < 1e-10 && (c2 * c2 + Mat::Identity(n_, n_)).norm() < 1e-10) {
      symmetric_ = false;
      const int m = n_ / 2;
      Mat e(n_, 0);
      for (int i = 0; i < n_ && e.cols() < m; ++i) {
        Vec v = Vec::Unit(n_, i);
        Mat span(n_, 2 * e.cols());
        span << e, c2 * e;
        v -= span * (span.transpose() * v);
        if (v.norm() < 1e-6) continue;
        v.normalize();
        e.conservativeResize(Eigen::NoChange, e.cols() + 1);
        e.col(e.cols() - 1) = v;
      }
      basis_ = Mat(n_, n_);
      basis_ << e, c2 * e;
    } else {
      throw InputError("HaarH: sigma2 conjugator must be symmetric or a complex structure");
    }
  }

  template <class Rng>
  Mat sample(Rng& rng) const {
    Mat blk = Mat::Zero(n_, n_);
    if (symmetric_) {
      const int km = n_ - kp_;
      Mat a = kp_ > 0 ? haar_orthogonal(kp_, rng, false) : Mat(0, 0);
      Mat b = km > 0 ? haar_orthogonal(km, rng, false) : Mat(0, 0);
      const double det = (kp_ > 0 ? a.determinant() : 1.0) * (km > 0 ? b.determinant() : 1.0);
      if (det < 0) {
        if (kp_ > 0) a.col(0) = -a.col(0);
        else b.col(0) = -b.col(0);
      }
      if (kp_ > 0) blk.topLeftCorner(kp_, kp_) = a;
      if (km > 0) blk.bottomRightCorner(km, km) = b;
    } else {
      const int m = n_ / 2;
      std::normal_distribution<double> nd;
      Eigen::MatrixXcd z(m, m);
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) z(i, j) = {nd(rng), nd(rng)};
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
      Eigen::MatrixXcd q = qr.householderQ();
      for (int j = 0; j < m; ++j) {
        const auto d = qr.matrixQR()(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
      }
      // In the basis (e, J e), A + iB acts as [[A, -B], [B, A]].
      blk.topLeftCorner(m, m) = q.real();
      blk.bottomRightCorner(m, m) = q.real();
      blk.topRightCorner(m, m) = -q.imag();
      blk.bottomLeftCorner(m, m) = q.imag();
    }
    return basis_ * blk * basis_.transpose();
  }

 private:
  int n_ = 0;
  int kp_ = 0;
  bool symmetric_ = true;
  Mat basis_;
};

// ---------------------------------------------------------------------------
// Section quadrature.

struct QuadratureConfig {
  int base_resolution = 16;  ///< points per axis at the coarsest level
  int levels = 5;            ///< resolution doublings (finest = base · 2^(levels-1))
  bool richardson = true;
  int invariance_samples = 8;
  double invariance_tol = 1e-8;
  std::uint64_t seed = kDefaultSeed;
};

struct QuadratureResult {
  std::string name;
  double value = 0.0;
  double error_estimate = 0.0;
  std::vector<double> level_values;  ///< plain trapezoid ratio per level
  double invariance_defect = 0.0;
  long points = 0;
};

/// Largest |f(x) - f(h·x)| over Haar-random x ∈ M and h ∈ H; throws
/// InvarianceError with a witness above `tol`.
inline double check_invariance(const Triad& tr, const NamedFunction& f, int samples, double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const HaarH hh(tr.spec.sigma2);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const SpacePoint x = tr.model.from_group(haar_so(tr.n(), rng));
    const SpacePoint hx = tr.model.act(hh.sample(rng), x);
    const double d = std::abs(f.fn(x.cartan_image) - f.fn(hx.cartan_image));
    if (d > tol) {
      std::ostringstream os;
      os << "x =\n" << x.cartan_image << "\nh.x =\n" << hx.cartan_image;
      throw InvarianceError("function '" + f.name + "' is not H-invariant (defect " + std::to_string(d) + ")",
                            os.str());
    }
    worst = std::max(worst, d);
  }
  return worst;
}

/// ∫_Σ f θ / ∫_Σ θ on the lattice cell by tensor trapezoid rules at doubling
/// resolutions, optionally Richardson-extrapolated (numerator and
/// denominator separately). All functions share the grid evaluations.
inline std::vector<QuadratureResult> integrate_invariant(const Triad& tr, const RootSystem& rs,
                                                         const DensityProfile& prof, const SectionLattice& lat,
                                                         const std::vector<NamedFunction>& fs,
                                                         const QuadratureConfig& cfg = {}) {
  if (cfg.base_resolution < 1 || cfg.levels < 1) throw InputError("integrate_invariant: invalid quadrature config");
  const int r = rs.rank();
  const long fine = static_cast<long>(cfg.base_resolution) << (cfg.levels - 1);
  long total = 1;
  for (int i = 0; i < r; ++i) total *= fine;
  if (total > 50'000'000) throw InputError("integrate_invariant: grid too large");
  std::vector<QuadratureResult> out(fs.size());
  for (size_t k = 0; k < fs.size(); ++k) {
    out[k].name = fs[k].name;
    out[k].points = total;
    out[k].invariance_defect = check_invariance(tr, fs[k], cfg.invariance_samples, cfg.invariance_tol, cfg.seed);
  }
  // Sums per level: level L uses points whose indices are multiples of 2^(levels-1-L).
  std::vector<double> den(static_cast<size_t>(cfg.levels), 0.0);
  std::vector<std::vector<double>> num(fs.size(), std::vector<double>(static_cast<size_t>(cfg.levels), 0.0));
  std::vector<long> idx(static_cast<size_t>(r), 0);
  Vec w(r);
  for (long p = 0; p < total; ++p) {
    long rem = p;
    int tz = cfg.levels - 1;  // coarsest level containing this point
    for (int i = 0; i < r; ++i) {
      idx[static_cast<size_t>(i)] = rem % fine;
      rem /= fine;
      w(i) = lat.box(i) * static_cast<double>(idx[static_cast<size_t>(i)]) / static_cast<double>(fine);
      long v = idx[static_cast<size_t>(i)];
      int z = 0;
      while (z < cfg.levels - 1 && v != 0 && v % 2 == 0) {
        v /= 2;
        ++z;
      }
      if (v == 0) z = cfg.levels - 1;
      tz = std::min(tz, z);
    }
    const double th = prof.eval(w);
    if (th == 0.0) continue;
    const Mat x = tr.model.exp_point(tr.alg.element(rs.section_coords(w))).cartan_image;
    const int first_level = cfg.levels - 1 - tz;
    for (int L = first_level; L < cfg.levels; ++L) den[static_cast<size_t>(L)] += th;
    for (size_t k = 0; k < fs.size(); ++k) {
      const double fv = fs[k].fn(x) * th;
      for (int L = first_level; L < cfg.levels; ++L) num[k][static_cast<size_t>(L)] += fv;
    }
  }
  // Trapezoid weight h^r per level.
  auto weight = [&](int L) { return std::pow(0.5, static_cast<double>(r) * (cfg.levels - 1 - L)); };
  auto extrapolate = [&](std::vector<double> t) {
    std::vector<double> prev_diag{t.front()};
    for (int j = 1; j < cfg.levels; ++j) {
      std::vector<double> next(t.size());
      for (size_t i = static_cast<size_t>(j); i < t.size(); ++i)
        next[i] = t[i] + (t[i] - t[i - 1]) / (std::pow(4.0, j) - 1.0);
      t = next;
      prev_diag.push_back(t[static_cast<size_t>(j)]);
    }
    return prev_diag;  // R_{j,j}
  };
  std::vector<double> dlev(static_cast<size_t>(cfg.levels));
  for (int L = 0; L < cfg.levels; ++L) dlev[static_cast<size_t>(L)] = den[static_cast<size_t>(L)] / weight(L);
  if (dlev.back() <= 0) throw DegenerateError("integrate_invariant: theta vanishes on the whole grid");
  const std::vector<double> dext = extrapolate(dlev);
  for (size_t k = 0; k < fs.size(); ++k) {
    std::vector<double> nlev(static_cast<size_t>(cfg.levels));
    for (int L = 0; L < cfg.levels; ++L) {
      nlev[static_cast<size_t>(L)] = num[k][static_cast<size_t>(L)] / weight(L);
      out[k].level_values.push_back(nlev[static_cast<size_t>(L)] / dlev[static_cast<size_t>(L)]);
    }
    const auto& lv = out[k].level_values;
    if (cfg.richardson && cfg.levels >= 2) {
      const std::vector<double> next = extrapolate(nlev);
      const double best = next.back() / dext.back();
      const double second = next[next.size() - 2] / dext[dext.size() - 2];
      out[k].value = best;
      out[k].error_estimate = std::abs(best - second);
    } else {
      out[k].value = lv.back();
      out[k].error_estimate = lv.size() >= 2 ? std::abs(lv.back() - lv[lv.size() - 2]) : 0.0;
    }
  }
  return out;
}

/// ∫_Σ θ in the flat metric of the section (cell measure times mean of θ).
inline double section_theta_integral(const DensityProfile& prof, const SectionLattice& lat, int resolution = 256) {
  const int r = static_cast<int>(lat.box.size());
  long total = 1;
  for (int i = 0; i < r; ++i) total *= resolution;
  double s = 0.0;
  Vec w(r);
  for (long p = 0; p < total; ++p) {
    long rem = p;
    for (int i = 0; i < r; ++i) {
      w(i) = lat.box(i) * static_cast<double>(rem % resolution) / resolution;
      rem /= resolution;
    }
    s += prof.eval(w);
  }
  return s / static_cast<double>(total) * lat.box.prod() * lat.metric_jacobian;
}

inline VolumeFraction orbit_volume_fraction(const Vec& w, const DensityProfile& prof, const SectionLattice& lat) {
  VolumeFraction v;
  const double integral = section_theta_integral(prof, lat);
  v.value = prof.eval(w) / integral;
  if (lat.weyl_order_estimate) {
    v.value *= *lat.weyl_order_estimate;
    v.estimate_used = true;
    v.note = "depends on the |W| estimate (" + lat.weyl_note + ")";
  } else {
    v.note = "|W| unavailable: value is theta(w) / integral of theta over the cell";
  }
  return v;
}

// ---------------------------------------------------------------------------
// Haar Monte-Carlo oracle.

struct McConfig {
  std::size_t samples = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  int workers = 4;
};

struct McEstimate {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Means of f(g·p₀) over Haar-random g ∈ SO(n). Worker k draws from its own
/// stream seeded by (seed, k) and handles a fixed contiguous share of the
/// samples; partial sums are reduced in worker order.
inline std::vector<McEstimate> haar_mc_integrate(const Triad& tr, const std::vector<NamedFunction>& fs,
                                                 const McConfig& cfg = {}) {
  const int workers = std::max(1, cfg.workers);
  const std::size_t n = cfg.samples;
  struct Partial {
    std::vector<double> sum, sumsq;
  };
  std::vector<Partial> parts(static_cast<size_t>(workers));
  auto run = [&](int k) {
    const std::size_t share = n / workers + (static_cast<std::size_t>(k) < n % workers ? 1 : 0);
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(k)};
    std::mt19937_64 rng(seq);
    Partial& p = parts[static_cast<size_t>(k)];
    p.sum.assign(fs.size(), 0.0);
    p.sumsq.assign(fs.size(), 0.0);
    for (std::size_t s = 0; s < share; ++s) {
      const Mat x = tr.model.from_group(haar_so(tr.n(), rng)).cartan_image;
      for (size_t j = 0; j < fs.size(); ++j) {
        const double v = fs[j].fn(x);
        p.sum[j] += v;
        p.sumsq[j] += v * v;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int k = 1; k < workers; ++k) threads.emplace_back(run, k);
  run(0);
  for (auto& t : threads) t.join();
  std::vector<McEstimate> out(fs.size());
  for (size_t j = 0; j < fs.size(); ++j) {
    double s = 0.0, s2 = 0.0;
    for (const auto& p : parts) {
      s += p.sum[j];
      s2 += p.sumsq[j];
    }
    out[j].name = fs[j].name;
    out[j].samples = n;
    if (n == 0) continue;
    out[j].mean = s / static_cast<double>(n);
    const double var = n > 1 ? std::max(0.0, (s2 - s * out[j].mean) / static_cast<double>(n - 1)) : 0.0;
    out[j].std_error = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

// ---------------------------------------------------------------------------
// H-averaging.

struct HAveragedFunction {
  NamedFunction function;
  double invariance_defect = 0.0;
  int samples = 0;
};

/// f(x) = mean over a fixed Haar sample {h_j} ⊂ H of g(h_j·x). The defect
/// max |f(x) - f(h·x)| is measured on `probe` random pairs.
inline HAveragedFunction h_averaged_function(const Triad& tr, const NamedFunction& g, int samples,
                                             std::uint64_t seed = kDefaultSeed, int probes = 8,
                                             double tol = 0.05) {
  if (samples < 1) throw InputError("h_averaged_function: need at least one sample");
  std::mt19937_64 rng(seed);
  const HaarH hh(tr.spec.sigma2);
  auto hs = std::make_shared<std::vector<Mat>>();
  for (int j = 0; j < samples; ++j) hs->push_back(hh.sample(rng));
  const Mat c = tr.spec.sigma1;
  auto raw = g.fn;
  HAveragedFunction out;
  out.samples = samples;
  out.function.name = "avg_" + g.name;
  out.function.fn = [hs, c, raw](const Mat& x) {
    double s = 0.0;
    for (const auto& h : *hs) s += raw(h * x * c * h.transpose() * c.transpose());
    return s / static_cast<double>(hs->size());
  };
  for (int k = 0; k < probes; ++k) {
    const SpacePoint x = tr.model.from_group(haar_so(tr.n(), rng));
    const SpacePoint hx = tr.model.act(hh.sample(rng), x);
    out.invariance_defect =
        std::max(out.invariance_defect, std::abs(out.function.fn(x.cartan_image) - out.function.fn(hx.cartan_image)));
  }
  if (out.invariance_defect > tol)
    throw DegenerateError("h_averaged_function: invariance defect " + std::to_string(out.invariance_defect) +
                          " above tolerance; increase the H sample count");
  return out;
}

/// A smooth non-invariant bump around Exp(w_ref), used as raw input to
/// h_averaged_function.
inline NamedFunction coordinate_bump(const Triad& tr, const RootSystem& rs, const Vec& w_ref, double width = 1.0) {
  const Mat ref = tr.model.exp_point(tr.alg.element(rs.section_coords(w_ref))).cartan_image;
  return {"bump", [ref, width](const Mat& x) { return std::exp(-(x - ref).squaredNorm() / (width * width)); }};
}

}  // namespace hermann

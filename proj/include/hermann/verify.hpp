#pragma once

// The invariant suite: every closed-form quantity against its oracle, as a
// list of named checks with values and thresholds.

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hermann/integration.hpp"
#include "hermann/report.hpp"

namespace hermann {

struct Check {
  std::string group;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<Check> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  /// value <= threshold passes.
  Check& add_le(const std::string& group, const std::string& name, double value, double threshold,
                const std::string& detail = {}) {
    checks.push_back({group, name, value, threshold, std::isfinite(value) && value <= threshold, detail});
    return checks.back();
  }
  Check& add_bool(const std::string& group, const std::string& name, bool ok, const std::string& detail = {}) {
    checks.push_back({group, name, ok ? 1.0 : 0.0, 1.0, ok, detail});
    return checks.back();
  }
  report::Json to_json() const {
    report::Json a = report::Json::array();
    for (const auto& c : checks) {
      report::Json j;
      j["group"] = c.group;
      j["name"] = c.name;
      j["value"] = c.value;
      j["threshold"] = c.threshold;
      j["pass"] = c.pass;
      if (!c.detail.empty()) j["detail"] = c.detail;
      a.push_back(j);
    }
    return a;
  }
};

struct VerifyConfig {
  std::uint64_t seed = kDefaultSeed;
  int shape_points = 5;
  int density_pairs = 20;
  int commutation_configs = 10;
  bool integration = false;
  McConfig mc{};
  QuadratureConfig quad{};
};

namespace detail {

/// Uniform point in [0, π]^r whose adapted-root values stay `margin` away
/// from every wall of θ's zero set and from the h-type walls.
template <class Rng>
Vec random_regular_point(const RootSystem& rs, const DensityProfile& prof, Rng& rng, double margin = 0.1) {
  constexpr double pi = std::numbers::pi;
  std::uniform_real_distribution<double> u(0.0, pi);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Vec w(rs.rank());
    for (int i = 0; i < rs.rank(); ++i) w(i) = u(rng);
    bool ok = true;
    for (const auto& f : prof.factors)
      if (lattice_distance(f.coeffs.dot(w), f.t, pi) < margin) ok = false;
    for (const auto& d : rs.adapted)  // tangent blocks of either kind must not collapse
      if (lattice_distance(d.eval(w), 0.0, pi / 2) < margin) ok = false;
    if (ok) return w;
  }
  throw DegenerateError("random_regular_point: no regular point found");
}

inline std::string vec_str(const Vec& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + report::format_number(v(i));
  return s + ")";
}

}  // namespace detail

/// Context shared by the check groups.
struct VerifyContext {
  Triad triad;
  RootSystem roots;
  bool commuting = true;
  std::optional<GeneralSpectrumDatum> general;  ///< non-commuting triads: reference datum at w = 0
  DensityProfile profile;
};

inline VerifyContext make_context(const TriadSpec& spec, std::uint64_t seed) {
  VerifyContext c{build_triad(spec), {}, true, std::nullopt, {}};
  c.roots = analyze_roots(c.triad, seed, true);
  c.commuting = c.triad.decomp.commuting;
  if (c.commuting) {
    c.profile = density_profile(c.roots);
  } else {
    c.general = general_spectrum(c.triad, c.roots, Vec::Zero(c.roots.rank()), seed);
    c.profile = density_profile(c.roots, *c.general);
  }
  return c;
}

inline void check_structure(const VerifyContext& c, VerifyReport& r) {
  const Triad& t = c.triad;
  const auto& d = t.decomp;
  r.add_le("structure", "involution_residual", t.involution_residual, 1e-12);
  r.add_le("structure", "metric_calibration_defect", t.model.calibration_defect(), 1e-10);
  const long dimg = static_cast<long>(t.alg.dim());
  r.add_le("structure", "k_plus_m_dim_defect", std::abs(static_cast<double>(d.k.cols() + d.m.cols() - dimg)), 0.0);
  r.add_le("structure", "h_plus_p_dim_defect", std::abs(static_cast<double>(d.h.cols() + d.p.cols() - dimg)), 0.0);
  if (c.commuting) {
    r.add_le("structure", "refined_blocks_dim_defect",
             std::abs(static_cast<double>(d.kh.cols() + d.kp.cols() + d.mh.cols() + d.mp.cols() - dimg)), 0.0);
  }
  r.add_le("roots", "frame_bracket_residual", c.roots.frames.bracket_residual, 1e-10);
  double res = 0.0;
  for (const auto& a : c.roots.roots) res = std::max(res, a.residual);
  r.add_le("roots", "restricted_root_eigen_residual", res, 1e-9);
  long total = c.roots.centralizer.zm.cols();
  for (const auto& a : c.roots.adapted) total += a.m_space.cols();
  r.add_le("roots", "adapted_completeness_defect", std::abs(static_cast<double>(total - d.m.cols())), 0.0,
           "sum dim m_beta + dim z_m(t) vs dim m");
  if (c.commuting) {
    long ph = c.roots.centralizer.zm.cols();
    for (const auto& a : c.roots.adapted) ph += a.p_mult + a.h_mult;
    r.add_le("roots", "multiplicity_completeness_defect", std::abs(static_cast<double>(ph - d.m.cols())), 0.0,
             "sum (p_beta + h_beta) + dim z_m(t) vs dim m");
    for (const auto& e : t.spec.expected_roots) {
      bool found = false;
      for (const auto& a : c.roots.adapted) {
        if (static_cast<size_t>(a.chart_coeffs.size()) != e.coeffs.size()) continue;
        Vec ec = Eigen::Map<const Vec>(e.coeffs.data(), static_cast<Eigen::Index>(e.coeffs.size()));
        if ((a.chart_coeffs - ec).norm() < 1e-8 || (a.chart_coeffs + ec).norm() < 1e-8)
          found = a.p_mult == e.p_mult && a.h_mult == e.h_mult;
      }
      r.add_bool("roots", "expected_root_" + e.label, found,
                 "(p,h) = (" + std::to_string(e.p_mult) + "," + std::to_string(e.h_mult) + ")");
    }
  }
}

inline void check_commutation(const VerifyContext& c, const VerifyConfig& cfg, VerifyReport& r) {
  std::mt19937_64 rng(cfg.seed + 11);
  std::normal_distribution<double> nd;
  const int rank = c.roots.rank();
  double worst_rs = 0.0, worst_ss = 0.0;
  int singular_cases = 0;
  for (int k = 0; k < cfg.commutation_configs; ++k) {
    Vec w = detail::random_regular_point(c.roots, c.profile, rng);
    if (k % 2 == 1 && !c.profile.factors.empty()) {
      // Move w onto a wall so the orbit is singular; v, u stay in the section.
      const auto& f = c.profile.factors[static_cast<size_t>(k / 2) % c.profile.factors.size()];
      w -= (f.coeffs.dot(w) - f.t) / f.coeffs.squaredNorm() * f.coeffs;
      ++singular_cases;
    }
    Vec v(rank), u(rank);
    for (int i = 0; i < rank; ++i) {
      v(i) = nd(rng);
      u(i) = nd(rng);
    }
    const CommutationResidual cr = commutation_residual(c.triad, c.roots, w, v, u);
    worst_rs = std::max(worst_rs, cr.curvature_shape);
    worst_ss = std::max(worst_ss, cr.shape_shape);
  }
  r.add_le("commutation", "curvature_shape_commutator", worst_rs, 1e-8,
           std::to_string(cfg.commutation_configs) + " configs, " + std::to_string(singular_cases) + " singular");
  r.add_le("commutation", "shape_shape_commutator", worst_ss, 1e-8);
}

/// Reference spectrum at w: closed form (commuting) or general path.
inline std::vector<double> reference_spectrum(const VerifyContext& c, const Vec& w, const Vec& u) {
  if (c.commuting) return shape_spectrum_closed(c.triad, c.roots, w, u).expanded();
  return eval_general_shape(c.roots, *c.general, w, u).expanded();
}

inline void check_shape(const VerifyContext& c, const VerifyConfig& cfg, VerifyReport& r) {
  std::mt19937_64 rng(cfg.seed + 23);
  std::normal_distribution<double> nd;
  double worst = 0.0, worst_alg = 0.0, worst_rank = 0.0, worst_order_dev = 0.0;
  for (int k = 0; k < cfg.shape_points; ++k) {
    const Vec w = detail::random_regular_point(c.roots, c.profile, rng);
    Vec u(c.roots.rank());
    for (int i = 0; i < u.size(); ++i) u(i) = nd(rng);
    const auto ref = reference_spectrum(c, w, u);
    worst = std::max(worst, max_relative_eigen_error(operator_eigenvalues(shape_operator_numeric(c.triad, c.roots, w, u, 1e-4)), ref));
    worst_alg = std::max(worst_alg, max_relative_eigen_error(operator_eigenvalues(shape_operator_algebraic(c.triad, c.roots, w, u)), ref));
    worst_rank = std::max(worst_rank, std::abs(static_cast<double>(tangent_rank_numeric(c.triad, c.roots, w)) -
                                               static_cast<double>(ref.size())));
    // Step halving: error ratio 4 per halving for a second-order scheme.
    double e[3];
    const double steps[3] = {2e-3, 1e-3, 5e-4};
    for (int s = 0; s < 3; ++s)
      e[s] = max_relative_eigen_error(operator_eigenvalues(shape_operator_numeric(c.triad, c.roots, w, u, steps[s])), ref);
    for (int s = 0; s < 2; ++s) {
      if (e[s + 1] <= 1e-13) continue;  // exact to rounding, no order to observe
      worst_order_dev = std::max(worst_order_dev, std::abs(std::log2(e[s] / e[s + 1]) - 2.0));
    }
  }
  const std::string n = std::to_string(cfg.shape_points) + " regular points";
  r.add_le("shape", "fd_vs_closed_max_rel_error", worst, 1e-5, n + ", step 1e-4");
  r.add_le("shape", "algebraic_vs_closed_max_rel_error", worst_alg, 1e-9, n);
  r.add_le("shape", "fd_order_deviation_from_2", worst_order_dev, 0.3, "steps 2e-3, 1e-3, 5e-4");
  r.add_le("shape", "tangent_rank_vs_block_count", worst_rank, 0.0, n);
}

inline void check_general(const VerifyContext& c, const VerifyConfig& cfg, VerifyReport& r) {
  if (!c.commuting) {
    const auto& g = *c.general;
    double law = 0.0;
    for (const auto& b : g.blocks) law = std::max(law, b.law_residual);
    r.add_le("general", "eigenvalue_law_residual", law, 1e-8);
    r.add_le("general", "joint_eigenspace_residual", g.joint_residual, 1e-8);
    r.add_le("general", "zero_block_shape_residual", g.zero_block_residual, 1e-8);
    return;
  }
  constexpr double pi = std::numbers::pi;
  std::mt19937_64 rng(cfg.seed + 37);
  const Vec ref = detail::random_regular_point(c.roots, c.profile, rng);
  const GeneralSpectrumDatum g = general_spectrum(c.triad, c.roots, ref, cfg.seed);
  double t_dev = 0.0, c_dev = 0.0;
  for (const auto& b : g.blocks) {
    const double t0 = g.t_from_origin(b, c.roots);
    t_dev = std::max(t_dev, std::min(std::abs(t0 - pi / 2), std::abs(t0 - pi)));
    c_dev = std::max(c_dev, std::abs(b.c - std::cos(b.t) / std::sin(b.t)));
  }
  r.add_le("general", "t_from_origin_in_{pi/2,pi}", t_dev, 1e-8);
  r.add_le("general", "c_equals_cot_t", c_dev, 1e-10);
  r.add_le("general", "zero_block_dim_vs_zm_h",
           std::abs(static_cast<double>(g.zero_block_dim - c.roots.centralizer.zm_h.cols())), 0.0);
  double spec_dev = 0.0;
  std::normal_distribution<double> nd;
  for (int k = 0; k < cfg.shape_points; ++k) {
    const Vec w = detail::random_regular_point(c.roots, c.profile, rng);
    Vec u(c.roots.rank());
    for (int i = 0; i < u.size(); ++i) u(i) = nd(rng);
    spec_dev = std::max(spec_dev, max_relative_eigen_error(eval_general_shape(c.roots, g, w, u).expanded(),
                                                           shape_spectrum_closed(c.triad, c.roots, w, u).expanded()));
  }
  r.add_le("general", "general_vs_closed_spectrum", spec_dev, 1e-8);
  const DensityProfile gp = density_profile(c.roots, g);
  double th_dev = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vec w = detail::random_regular_point(c.roots, c.profile, rng, 0.0);
    th_dev = std::max(th_dev, std::abs(gp.eval(w) - c.profile.eval(w)));
  }
  r.add_le("general", "general_theta_vs_commuting_theta", th_dev, 1e-9);
}

inline void check_density(const VerifyContext& c, const VerifyConfig& cfg, VerifyReport& r) {
  std::mt19937_64 rng(cfg.seed + 41);
  double worst_gram = 0.0, worst_closed = 0.0, worst_cocycle = 0.0;
  int pairs = 0;
  for (int k = 0; k < cfg.density_pairs; ++k) {
    const Vec p = detail::random_regular_point(c.roots, c.profile, rng);
    const Vec q = detail::random_regular_point(c.roots, c.profile, rng);
    const double ratio = orbit_volume_ratio(p, q, c.profile);
    worst_gram = std::max(worst_gram, std::abs(gram_density_ratio(c.triad, c.roots, p, q) / ratio - 1.0));
    if (c.commuting) {
      // F_p(q) needs a chamber segment; use the midpoint-free check only when p, q share a chamber.
      try {
        const double f = relative_density(c.roots, p, q);
        worst_closed = std::max(worst_closed, std::abs(f / ratio - 1.0));
        const Vec m = 0.5 * (p + q);
        const double co = relative_density(c.roots, p, m) * relative_density(c.roots, m, q);
        worst_cocycle = std::max(worst_cocycle, std::abs(co - f) / std::abs(f));
        ++pairs;
      } catch (const SingularPointError&) {
      }
    }
  }
  r.add_le("density", "theta_ratio_vs_gram_oracle", worst_gram, 1e-6, std::to_string(cfg.density_pairs) + " pairs");
  if (c.commuting) {
    r.add_le("density", "F_closed_vs_theta_ratio", worst_closed, 1e-9, std::to_string(pairs) + " same-chamber pairs");
    r.add_le("density", "F_cocycle_residual", worst_cocycle, 1e-9);
  }
}

inline void check_lattice(const VerifyContext& c, const VerifyConfig& cfg, VerifyReport& r, SectionLattice* out = nullptr) {
  const SectionLattice lat = section_lattice(c.triad, c.roots, c.profile, LatticeConfig{.seed = cfg.seed});
  std::mt19937_64 rng(cfg.seed + 53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double per = 0.0;
  for (int k = 0; k < 20; ++k) {
    Vec w(c.roots.rank());
    for (int i = 0; i < w.size(); ++i) w(i) = u(rng) * lat.box(i);
    for (int i = 0; i < w.size(); ++i) {
      Vec w2 = w;
      w2(i) += lat.box(i);
      per = std::max(per, std::abs(c.profile.eval(w2) - c.profile.eval(w)));
    }
  }
  r.add_le("lattice", "period_embedding_residual", lat.max_period_residual, 1e-8);
  r.add_le("lattice", "theta_periodicity", per, 1e-10);
  r.add_le("lattice", "theta_reflection_invariance", lat.max_reflection_residual, 1e-9, lat.weyl_note);
  if (out) *out = lat;
}

inline void check_integration(const VerifyContext& c, const VerifyConfig& cfg, VerifyReport& r) {
  const SectionLattice lat = section_lattice(c.triad, c.roots, c.profile, LatticeConfig{.seed = cfg.seed});
  const auto fs = invariant_test_functions(c.triad);
  const auto q = integrate_invariant(c.triad, c.roots, c.profile, lat, fs, cfg.quad);
  const auto m = haar_mc_integrate(c.triad, fs, cfg.mc);
  for (size_t i = 0; i < fs.size(); ++i) {
    const double diff = std::abs(q[i].value - m[i].mean);
    const double bound = 3.0 * m[i].std_error + q[i].error_estimate;
    r.add_le("integration", "quadrature_vs_mc_" + fs[i].name, diff, fs[i].name == "one" ? 1e-12 : bound,
             "quad " + report::format_number(q[i].value) + " mc " + report::format_number(m[i].mean) + " +- " +
                 report::format_number(m[i].std_error));
    if (fs[i].name == "cos2") {
      // E v_n² = 1/n for a uniform unit vector in R^n (1/3 on S²)
      const double exact = 1.0 / c.triad.n();
      r.add_le("integration", "cos2_quadrature_vs_1/n", std::abs(q[i].value - exact), 1e-9);
      r.add_le("integration", "cos2_mc_vs_1/n", std::abs(m[i].mean - exact), 1e-3);
    }
  }
}

inline VerifyReport verify_triad(const TriadSpec& spec, const VerifyConfig& cfg) {
  VerifyReport r;
  const VerifyContext c = make_context(spec, cfg.seed);
  check_structure(c, r);
  check_commutation(c, cfg, r);
  check_shape(c, cfg, r);
  check_general(c, cfg, r);
  check_density(c, cfg, r);
  check_lattice(c, cfg, r);
  if (cfg.integration) check_integration(c, cfg, r);
  return r;
}

}  // namespace hermann

// hermann_cli: command-line front end for the Hermann-action library.
//
// Exit codes: 0 ok, 2 input error, 3 verification failure, 4 numeric
// degeneracy, 5 malformed triad file, 6 singular point where a regular one
// is required.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hermann/catalog.hpp"
#include "hermann/closed_form.hpp"
#include "hermann/integration.hpp"
#include "hermann/report.hpp"
#include "hermann/verify.hpp"

using namespace hermann;
using report::Json;

namespace {

enum ExitCode { kOk = 0, kInput = 2, kVerify = 3, kDegenerate = 4, kTriadFile = 5, kSingular = 6 };

struct RunConfig {
  std::string triad;
  std::string triad_file;
  std::map<std::string, int> params;
  std::optional<int> p, q, n, a, b, c, d;
  std::string blocks;  // "a,b" or "a,b,c,d"
  double conjugate_scale = 0.0;
  std::string w, u, v;
  std::uint64_t seed = kDefaultSeed;
  double tol = Tolerances{}.angle;
  int grid = 32;
  int levels = 5;
  std::size_t mc_n = 200000;
  int workers = 4;
  std::string f = "all";
  std::string out;
  std::string format = "json";
};

Vec parse_vec(const std::string& s, int rank, const std::string& flag, std::optional<Vec> fallback = std::nullopt) {
  if (s.empty()) {
    if (fallback) return *fallback;
    throw InputError("--" + flag + " is required (" + std::to_string(rank) + " comma-separated section coordinates)");
  }
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      vals.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("--" + flag + ": cannot parse '" + item + "' as a number");
    }
  }
  if (static_cast<int>(vals.size()) != rank)
    throw InputError("--" + flag + ": expected " + std::to_string(rank) + " coordinates, got " + std::to_string(vals.size()));
  return Eigen::Map<Vec>(vals.data(), rank);
}

TriadSpec resolve_triad(const RunConfig& cfg) {
  TriadSpec spec;
  if (!cfg.triad_file.empty()) {
    if (!cfg.triad.empty()) throw InputError("give either --triad or --triad-file, not both");
    spec = report::load_triad_file(cfg.triad_file);
  } else {
    if (cfg.triad.empty()) throw InputError("--triad or --triad-file is required");
    std::map<std::string, int> params;
    if (!cfg.blocks.empty()) {
      const Vec v = parse_vec(cfg.blocks, static_cast<int>(std::count(cfg.blocks.begin(), cfg.blocks.end(), ',')) + 1, "blocks");
      if (v.size() != 2 && v.size() != 4) throw InputError("--blocks takes a,b or a,b,c,d");
      const char* keys[] = {"a", "b", "c", "d"};
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) != std::round(v(i))) throw InputError("--blocks entries must be integers");
        params[keys[i]] = static_cast<int>(v(i));
      }
    }
    for (const auto& [k, val] : std::map<std::string, std::optional<int>>{
             {"p", cfg.p}, {"q", cfg.q}, {"n", cfg.n}, {"a", cfg.a}, {"b", cfg.b}, {"c", cfg.c}, {"d", cfg.d}})
      if (val) params[k] = *val;
    spec = catalog::make(cfg.triad, params);
  }
  if (cfg.conjugate_scale != 0.0) {
    // Seeded random skew generator; conjugating H generically breaks commutation.
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> nd;
    Mat x = Mat::Zero(spec.n, spec.n);
    for (int i = 0; i < spec.n; ++i)
      for (int j = i + 1; j < spec.n; ++j) {
        x(i, j) = cfg.conjugate_scale * nd(rng);
        x(j, i) = -x(i, j);
      }
    spec = catalog::make_conjugated(spec, x);
  }
  return spec;
}

Json header(const std::string& command, const RunConfig& cfg, const TriadSpec& spec, const Tolerances& tol) {
  Json h;
  h["schema_version"] = report::kSchemaVersion;
  h["command"] = command;
  Json t;
  t["name"] = spec.name;
  t["n"] = spec.n;
  Json params = Json::object();
  for (const auto& [k, v] : spec.params) params[k] = v;
  t["params"] = params;
  if (!cfg.triad_file.empty()) t["file"] = cfg.triad_file;
  if (cfg.conjugate_scale != 0.0) t["conjugate_scale"] = cfg.conjugate_scale;
  h["triad"] = t;
  Json c;
  c["seed"] = cfg.seed;
  c["tolerances"] = {{"skew", tol.skew},
                     {"subspace", tol.subspace},
                     {"root_cluster", tol.root_cluster},
                     {"rank", tol.rank},
                     {"angle", tol.angle}};
  c["grid"] = cfg.grid;
  c["levels"] = cfg.levels;
  c["mc_n"] = cfg.mc_n;
  c["workers"] = cfg.workers;
  h["config"] = c;
  return h;
}

Json spectrum_json(const ShapeSpectrum& s, const RootSystem& rs) {
  Json a = Json::array();
  for (const auto& e : s.entries) {
    Json j;
    j["eigenvalue"] = e.eigenvalue;
    j["multiplicity"] = e.multiplicity;
    j["block"] = e.tag;
    if (e.beta >= 0) j["beta"] = rs.adapted[static_cast<size_t>(e.beta)].label;
    a.push_back(j);
  }
  return a;
}

Json general_json(const GeneralSpectrumDatum& g, const RootSystem& rs) {
  Json j;
  j["reference"] = report::vec_json(g.reference);
  Json blocks = Json::array();
  for (const auto& b : g.blocks) {
    Json x;
    x["beta"] = rs.adapted[static_cast<size_t>(b.beta)].label;
    x["i"] = b.index;
    x["dim"] = b.dim();
    x["c"] = b.c;
    x["t"] = b.t;
    x["t_from_origin"] = g.t_from_origin(b, rs);
    x["law_residual"] = b.law_residual;
    blocks.push_back(x);
  }
  j["blocks"] = blocks;
  j["zero_block_dim"] = g.zero_block_dim;
  j["joint_residual"] = g.joint_residual;
  return j;
}

struct Session {
  TriadSpec spec;
  Tolerances tol;
  Triad triad;
  RootSystem roots;
  bool commuting = true;
  std::optional<GeneralSpectrumDatum> general;
  DensityProfile profile;
};

Session open_session(const RunConfig& cfg) {
  Session s;
  s.spec = resolve_triad(cfg);
  s.tol.angle = cfg.tol;
  s.triad = build_triad(s.spec, s.tol);
  s.roots = analyze_roots(s.triad, cfg.seed, true);
  s.commuting = s.triad.decomp.commuting;
  if (s.commuting) {
    s.profile = density_profile(s.roots);
  } else {
    s.general = general_spectrum(s.triad, s.roots, Vec::Zero(s.roots.rank()), cfg.seed);
    s.profile = density_profile(s.roots, *s.general);
  }
  return s;
}

Json cmd_roots(const RunConfig& cfg) {
  Session s = open_session(cfg);
  Json r = header("roots", cfg, s.spec, s.tol);
  const auto& d = s.triad.decomp;
  Json dims;
  dims["g"] = s.triad.alg.dim();
  for (const auto& [k, m] : std::vector<std::pair<const char*, const Mat*>>{
           {"k", &d.k}, {"m", &d.m}, {"h", &d.h}, {"p", &d.p}, {"k_h", &d.kh}, {"k_p", &d.kp}, {"m_h", &d.mh}, {"m_p", &d.mp}})
    dims[k] = m->cols();
  Json res;
  res["commuting"] = s.commuting;
  res["commutator_norm"] = d.commutator_norm;
  res["dimensions"] = dims;
  res["rank_t"] = s.roots.rank();
  res["rank_a"] = s.roots.frames.a_basis.cols();
  res["explicit_frames"] = s.roots.frames.explicit_frames;
  Json delta = Json::array();
  for (const auto& a : s.roots.roots) {
    Json j;
    j["coeffs_on_a"] = report::vec_json(a.coeffs);
    j["multiplicity"] = a.m_space.cols();
    j["residual"] = a.residual;
    delta.push_back(j);
  }
  res["restricted_roots"] = delta;
  Json adapted = Json::array();
  long total = s.roots.centralizer.zm.cols();
  for (const auto& a : s.roots.adapted) {
    Json j;
    j["label"] = a.label;
    j["coeffs"] = report::vec_json(a.chart_coeffs);
    j["dim"] = a.m_space.cols();
    if (a.splits) {
      j["p_mult"] = a.p_mult;
      j["h_mult"] = a.h_mult;
    }
    total += a.m_space.cols();
    adapted.push_back(j);
  }
  res["adapted_roots"] = adapted;
  res["zm_t_dim"] = s.roots.centralizer.zm.cols();
  res["zm_t_h_dim"] = s.roots.centralizer.zm_h.cols();
  res["completeness"] = {{"sum", total}, {"dim_m", d.m.cols()}, {"ok", total == d.m.cols()}};
  if (s.general) res["general_spectrum"] = general_json(*s.general, s.roots);
  r["result"] = res;
  return r;
}

Json cmd_density(const RunConfig& cfg) {
  Session s = open_session(cfg);
  Json r = header("density", cfg, s.spec, s.tol);
  const SectionLattice lat = section_lattice(s.triad, s.roots, s.profile, LatticeConfig{.seed = cfg.seed});
  const int rank = s.roots.rank();
  if (cfg.grid < 1) throw InputError("--grid must be positive");
  long total = 1;
  for (int i = 0; i < rank; ++i) total *= cfg.grid;
  if (total > 1'000'000) throw InputError("--grid too large for rank " + std::to_string(rank));
  Json factors = Json::array();
  for (const auto& f : s.profile.factors)
    factors.push_back({{"beta", f.label}, {"kind", f.kind}, {"t", f.t}, {"exponent", f.dim}});
  Json rows = Json::array();
  Vec w(rank);
  for (long p = 0; p < total; ++p) {
    long rem = p;
    for (int i = 0; i < rank; ++i) {
      w(i) = lat.box(i) * static_cast<double>(rem % cfg.grid) / cfg.grid;
      rem /= cfg.grid;
    }
    Json row;
    row["w"] = report::vec_json(w);
    row["theta"] = s.profile.eval(w);
    Json walls = Json::array();
    for (const auto& f : s.profile.factors)
      if (detail::lattice_distance(f.coeffs.dot(w), f.t, std::numbers::pi) < s.tol.angle)
        walls.push_back(f.label + ":" + f.kind);
    row["chamber"] = walls.empty() ? Json("regular") : Json(walls);
    rows.push_back(row);
  }
  Json res;
  res["profile"] = factors;
  res["cell"] = report::vec_json(lat.box);
  res["grid"] = rows;
  r["result"] = res;
  return r;
}

Json cmd_shape(const RunConfig& cfg) {
  Session s = open_session(cfg);
  Json r = header("shape", cfg, s.spec, s.tol);
  const int rank = s.roots.rank();
  const Vec w = parse_vec(cfg.w, rank, "w");
  const Vec u = parse_vec(cfg.u, rank, "u", Vec(Vec::Unit(rank, 0)));
  Json res;
  res["w"] = report::vec_json(w);
  res["u"] = report::vec_json(u);
  std::vector<double> ref;
  if (s.commuting) {
    const ShapeSpectrum cs = shape_spectrum_closed(s.triad, s.roots, w, u);
    res["closed_form"] = spectrum_json(cs, s.roots);
    ref = cs.expanded();
  } else {
    const ShapeSpectrum gs = eval_general_shape(s.roots, *s.general, w, u);
    res["general_form"] = spectrum_json(gs, s.roots);
    res["general_spectrum"] = general_json(*s.general, s.roots);
    ref = gs.expanded();
  }
  const TangentOperator alg = shape_operator_algebraic(s.triad, s.roots, w, u);
  const TangentOperator fd = shape_operator_numeric(s.triad, s.roots, w, u, 1e-4);
  res["algebraic_eigenvalues"] = report::vec_json(operator_eigenvalues(alg));
  res["fd_eigenvalues"] = report::vec_json(operator_eigenvalues(fd));
  res["fd_step"] = 1e-4;
  res["algebraic_max_rel_error"] = max_relative_eigen_error(operator_eigenvalues(alg), ref);
  res["fd_max_rel_error"] = max_relative_eigen_error(operator_eigenvalues(fd), ref);
  res["fd_symmetry_defect"] = fd.symmetry_defect;
  const CommutationResidual cr = commutation_residual(s.triad, s.roots, w, u, u);
  res["tangent_dim"] = cr.tangent_dim;
  res["tangent_rank_numeric"] = tangent_rank_numeric(s.triad, s.roots, w);
  if (!cfg.v.empty()) {
    const Vec v = parse_vec(cfg.v, rank, "v");
    const CommutationResidual c2 = commutation_residual(s.triad, s.roots, w, v, u);
    res["commutation"] = {{"v", report::vec_json(v)},
                          {"curvature_shape", c2.curvature_shape},
                          {"shape_shape", c2.shape_shape},
                          {"invariance", c2.invariance}};
  }
  r["result"] = res;
  return r;
}

Json cmd_volume(const RunConfig& cfg) {
  Session s = open_session(cfg);
  Json r = header("volume", cfg, s.spec, s.tol);
  const int rank = s.roots.rank();
  const Vec w = parse_vec(cfg.w, rank, "w");
  Json res;
  res["w"] = report::vec_json(w);
  res["theta_w"] = s.profile.eval(w);
  if (s.profile.eval(w) == 0.0) throw SingularPointError("volume: Exp(w) is singular (theta = 0)");
  const SectionLattice lat = section_lattice(s.triad, s.roots, s.profile, LatticeConfig{.seed = cfg.seed});
  if (!cfg.v.empty()) {
    const Vec v = parse_vec(cfg.v, rank, "v");
    res["v"] = report::vec_json(v);
    res["theta_v"] = s.profile.eval(v);
    res["theta_ratio"] = orbit_volume_ratio(w, v, s.profile);
    res["gram_oracle_ratio"] = gram_density_ratio(s.triad, s.roots, w, v);
    if (s.commuting) {
      try {
        res["F_closed"] = relative_density(s.roots, w, v);
      } catch (const SingularPointError& e) {
        res["F_closed"] = nullptr;
        res["F_closed_note"] = e.what();
      }
    }
  }
  const VolumeFraction vf = orbit_volume_fraction(w, s.profile, lat);
  res["lattice"] = {{"axis_periods", report::vec_json(lat.axis_periods)},
                    {"weyl_order_estimate", lat.weyl_order_estimate ? Json(*lat.weyl_order_estimate) : Json("unavailable")},
                    {"weyl_note", lat.weyl_note}};
  res["volume_fraction"] = {{"value", vf.value}, {"estimate_dependent", vf.estimate_used}, {"note", vf.note}};
  r["result"] = res;
  return r;
}

Json cmd_integrate(const RunConfig& cfg) {
  Session s = open_session(cfg);
  Json r = header("integrate", cfg, s.spec, s.tol);
  const SectionLattice lat = section_lattice(s.triad, s.roots, s.profile, LatticeConfig{.seed = cfg.seed});
  auto fs = invariant_test_functions(s.triad);
  if (cfg.f != "all") fs = {find_function(fs, cfg.f)};
  QuadratureConfig qc;
  qc.base_resolution = std::max(1, cfg.grid / (1 << std::max(0, cfg.levels - 1)));
  qc.levels = cfg.levels;
  qc.seed = cfg.seed;
  if (s.roots.rank() == 1) qc.base_resolution = std::max(qc.base_resolution, 16);
  const auto q = integrate_invariant(s.triad, s.roots, s.profile, lat, fs, qc);
  McConfig mc{cfg.mc_n, cfg.seed, cfg.workers};
  const auto m = haar_mc_integrate(s.triad, fs, mc);
  Json rows = Json::array();
  for (size_t i = 0; i < fs.size(); ++i) {
    Json j;
    j["function"] = fs[i].name;
    j["quadrature"] = q[i].value;
    j["quadrature_error_estimate"] = q[i].error_estimate;
    j["quadrature_levels"] = report::vec_json(q[i].level_values);
    j["invariance_defect"] = q[i].invariance_defect;
    j["mc_mean"] = m[i].mean;
    j["mc_std_error"] = m[i].std_error;
    const double diff = std::abs(q[i].value - m[i].mean);
    j["difference"] = diff;
    j["agree_3se"] = diff <= 3 * m[i].std_error + q[i].error_estimate;
    rows.push_back(j);
  }
  Json res;
  res["cell"] = report::vec_json(lat.box);
  res["grid_points"] = q.empty() ? 0 : q.front().points;
  res["results"] = rows;
  r["result"] = res;
  return r;
}

Json cmd_verify(const RunConfig& cfg, bool& ok) {
  const TriadSpec spec = resolve_triad(cfg);
  Tolerances tol;
  tol.angle = cfg.tol;
  Json r = header("verify", cfg, spec, tol);
  VerifyConfig vc;
  vc.seed = cfg.seed;
  vc.integration = cfg.mc_n > 0;
  vc.mc = McConfig{cfg.mc_n, cfg.seed, cfg.workers};
  vc.quad.levels = cfg.levels;
  vc.quad.seed = cfg.seed;
  const VerifyReport rep = verify_triad(spec, vc);
  ok = rep.all_pass();
  r["result"] = {{"all_pass", ok}, {"checks", rep.to_json()}};
  return r;
}

Json cmd_list() {
  Json r;
  r["schema_version"] = report::kSchemaVersion;
  r["command"] = "list";
  Json a = Json::array();
  for (const auto& e : catalog::list()) a.push_back({{"name", e.name}, {"description", e.description}, {"params", e.params}});
  r["triads"] = a;
  r["functions"] = {"one", "inv1", "inv2", "inv3", "inv4", "cos2 (sphere-isotropy only)"};
  return r;
}

Json cmd_closed_form(const RunConfig& cfg) {
  if (!cfg.p || !cfg.q) throw InputError("closed-form requires --p and --q");
  const auto c = catalog::compare_closed_form(*cfg.p, *cfg.q, cfg.seed);
  Json r;
  r["schema_version"] = report::kSchemaVersion;
  r["command"] = "closed-form";
  Json rows = Json::array();
  for (const auto& f : c.factors)
    rows.push_back({{"argument", f.label},
                    {"printed_sin_exponent", f.printed_sin},
                    {"printed_cos_exponent", f.printed_cos},
                    {"derived_sin_exponent", f.derived_sin},
                    {"derived_cos_exponent", f.derived_cos},
                    {"match", f.matches()}});
  r["result"] = {{"p", c.p},
                 {"q", c.q},
                 {"factors", rows},
                 {"excluded", c.excluded},
                 {"all_factors_match", c.all_factors_match()},
                 {"max_relative_difference", c.max_relative_difference}};
  return r;
}

void emit(const Json& j, const RunConfig& cfg) {
  if (cfg.format != "json" && cfg.format != "csv") throw InputError("--format must be json or csv");
  const std::string text = cfg.format == "csv" ? report::to_csv_string(j) : report::to_json_string(j);
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + cfg.out + "'");
    f << text;
  }
}

void add_common(CLI::App* app, RunConfig& cfg, bool needs_point) {
  app->add_option("--triad", cfg.triad, "catalog triad name (see `list`)");
  app->add_option("--triad-file", cfg.triad_file, "triad JSON {n, sigma1_conjugator, sigma2_conjugator, ...}");
  app->add_option("--p", cfg.p);
  app->add_option("--q", cfg.q);
  app->add_option("--n", cfg.n);
  app->add_option("--a", cfg.a);
  app->add_option("--b", cfg.b);
  app->add_option("--c", cfg.c);
  app->add_option("--d", cfg.d);
  app->add_option("--blocks", cfg.blocks, "block sizes a,b or a,b,c,d");
  app->add_option("--conjugate-scale", cfg.conjugate_scale, "conjugate H by exp(scale * random skew X), seeded");
  app->add_option("--seed", cfg.seed);
  app->add_option("--tol", cfg.tol, "angle tolerance for regularity tests");
  app->add_option("--out", cfg.out);
  app->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
  if (needs_point) {
    app->add_option("--w", cfg.w, "section point, comma-separated chart coordinates");
    app->add_option("--u", cfg.u, "normal direction in the section");
    app->add_option("--v", cfg.v, "second section vector");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermann actions on compact symmetric spaces: roots, shape operators, densities, integration"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto* roots = app.add_subcommand("roots", "restricted and adapted root data");
  auto* density = app.add_subcommand("density", "tabulate theta over the section cell");
  auto* shape = app.add_subcommand("shape", "shape-operator spectra at (w, u)");
  auto* volume = app.add_subcommand("volume", "orbit-volume ratios and fractions");
  auto* integrate = app.add_subcommand("integrate", "section quadrature vs Haar Monte Carlo");
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  auto* list = app.add_subcommand("list", "list catalog triads");
  auto* exportc = app.add_subcommand("export", "write the triad as JSON");
  auto* closed = app.add_subcommand("closed-form", "compare the printed U(p+q) product with derived theta");
  for (auto* s : {roots, density, exportc}) add_common(s, cfg, false);
  for (auto* s : {shape, volume}) add_common(s, cfg, true);
  for (auto* s : {integrate, verify}) add_common(s, cfg, false);
  density->add_option("--grid", cfg.grid, "points per axis");
  for (auto* s : {integrate, verify}) {
    s->add_option("--grid", cfg.grid, "finest quadrature points per axis");
    s->add_option("--levels", cfg.levels, "quadrature doublings");
    s->add_option("--mc-n", cfg.mc_n, "Monte-Carlo samples (verify: 0 skips integration)");
    s->add_option("--workers", cfg.workers, "Monte-Carlo worker streams");
  }
  integrate->add_option("--f", cfg.f, "test function or `all`");
  cfg.grid = 32;
  closed->add_option("--p", cfg.p)->required();
  closed->add_option("--q", cfg.q)->required();
  closed->add_option("--seed", cfg.seed);
  closed->add_option("--out", cfg.out);
  closed->add_option("--format", cfg.format);
  list->add_option("--format", cfg.format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }
  // Integration defaults: the finest grid is grid points per axis.
  if (integrate->parsed() || verify->parsed()) {
    if (cfg.grid == 32) cfg.grid = 256;
  }
  try {
    bool ok = true;
    Json out;
    if (roots->parsed()) out = cmd_roots(cfg);
    else if (density->parsed()) out = cmd_density(cfg);
    else if (shape->parsed()) out = cmd_shape(cfg);
    else if (volume->parsed()) out = cmd_volume(cfg);
    else if (integrate->parsed()) out = cmd_integrate(cfg);
    else if (verify->parsed()) out = cmd_verify(cfg, ok);
    else if (list->parsed()) out = cmd_list();
    else if (exportc->parsed()) out = report::triad_to_json(resolve_triad(cfg));
    else if (closed->parsed()) out = cmd_closed_form(cfg);
    emit(out, cfg);
    return ok ? kOk : kVerify;
  } catch (const TriadFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTriadFile;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const SingularPointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSingular;
  } catch (const InvarianceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerify;
  } catch (const DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDegenerate;
  }
}

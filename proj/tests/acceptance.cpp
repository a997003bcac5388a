// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hermann/catalog.hpp"
#include "hermann/verify.hpp"

#ifndef HERMANN_CLI
#error "HERMANN_CLI must point at the hermann_cli binary"
#endif

using namespace hermann;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<TriadSpec> catalog_triads() {
  return {catalog::make_isotropy(3),
          catalog::make_isotropy(5),
          catalog::make_grassmannian_isotropy(2, 3),
          catalog::make_double_grassmannian(2, 4, 3, 3),
          catalog::make_unitary_on_grassmannian(1, 2),
          catalog::make_unitary_on_grassmannian(2, 2),
          catalog::make_unitary_on_grassmannian(2, 3)};
}

std::string tag(const TriadSpec& s) {
  std::string t = s.name;
  for (const auto& [k, v] : s.params) t += " " + k + "=" + std::to_string(v);
  return t;
}

TriadSpec conjugated_triad() {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  Mat x = Mat::Zero(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      x(i, j) = 0.3 * nd(rng);
      x(j, i) = -x(i, j);
    }
  return catalog::make_conjugated(catalog::make_double_grassmannian(2, 3, 3, 2), x);
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects failing checks of a report into `o`.
void absorb(const VerifyReport& r, const std::string& who, Outcome& o) {
  for (const auto& c : r.checks)
    if (!c.pass) {
      o.pass = false;
      o.detail += " [" + who + ": " + c.group + "/" + c.name + " = " + report::format_number(c.value) + " > " +
                  report::format_number(c.threshold) + "]";
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Root data for U(p+q) on the Grassmannian. Expected families: ±ε_i with
// (2(q-p), 2(q-p)); ±2ε_i with (1, 0); ε_i ± ε_j with two (1, 1) families,
// i.e. (2, 2) on the merged root space.
Outcome root_data() {
  Outcome o;
  double worst_time = 0.0;
  for (auto [p, q] : std::array<std::pair<int, int>, 4>{{{1, 1}, {1, 2}, {2, 2}, {2, 3}}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const Triad tr = build_triad(catalog::make_unitary_on_grassmannian(p, q));
    const RootSystem rs = analyze_roots(tr);
    const std::string who = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
    int n_single = 0, n_double = 0, n_pair = 0;
    long total = rs.centralizer.zm.cols();
    for (const auto& a : rs.adapted) {
      total += a.p_mult + a.h_mult;
      std::vector<long> c;
      for (Eigen::Index i = 0; i < a.chart_coeffs.size(); ++i) {
        const double v = a.chart_coeffs(i);
        if (std::abs(v - std::round(v)) > 1e-8) c.push_back(99);
        else c.push_back(std::lround(std::abs(v)));
      }
      int ones = 0, twos = 0, other = 0;
      for (long v : c) {
        if (v == 1) ++ones;
        else if (v == 2) ++twos;
        else if (v != 0) ++other;
      }
      int wp = -1, wh = -1;
      if (other == 0 && ones == 1 && twos == 0) {
        wp = wh = 2 * (q - p);
        ++n_single;
      } else if (other == 0 && ones == 0 && twos == 1) {
        wp = 1;
        wh = 0;
        ++n_double;
      } else if (other == 0 && ones == 2 && twos == 0) {
        wp = wh = 2;
        ++n_pair;
      }
      if (a.p_mult != wp || a.h_mult != wh) {
        o.pass = false;
        o.detail += " " + who + " root " + a.label + " has (" + std::to_string(a.p_mult) + "," +
                    std::to_string(a.h_mult) + ")";
      }
    }
    const int want_single = q > p ? p : 0, want_double = p, want_pair = p * (p - 1);
    if (n_single != want_single || n_double != want_double || n_pair != want_pair) {
      o.pass = false;
      o.detail += " " + who + " root count mismatch";
    }
    if (total != tr.decomp.m.cols()) {
      o.pass = false;
      o.detail += " " + who + " dimension check " + std::to_string(total) + " != " + std::to_string(tr.decomp.m.cols());
    }
    const double dt = seconds_since(t0);
    worst_time = std::max(worst_time, dt);
    if (dt > 10.0) {
      o.pass = false;
      o.detail += " " + who + " took " + std::to_string(dt) + " s";
    }
  }
  if (o.pass) {
    std::ostringstream os;
    os << "4 triads; families and sum(h+p)+dim z_m(t) = dim m exact; slowest " << worst_time << " s";
    o.detail = os.str();
  }
  return o;
}

// 2. Commutation: R_v|_T with A_u and A_v with A_u, half the configurations on walls.
Outcome commutation() {
  Outcome o;
  int configs = 0;
  auto specs = catalog_triads();
  specs.push_back(conjugated_triad());
  for (const auto& s : specs) {
    const VerifyContext c = make_context(s, kDefaultSeed);
    VerifyConfig cfg;
    cfg.commutation_configs = 8;
    VerifyReport r;
    check_commutation(c, cfg, r);
    absorb(r, tag(s), o);
    configs += cfg.commutation_configs;
  }
  if (o.pass) o.detail = std::to_string(configs) + " configurations over " + std::to_string(specs.size()) +
                         " triads (half on walls), residuals < 1e-8";
  return o;
}

// 3. Shape spectra vs finite differences, with the step-halving order check.
Outcome shape_spectra() {
  Outcome o;
  auto specs = catalog_triads();
  for (const auto& s : specs) {
    const VerifyContext c = make_context(s, kDefaultSeed);
    VerifyConfig cfg;
    cfg.shape_points = 5;
    VerifyReport r;
    check_shape(c, cfg, r);
    absorb(r, tag(s), o);
  }
  if (o.pass) o.detail = std::to_string(specs.size()) + " triads x 5 regular points; FD(1e-4) within 1e-5, order ~2";
  return o;
}

// 4. General path on commuting triads.
Outcome general_path() {
  Outcome o;
  auto specs = catalog_triads();
  for (const auto& s : specs) {
    const VerifyContext c = make_context(s, kDefaultSeed);
    VerifyConfig cfg;
    VerifyReport r;
    check_general(c, cfg, r);
    absorb(r, tag(s), o);
  }
  if (o.pass) o.detail = "t in {pi/2, pi} within 1e-8, c = cot t within 1e-10 on " + std::to_string(specs.size()) + " triads";
  return o;
}

// 5. Density identities and the 8/(3 sqrt 3) hand value.
Outcome density() {
  Outcome o;
  for (const auto& s : catalog_triads()) {
    const VerifyContext c = make_context(s, kDefaultSeed);
    VerifyConfig cfg;
    cfg.density_pairs = 20;
    VerifyReport r;
    check_density(c, cfg, r);
    absorb(r, tag(s), o);
  }
  const Triad tr = build_triad(catalog::make_unitary_on_grassmannian(1, 2));
  const RootSystem rs = analyze_roots(tr);
  const DensityProfile prof = density_profile(rs);
  Vec a(1), b(1);
  a << pi / 6;
  b << pi / 4;
  const double want = 8.0 / (3.0 * std::sqrt(3.0));
  const double f = relative_density(rs, a, b), th = orbit_volume_ratio(a, b, prof), g = gram_density_ratio(tr, rs, a, b);
  if (std::abs(f - want) > 1e-9 * want || std::abs(th - want) > 1e-9 * want) {
    o.pass = false;
    o.detail += " closed forms give " + report::format_number(f) + ", " + report::format_number(th);
  }
  if (std::abs(g - want) > 1e-6 * want) {
    o.pass = false;
    o.detail += " Gram oracle gives " + report::format_number(g);
  }
  if (o.pass) {
    std::ostringstream os;
    os.precision(12);
    os << "20 pairs/triad; theta ratio = F = Gram; U(1+2) ratio " << f << " (Gram " << g << ") vs 8/(3 sqrt3) " << want;
    o.detail = os.str();
  }
  return o;
}

// 6. Section quadrature vs Haar Monte Carlo at N = 1e6.
Outcome integration() {
  Outcome o;
  double slowest = 0.0;
  int functions = 0;
  for (const auto& s : catalog_triads()) {
    const auto t0 = std::chrono::steady_clock::now();
    const VerifyContext c = make_context(s, kDefaultSeed);
    VerifyConfig cfg;
    cfg.integration = true;
    cfg.mc = McConfig{1'000'000, kDefaultSeed, 4};
    VerifyReport r;
    check_integration(c, cfg, r);
    absorb(r, tag(s), o);
    for (const auto& ch : r.checks)
      if (ch.name.rfind("quadrature_vs_mc_", 0) == 0 && ch.name != "quadrature_vs_mc_one") ++functions;
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    if (dt > 300.0) {
      o.pass = false;
      o.detail += " " + tag(s) + " took " + std::to_string(dt) + " s";
    }
  }
  if (o.pass) {
    std::ostringstream os;
    os << functions << " function/triad pairs within 3 SE (+ quadrature error); cos^2 on S^{n-1} = 1/n (1/3 on S^2); slowest triad "
       << slowest << " s";
    o.detail = os.str();
  }
  return o;
}

// 7. H = K: no h-parts, θ = Π |sin β|^{m_β}.
Outcome isotropy_degeneration() {
  Outcome o;
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, pi);
  for (const auto& s : {catalog::make_isotropy(3), catalog::make_isotropy(5), catalog::make_grassmannian_isotropy(2, 3),
                        catalog::make_grassmannian_isotropy(3, 3)}) {
    const Triad tr = build_triad(s);
    const RootSystem rs = analyze_roots(tr);
    const DensityProfile prof = density_profile(rs);
    for (const auto& a : rs.adapted)
      if (a.h_mult != 0 || a.p_mult != a.m_space.cols()) {
        o.pass = false;
        o.detail += " " + tag(s) + " root " + a.label + " h=" + std::to_string(a.h_mult);
      }
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      Vec w(rs.rank());
      for (int i = 0; i < rs.rank(); ++i) w(i) = u(rng);
      double classical = 1.0;
      for (const auto& a : rs.adapted) classical *= std::pow(std::abs(std::sin(a.eval(w))), static_cast<double>(a.m_space.cols()));
      worst = std::max(worst, std::abs(prof.eval(w) - classical) / std::max(1e-300, classical));
    }
    if (worst > 1e-12) {
      o.pass = false;
      o.detail += " " + tag(s) + " theta differs by " + report::format_number(worst);
    }
  }
  if (o.pass) o.detail = "4 H = K triads: h_beta = 0 exactly, theta = prod |sin beta|^m_beta to 1e-12";
  return o;
}

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  CliRun r;
  const std::string cmd = std::string("\"") + HERMANN_CLI + "\" " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return r;
  std::array<char, 4096> buf{};
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(f);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

// 8. Byte-identical reports for repeated commands.
Outcome determinism() {
  Outcome o;
  const std::vector<std::string> commands{
      "list",
      "roots --triad u-on-grassmannian --p 2 --q 3",
      "roots --triad sphere-isotropy --n 4 --conjugate-scale 0.3 --format csv",
      "density --triad u-on-grassmannian --p 1 --q 2 --grid 16",
      "shape --triad double-grassmannian --a 2 --b 4 --c 3 --d 3 --w 0.3,0.5 --u 1,0.5 --v 0.2,-1",
      "volume --triad u-on-grassmannian --p 1 --q 2 --w 0.5235987755982988 --v 0.7853981633974483",
      "integrate --triad sphere-isotropy --n 3 --mc-n 20000 --seed 7",
      "verify --triad u-on-grassmannian --p 1 --q 2 --mc-n 20000 --seed 3",
      "export --triad u-on-grassmannian --p 1 --q 2",
      "closed-form --p 2 --q 3",
  };
  for (const auto& c : commands) {
    const CliRun a = run_cli(c), b = run_cli(c);
    if (a.status != 0 || b.status != 0 || a.out.empty() || a.out != b.out) {
      o.pass = false;
      o.detail += " [" + c + ": exit " + std::to_string(a.status) + "/" + std::to_string(b.status) +
                  (a.out == b.out ? "" : ", outputs differ") + "]";
    }
  }
  // in-process: verify reports are identical strings
  VerifyConfig cfg;
  cfg.integration = true;
  cfg.mc = McConfig{20000, 11, 4};
  const auto s = catalog::make_unitary_on_grassmannian(2, 2);
  const std::string r1 = report::to_json_string(verify_triad(s, cfg).to_json());
  const std::string r2 = report::to_json_string(verify_triad(s, cfg).to_json());
  if (r1 != r2) {
    o.pass = false;
    o.detail += " in-process verify reports differ";
  }
  if (o.pass) o.detail = std::to_string(commands.size()) + " CLI commands run twice, byte-identical; in-process verify identical";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "root data, U(p+q) on the Grassmannian", root_data},
      {2, "curvature/shape commutation", commutation},
      {3, "shape spectra vs finite differences", shape_spectra},
      {4, "general path on commuting triads", general_path},
      {5, "density and volume identities", density},
      {6, "section quadrature vs Haar Monte Carlo", integration},
      {7, "H = K degeneration", isotropy_degeneration},
      {8, "determinism", determinism},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double dt = seconds_since(t0);
    all = all && o.pass;
    std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), dt);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}

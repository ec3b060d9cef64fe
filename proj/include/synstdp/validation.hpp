#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "synstdp/analysis.hpp"
#include "synstdp/closedform.hpp"
#include "synstdp/config.hpp"
#include "synstdp/energy.hpp"
#include "synstdp/io.hpp"
#include "synstdp/montecarlo.hpp"

namespace synstdp::validation {

struct CriterionResult {
  std::string id;
  bool passed = false;
  std::string detail;
};

struct Options {
  std::size_t epochs = 10000;
  std::size_t determinism_epochs = 2000;
  std::uint64_t seed = 42;
  unsigned workers = 0;
  std::filesystem::path scratch;  // empty: a fresh directory under the system temp dir
};

/// 16 unattenuated branches.
inline WindowConfig fig4b_setup() {
  auto w = RunConfig::default_window();
  w.geometry.bank = DendriteBank::make(16, 1.0, 1.0, 0.0);
  return w;
}

/// 16 branches, alpha ramp 0.6..1 (the default configuration).
inline WindowConfig fig4d_setup() { return RunConfig::default_window(); }

/// Attenuation ramp plus a 0.3 delay ramp.
inline WindowConfig fig7_setup() {
  auto w = RunConfig::default_window();
  w.geometry.bank = DendriteBank::make(16, 0.6, 1.0, 0.3, DelayAssignment::Ramp);
  return w;
}

namespace detail {

inline std::string num(double v, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

inline bool within_rel(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::abs(want);
}

// Split-policy analytic value at one delta_t.
inline double analytic_at(const WindowConfig& cfg, double dt) {
  WindowPoint pt;
  pt.delta_t = dt;
  const auto drives = branch_drives(cfg.geometry, dt);
  synstdp::detail::analytic_point(cfg.init, drives, pt);
  return pt.analytic;
}

inline std::vector<Point2> expectation_curve(const WindowConfig& cfg, double lo, double hi,
                                             double step) {
  std::vector<Point2> out;
  for (double dt : delta_t_grid(lo, hi, step)) out.push_back({dt, analytic_at(cfg, dt)});
  return out;
}

// Empirical distribution of n_set - n_reset at one grid point.
inline std::map<int, double> level_histogram(const WindowPoint& pt) {
  std::map<int, double> h;
  for (const auto& e : pt.epochs) h[e.n_set - e.n_reset] += 1.0;
  for (auto& [k, v] : h) v /= static_cast<double>(pt.epochs.size());
  return h;
}

inline double tv_distance(const WindowPoint& a, const WindowPoint& b) {
  const auto ha = level_histogram(a), hb = level_histogram(b);
  std::set<int> keys;
  for (const auto& [k, _] : ha) keys.insert(k);
  for (const auto& [k, _] : hb) keys.insert(k);
  double tv = 0.0;
  for (int k : keys) {
    const auto ia = ha.find(k), ib = hb.find(k);
    tv += std::abs((ia == ha.end() ? 0.0 : ia->second) - (ib == hb.end() ? 0.0 : ib->second));
  }
  return 0.5 * tv;
}

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

/// Table 1: E_spk, E_SNN, throughput and GPU ratio for all three columns.
inline CriterionResult check_a1() {
  using namespace synstdp::energy;
  struct Row {
    EnergyScenario sc;
    double e_spk, e_snn, thr;
  };
  const Row rows[] = {{conservative(), 45e-15, 62e-6, 16e3},
                      {medium(), 0.45e-15, 560e-9, 1.8e6},
                      {aggressive(), 0.045e-15, 25e-9, 41e6}};
  bool ok = true;
  std::string d;
  for (const auto& r : rows) {
    const auto col = table1({r.sc}).front();
    const bool pass = detail::within_rel(col.e_spk, r.e_spk, 0.005) && detail::within_rel(col.e_snn, r.e_snn, 0.02) &&
                      detail::within_rel(col.throughput, r.thr, 0.02);
    ok = ok && pass;
    d += r.sc.name + ": E_spk=" + si(col.e_spk, "J") + " E_SNN=" + si(col.e_snn, "J") +
         " img/s/W=" + si(col.throughput, "") + "; ";
  }
  const auto ratio = table1({conservative()}, 170.0).front().ratio;
  ok = ok && detail::within_rel(ratio, 94.0, 0.03);
  d += "ratio=" + detail::num(ratio, 4);
  return {"A1", ok, d};
}

inline StdpWindow run_with(WindowConfig cfg, const Options& opt) {
  cfg.epochs = opt.epochs;
  cfg.seed = opt.seed;
  cfg.workers = opt.workers;
  return run_window(cfg);
}

/// MC mean vs expectation, bound max(4 s / sqrt(N), 1e-9), at most one outlier.
inline CriterionResult check_a2_window(const std::string& label, const StdpWindow& w) {
  int outliers = 0;
  double worst = 0.0;
  for (const auto& s : window_summary(w)) {
    const double n = static_cast<double>(w.points.front().epochs.size());
    const double bound = std::max(4.0 * s.mc_std / std::sqrt(n), 1e-9);
    const double dev = std::abs(s.mc_mean - s.analytic);
    worst = std::max(worst, dev / bound);
    if (dev > bound) ++outliers;
  }
  return {"A2", outliers <= 1,
          label + ": outliers=" + std::to_string(outliers) + " worst |dev|/bound=" + detail::num(worst, 3)};
}

/// Poisson-binomial recurrence vs 2^n enumeration.
inline CriterionResult check_a3(std::uint64_t seed = 42) {
  PhiloxStream rng(seed, 0xA3, 0);
  double worst = 0.0;
  for (int n = 1; n <= 12; ++n) {
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> p(n);
      for (auto& v : p) v = rng.uniform();
      std::vector<double> oracle(n + 1, 0.0);
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double prob = 1.0;
        int ones = 0;
        for (int j = 0; j < n; ++j) {
          const bool on = (mask >> j) & 1u;
          prob *= on ? p[j] : 1.0 - p[j];
          ones += on;
        }
        oracle[ones] += prob;
      }
      const auto got = state_distribution(p);
      for (int k = 0; k <= n; ++k) worst = std::max(worst, std::abs(got[k] - oracle[k]));
    }
  }
  return {"A3", worst <= 1e-12, "max |recurrence - enumeration| = " + detail::num(worst, 3) + " over 600 vectors"};
}

/// Appendix worked parameters: direct sum, fitted quadratic, envelope, paper coefficients.
inline CriterionResult check_a4() {
  using namespace synstdp::closedform;
  const AppendixParams p;  // A=1.3, dV=0.02, beta=0.08, V_th=1, gamma=2, n=16
  // brute-force sum, written out from the per-branch definition
  auto brute = [&](double dt) {
    double g = 0.0;
    for (int i = 1; i <= 16; ++i) {
      const double v = 1.3 - 0.02 * i - 0.08 * dt;
      double pr = 2.0 * (v - 1.0);
      if (pr < 0) pr = 0;
      if (pr > 1) pr = 1;
      g += pr;
    }
    return g;
  };
  const double g0 = avg_conductance_direct(p, 0.0);
  const bool direct_ok = std::abs(g0 - 4.2) <= 1e-12 && std::abs(g0 - brute(0.0)) <= 1e-12;

  const double lo = 0.3, hi = 0.4;
  const auto q = quadratic_coeffs_fitted(p, lo, hi);
  const double envelope = p.gamma * p.delta_v * p.n;
  double interp = 0.0, env = 0.0;
  for (int j = 0; j < 20; ++j) {
    const double dt = lo + (hi - lo) * j / 19.0;
    interp = std::max(interp, std::abs(q(dt) - avg_conductance_continuous(p, dt)));
    env = std::max(env, std::abs(q(dt) - brute(dt)));
  }
  const auto paper = quadratic_coeffs_paper(p);
  const bool ok = direct_ok && interp <= 1e-9 && q.c > 0 && env <= envelope;
  return {"A4", ok,
          "G(0)=" + detail::num(g0, 12) + " interp_err=" + detail::num(interp, 3) + " c=" + detail::num(q.c) +
              " envelope_dev=" + detail::num(env, 4) + "<=" + detail::num(envelope) + "; paper (a,b,c)=(" +
              detail::num(paper.a) + ", " + detail::num(paper.b) + ", " + detail::num(paper.c) + ") vs fitted (" +
              detail::num(q.a) + ", " + detail::num(q.b) + ", " + detail::num(q.c) + ")"};
}

/// Exponential vs linear classification on the expectation curves.
inline CriterionResult check_a5() {
  const auto d = detail::expectation_curve(fig4d_setup(), 1.0, 6.0, 0.1);
  const auto d_exp = fit_exponential(d);
  const auto d_lin = fit_linear(d);
  const bool d_ok = d_exp.r_squared >= 0.95 && d_exp.rmse < d_lin.rmse;

  const auto b = detail::expectation_curve(fig4b_setup(), 1.0, 5.0, 0.1);
  const auto b_exp = fit_exponential(b);
  const auto b_lin = fit_linear(b);
  const bool b_ok = b_lin.rmse <= b_exp.rmse;

  return {"A5", d_ok && b_ok,
          std::string("attenuated [1,6]: exp R2=") + detail::num(d_exp.r_squared, 4) +
              " exp rmse=" + detail::num(d_exp.rmse, 4) + " lin rmse=" + detail::num(d_lin.rmse, 4) +
              (d_ok ? " ok" : " FAIL") + "; unattenuated [1,5]: lin rmse=" + detail::num(b_lin.rmse, 4) +
              " exp rmse=" + detail::num(b_exp.rmse, 4) + (b_ok ? " ok" : " FAIL")};
}

/// Plateaus on (0, 1) and (-1, 0) for the unattenuated window.
inline CriterionResult check_a6() {
  const auto cfg = fig4b_setup();
  double spread_pos = 0.0, spread_neg = 0.0;
  for (int side : {1, -1}) {
    double lo = 1e300, hi = -1e300;
    for (int k = 1; k < 100; ++k) {
      const double v = detail::analytic_at(cfg, side * k * 0.01);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    (side > 0 ? spread_pos : spread_neg) = hi - lo;
  }
  return {"A6", spread_pos <= 1e-9 && spread_neg <= 1e-9,
          "spread on (0,1)=" + detail::num(spread_pos, 3) + " on (-1,0)=" + detail::num(spread_neg, 3)};
}

/// Every level 1..16 observed with sigma_lrs = 0.
inline CriterionResult check_a7(const Options& opt) {
  auto cfg = fig4d_setup();
  cfg.geometry.device.sigma_lrs = 0.0;
  const auto w = run_with(cfg, opt);
  std::set<long> levels;
  bool integral = true;
  for (const auto& pt : w.points)
    for (const auto& e : pt.epochs) {
      const double a = std::abs(e.delta_g_norm);
      integral = integral && std::abs(a - std::round(a)) < 1e-9;
      levels.insert(std::lround(a));
    }
  bool all = integral && *levels.rbegin() <= 16;
  std::string missing;
  for (long k = 1; k <= 16; ++k)
    if (!levels.count(k)) {
      all = false;
      missing += " " + std::to_string(k);
    }
  return {"A7", all,
          std::to_string(levels.size()) + " distinct |dG| levels" + (missing.empty() ? "" : ", missing:" + missing)};
}

/// Delay ramp gives nonzero expectation at 0 and +-0.1.
inline CriterionResult check_a8() {
  const auto cfg = fig7_setup();
  const double e0 = detail::analytic_at(cfg, 0.0);
  const double ep = detail::analytic_at(cfg, 0.1);
  const double en = detail::analytic_at(cfg, -0.1);
  const bool ok = std::abs(e0) > 0 && std::abs(ep) > 0 && std::abs(en) > 0;
  return {"A8", ok,
          "E[dG](0)=" + detail::num(e0) + " E[dG](0.1)=" + detail::num(ep) + " E[dG](-0.1)=" + detail::num(en)};
}

/// Amplitude noise shifts the state-occupancy distribution; 0.01 less than 0.05.
inline CriterionResult check_a9(const StdpWindow& noiseless, const Options& opt) {
  auto cfg = fig4d_setup();
  cfg.amp_noise_sigma = 0.05;
  const auto w05 = run_with(cfg, opt);
  cfg.amp_noise_sigma = 0.01;
  const auto w01 = run_with(cfg, opt);
  int shifted = 0;
  double max05 = 0.0, max01 = 0.0;
  for (std::size_t i = 0; i < noiseless.points.size(); ++i) {
    const double tv05 = detail::tv_distance(noiseless.points[i], w05.points[i]);
    const double tv01 = detail::tv_distance(noiseless.points[i], w01.points[i]);
    shifted += tv05 > 0.05;
    max05 = std::max(max05, tv05);
    max01 = std::max(max01, tv01);
  }
  return {"A9", shifted >= 10 && max01 < max05,
          "points with TV>0.05 at sigma 0.05: " + std::to_string(shifted) + "; max TV 0.05=" + detail::num(max05, 4) +
              " 0.01=" + detail::num(max01, 4)};
}

/// window.csv bytes identical for 1, 4 and 16 workers.
inline CriterionResult check_a10(const Options& opt) {
  namespace fs = std::filesystem;
  fs::path dir = opt.scratch;
  if (dir.empty())
    dir = fs::temp_directory_path() /
          ("synstdp_a10_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  fs::create_directories(dir);
  auto cfg = fig4d_setup();
  cfg.epochs = opt.determinism_epochs;
  cfg.seed = opt.seed;
  std::vector<std::string> bytes;
  for (unsigned workers : {1u, 4u, 16u}) {
    cfg.workers = workers;
    const auto path = dir / ("window_w" + std::to_string(workers) + ".csv");
    write_window_file(run_window(cfg), path);
    bytes.push_back(detail::read_bytes(path));
  }
  std::error_code ec;
  if (opt.scratch.empty()) fs::remove_all(dir, ec);
  const bool ok = !bytes[0].empty() && bytes[0] == bytes[1] && bytes[0] == bytes[2];
  return {"A10", ok, std::to_string(bytes[0].size()) + " bytes per file, workers 1/4/16 " + (ok ? "identical" : "differ")};
}

/// Runs A1..A10 in order, reporting each result as soon as it is known.
inline std::vector<CriterionResult> run_all(const Options& opt,
                                            const std::function<void(const CriterionResult&)>& report = {}) {
  std::vector<CriterionResult> out;
  auto emit = [&](CriterionResult r) {
    if (report) report(r);
    out.push_back(std::move(r));
  };
  emit(check_a1());
  {
    const auto wb = run_with(fig4b_setup(), opt);
    const auto wd = run_with(fig4d_setup(), opt);
    auto rb = check_a2_window("unattenuated", wb);
    auto rd = check_a2_window("attenuated", wd);
    emit({"A2", rb.passed && rd.passed, rb.detail + "; " + rd.detail});
    emit(check_a3(opt.seed));
    emit(check_a4());
    emit(check_a5());
    emit(check_a6());
    emit(check_a7(opt));
    emit(check_a8());
    emit(check_a9(wd, opt));
  }
  emit(check_a10(opt));
  return out;
}

}  // namespace synstdp::validation

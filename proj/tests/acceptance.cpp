// Desk-scale acceptance sweep. Eight criteria, one [PASS]/[FAIL] line each,
// tolerances pinned below; the exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "eplab/experiments.hpp"
#include "test_util.hpp"

using namespace eplab;
using test_util::random_band_field;

namespace {

int failures = 0;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

void line(int idx, const std::string& label, bool pass, const std::string& detail, double secs) {
  std::printf("[%s] criterion %d: %s — %s (%.0f s)\n", pass ? "PASS" : "FAIL", idx, label.c_str(),
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

const Verdict* find(const ExperimentReport& rep, const std::string& name) {
  for (const auto& v : rep.verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

bool pass_all(const ExperimentReport& rep, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    const Verdict* v = find(rep, n);
    if (v == nullptr || !v->pass) return false;
  }
  const Verdict* aborted = find(rep, "solver_completed");
  return aborted == nullptr || aborted->pass;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void criterion_1() {
  const double t0 = now_seconds();
  try {
    ExperimentConfig cfg;  // defaults: n in {4,5,6}, m sweep {0,8,16}
    ExperimentReport rep = exp_localization(cfg);
    const Verdict* d = find(rep, "block_identity_diagonal");
    const Verdict* o = find(rep, "block_identity_offdiagonal");
    line(1, "dyadic localization of the wave packets",
         pass_all(rep, {"block_identity_diagonal", "block_identity_offdiagonal"}),
         fmt("diag=%.3g (tol 1e-10), offdiag=%.3g (tol 1e-12)", d->observed, o->observed),
         now_seconds() - t0);
  } catch (const std::exception& e) {
    line(1, "dyadic localization of the wave packets", false, e.what(), now_seconds() - t0);
  }
}

void criterion_2() {
  const double t0 = now_seconds();
  try {
    ExperimentConfig cfg;
    cfg.tolerances["slope_tol_g"] = 0.05;  // pinned: g slope -1 within 0.05
    ExperimentReport rep = exp_norm_scaling(cfg, {-1.0, 0.0, 1.0});
    const Verdict* f = find(rep, "f_slope");
    const Verdict* g = find(rep, "g_slope");
    const Verdict* m = find(rep, "m_independence");
    line(2, "Besov norm scaling of (f_n, g_n)",
         pass_all(rep, {"f_slope", "g_slope", "m_independence"}),
         fmt("|f slope-k|=%.3g (tol 0.1), |g slope+1|=%.3g (tol 0.05), m-dep=%.3g (tol 1e-6)",
             f->observed, g->observed, m->observed),
         now_seconds() - t0);
  } catch (const std::exception& e) {
    line(2, "Besov norm scaling of (f_n, g_n)", false, e.what(), now_seconds() - t0);
  }
}

void criterion_3() {
  const double t0 = now_seconds();
  try {
    GridPtr g = make_grid({256}, {16.0 * M_PI});
    double worst = 0.0;
    for (unsigned long seed = 1; seed <= 20; ++seed) {
      Field u = random_band_field(g, 1, 20, seed);
      Field p = ch_p_op(u, u);
      Field t = t_op(u, u);
      const double scale = std::max(1.0, max_abs(p));
      worst = std::max(worst, max_abs_diff(t, p) / scale);
    }
    line(3, "one-dimensional reduction to the Camassa-Holm operator", worst < 1e-10,
         fmt("max relative residual %.3g (tol 1e-10) over 20 seeds", worst), now_seconds() - t0);
  } catch (const std::exception& e) {
    line(3, "one-dimensional reduction to the Camassa-Holm operator", false, e.what(),
         now_seconds() - t0);
  }
}

void criterion_4() {
  const double t0 = now_seconds();
  try {
    GridPtr g = make_grid({64, 64}, {16.0 * M_PI, 16.0 * M_PI});
    double worst_swap = 0.0, worst_scale = 0.0;
    for (unsigned long seed = 1; seed <= 20; ++seed) {
      Field u = random_band_field(g, 2, 6, seed);
      Field v = random_band_field(g, 2, 6, seed + 1000);
      Field tuv = t_op(u, v);
      const double scale = std::max(1.0, max_abs(tuv));
      worst_swap = std::max(worst_swap, max_abs_diff(tuv, t_op(v, u)) / scale);
      Field su = u;
      su *= 3.5;
      Field left = t_op(su, v);
      Field right = tuv;
      right *= 3.5;
      worst_scale = std::max(worst_scale, max_abs_diff(left, right) / scale);
    }
    line(4, "symmetry and bilinearity of the T operator", worst_swap < 1e-14 && worst_scale < 1e-12,
         fmt("swap=%.3g (tol 1e-14), scaling=%.3g (tol 1e-12) over 20 pairs", worst_swap,
             worst_scale),
         now_seconds() - t0);
  } catch (const std::exception& e) {
    line(4, "symmetry and bilinearity of the T operator", false, e.what(), now_seconds() - t0);
  }
}

void criterion_5() {
  const double t0 = now_seconds();
  try {
    ExperimentConfig cfg;
    cfg.base_datum = "gaussian-vortexlike";  // nontrivial reference solve
    // Besov-normalized vortex has a tiny sup norm; raise the amplitude so the
    // temporal truncation error dominates rounding while staying CFL-safe.
    cfg.base_amplitude = 5000.0;
    ExperimentReport rep = exp_convergence(cfg);
    const double order = rep.results["temporal_order"].get<double>();
    const double drift = rep.results["energy_drift"].get<double>();
    line(5, "solver trust gate", pass_all(rep, {"temporal_order", "energy_drift"}),
         fmt("order=%.3g (min 3.7), drift=%.3g (tol 1e-6), spatial=%.3g", order, drift,
             rep.results["spatial_change"].get<double>()),
         now_seconds() - t0);
  } catch (const std::exception& e) {
    line(5, "solver trust gate", false, e.what(), now_seconds() - t0);
  }
}

void criterion_6() {
  const double t0 = now_seconds();
  try {
    ExperimentConfig cfg;  // zero base state, defaults
    ExperimentReport rep = exp_separation(cfg);
    const Verdict* s = find(rep, "initial_distance_slope");
    const double c0 = rep.results["c0_hat"].get<double>();
    const double c0r = rep.results["c0_hat_refined"].get<double>();
    line(6, "separation mechanism with zero base state",
         pass_all(rep, {"initial_distance_slope", "separation_lower_bound", "c0_dt_stability"}),
         fmt("|sigma0 slope+1|=%.3g (tol 0.05), c0=%.4g (>0), dt/2 drift=%.3g (tol 0.05)",
             s->observed, c0, std::abs(c0r / c0 - 1.0)),
         now_seconds() - t0);
  } catch (const std::exception& e) {
    line(6, "separation mechanism with zero base state", false, e.what(), now_seconds() - t0);
  }
}

void criterion_7() {
  const double t0 = now_seconds();
  try {
    ExperimentConfig cfg;
    cfg.base_datum = "gaussian-vortexlike";  // m sweep resolves to {0, L/16, L/8, L/4}
    ExperimentReport rep = exp_nowhere(cfg);
    const Verdict* a = find(rep, "tail_error_bound");
    const Verdict* b = find(rep, "overlap_decay");
    const Verdict* c = find(rep, "end_to_end_separation");
    line(7, "nowhere-uniformity mechanism around the vortex state",
         pass_all(rep, {"tail_error_bound", "overlap_decay", "end_to_end_separation"}),
         fmt("tail-C growth=%.3g (max 2), overlap decay=%.3g (min 3), budget=%.3g (min 0.5)",
             a->observed, b->observed, c->observed),
         now_seconds() - t0);
  } catch (const std::exception& e) {
    line(7, "nowhere-uniformity mechanism around the vortex state", false, e.what(),
         now_seconds() - t0);
  }
}

void criterion_8() {
  const double t0 = now_seconds();
  try {
    ExperimentConfig cfg;
    ExperimentReport rep = exp_inequalities(cfg, 20);
    const Verdict* s = find(rep, "refinement_stability");
    const Verdict* i = find(rep, "interpolation_exact");
    line(8, "inequality suite fitted constants",
         pass_all(rep, {"constants_finite", "refinement_stability", "interpolation_exact"}),
         fmt("refinement spread=%.3g (max 2), interp excess=%.3g (tol 1e-10)", s->observed,
             i->observed),
         now_seconds() - t0);
  } catch (const std::exception& e) {
    line(8, "inequality suite fitted constants", false, e.what(), now_seconds() - t0);
  }
}

}  // namespace

int main() {
  std::printf("acceptance sweep: defaults d=2, grid 4096x64, box 64x64, s=4.5, p=r=2\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}

#pragma once
// The experiment suite around the data-to-solution map S_t of the velocity
// form d_t u + (u.grad)u = T(u,u):
//   - localize: dyadic-block identity of the wave packets f_n.
//   - scaling:  Besov-norm slopes of the packet/bump pair (f_n, g_n).
//   - separation: with zero base datum, sigma_n(t) = ||S_t(f_n+g_n)-S_t(f_n)||
//     stays bounded below by c0*t on a fixed window while sigma_n(0) -> 0.
//   - nowhere: with a nonzero base datum u0, the three-part error decomposition
//     (frequency-tail error E_n, overlap error E_{n,m} via superposition
//     defects, end-to-end separation) behind nowhere-uniform continuity.
//   - inequalities: fitted constants for the bilinear-operator estimates, the
//     algebra property, Bernstein ratios, and the exact interpolation bound.
//   - converge: solver trust gate (temporal order, energy drift, spatial
//     refinement stability).
// Every experiment returns an ExperimentReport with config echo, CSV sweep
// tables headed `n,m,t,...`, fitted constants, and named verdicts.

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eplab/besov.hpp"
#include "eplab/config.hpp"
#include "eplab/ep_dynamics.hpp"
#include "eplab/perturbations.hpp"
#include "eplab/random_fields.hpp"
#include "eplab/report.hpp"
#include "eplab/thread_pool.hpp"

namespace eplab {

namespace detail {

inline constexpr double kWindowStart = 0.1;  // verdict window is [0.1, T0]
inline constexpr double kSpatialSup = 5e-3;  // sup norm of the refinement-probe datum

inline double window_end(const SolverConfig& sc) { return std::min(0.5, sc.t_max / 4.0); }

inline void warm_plans(const GridPtr& g) {
  CVec a(g->total), b(g->total);
  FftEngine::instance().forward(*g, a.data(), b.data());
}

inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw error("ls_slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw error("ls_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

inline ExperimentReport new_report(const std::string& name, const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = name;
  rep.config_echo = cfg.to_json();
  return rep;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct SolveOutcome {
  bool ok = false;
  Trajectory traj;
  std::string err;
};

inline SolveOutcome try_solve(const Field& u0, const SolverConfig& sc) {
  SolveOutcome out;
  try {
    out.traj = solve(u0, sc);
    out.ok = true;
  } catch (const error& e) {
    out.err = e.what();
  }
  return out;
}

// Records a solver abort as a failed verdict with diagnostics.
inline void record_abort(ExperimentReport& rep, const std::string& what) {
  rep.results["solver_error"] = what;
  rep.add_verdict("solver_completed", "all trajectories integrate over the requested snapshots",
                  0.0, 1.0, false);
}

inline std::string num_name(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// localize: Delta_n f_n = f_n and Delta_j f_n = 0 for j != n, for every
// translate in the m sweep.
// ---------------------------------------------------------------------------
inline ExperimentReport exp_localization(const ExperimentConfig& cfg) {
  detail::Stopwatch clock;
  cfg.validate();
  ExperimentReport rep = detail::new_report("localize", cfg);
  GridPtr g = cfg.grid();
  ChiPhi cp = build_chi_phi(g);
  BesovIndex idx = cfg.index();

  CsvTable table;
  table.name = "localization";
  table.columns = {"n", "m", "t", "diag_residual"};
  for (int j = -1; j <= cp.j_max(); ++j)
    table.columns.push_back("off_j" + std::to_string(j));

  double max_diag = 0.0, max_off = 0.0;
  for (int n : cfg.n_range)
    for (double m : cfg.m_list) {
      PerturbationParams params{n, cfg.n_damp, cfg.s, m};
      Field f = make_translated_pair(params, g).first;
      const double fn = besov_norm(f, idx, cp);
      std::vector<double> row{static_cast<double>(n), m, 0.0, 0.0};
      const double diag = besov_norm(dyadic_block(f, n, cp) - f, idx, cp) / fn;
      row[3] = diag;
      max_diag = std::max(max_diag, diag);
      for (int j = -1; j <= cp.j_max(); ++j) {
        if (j == n) {
          row.push_back(0.0);
          continue;
        }
        const double off = besov_norm(dyadic_block(f, j, cp), idx, cp) / fn;
        row.push_back(off);
        max_off = std::max(max_off, off);
      }
      table.add_row(std::move(row));
    }
  rep.tables.push_back(std::move(table));
  rep.results["max_diag_residual"] = max_diag;
  rep.results["max_offdiag_residual"] = max_off;
  rep.add_verdict("block_identity_diagonal", "Delta_n f_n equals f_n in the Besov norm", max_diag,
                  cfg.tol("diag_tol"), max_diag < cfg.tol("diag_tol"));
  rep.add_verdict("block_identity_offdiagonal", "Delta_j f_n vanishes for j != n", max_off,
                  cfg.tol("offdiag_tol"), max_off < cfg.tol("offdiag_tol"));
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// scaling: log2-slopes of ||f_n||_{B^{s+k}} (slope k) and ||g_n||_{B^{s+k}}
// (slope -1), both independent of the translation m.
// ---------------------------------------------------------------------------
inline ExperimentReport exp_norm_scaling(const ExperimentConfig& cfg,
                                         std::vector<double> k_list = {-1.0, 0.0, 1.0}) {
  detail::Stopwatch clock;
  cfg.validate();
  if (k_list.empty()) throw error("exp_norm_scaling: k_list must be nonempty");
  if (cfg.n_range.size() < 2) throw error("exp_norm_scaling: need at least two n values");
  ExperimentReport rep = detail::new_report("scaling", cfg);
  GridPtr g = cfg.grid();
  ChiPhi cp = build_chi_phi(g);

  CsvTable table;
  table.name = "norm_scaling";
  table.columns = {"n", "m", "t"};
  for (double k : k_list) {
    table.columns.push_back("f_norm_k" + detail::num_name(k));
    table.columns.push_back("g_norm_k" + detail::num_name(k));
  }

  // norms[ki][ni][mi] -> {f, g}
  const std::size_t nk = k_list.size(), nn = cfg.n_range.size(), nm = cfg.m_list.size();
  std::vector<std::vector<std::vector<std::pair<double, double>>>> norms(
      nk, std::vector<std::vector<std::pair<double, double>>>(
              nn, std::vector<std::pair<double, double>>(nm)));
  for (std::size_t ni = 0; ni < nn; ++ni)
    for (std::size_t mi = 0; mi < nm; ++mi) {
      PerturbationParams params{cfg.n_range[ni], cfg.n_damp, cfg.s, cfg.m_list[mi]};
      auto [f, gg] = make_translated_pair(params, g);
      std::vector<double> row{static_cast<double>(cfg.n_range[ni]), cfg.m_list[mi], 0.0};
      for (std::size_t ki = 0; ki < nk; ++ki) {
        BesovIndex shifted(cfg.s + k_list[ki], cfg.p, cfg.r);
        norms[ki][ni][mi] = {besov_norm(f, shifted, cp), besov_norm(gg, shifted, cp)};
        row.push_back(norms[ki][ni][mi].first);
        row.push_back(norms[ki][ni][mi].second);
      }
      table.add_row(std::move(row));
    }
  rep.tables.push_back(std::move(table));

  std::vector<double> xs(nn);
  for (std::size_t ni = 0; ni < nn; ++ni) xs[ni] = cfg.n_range[ni];
  double worst_f = 0.0, worst_g = 0.0, worst_m = 0.0;
  ordered_json fits;
  for (std::size_t ki = 0; ki < nk; ++ki) {
    for (std::size_t mi = 0; mi < nm; ++mi) {
      std::vector<double> yf(nn), yg(nn);
      for (std::size_t ni = 0; ni < nn; ++ni) {
        yf[ni] = std::log2(norms[ki][ni][mi].first);
        yg[ni] = std::log2(norms[ki][ni][mi].second);
      }
      const double sf = detail::ls_slope(xs, yf);
      const double sg = detail::ls_slope(xs, yg);
      if (mi == 0) {
        fits["f_slope_k" + detail::num_name(k_list[ki])] = sf;
        fits["g_slope_k" + detail::num_name(k_list[ki])] = sg;
      }
      worst_f = std::max(worst_f, std::abs(sf - k_list[ki]));
      worst_g = std::max(worst_g, std::abs(sg + 1.0));
    }
    for (std::size_t ni = 0; ni < nn; ++ni)
      for (std::size_t mi = 0; mi < nm; ++mi) {
        worst_m = std::max(worst_m,
                           std::abs(norms[ki][ni][mi].first / norms[ki][ni][0].first - 1.0));
        worst_m = std::max(worst_m,
                           std::abs(norms[ki][ni][mi].second / norms[ki][ni][0].second - 1.0));
      }
  }
  rep.results["fits"] = fits;
  rep.add_verdict("f_slope", "log2 ||f_n||_{B^{s+k}} grows with slope k in n", worst_f,
                  cfg.tol("slope_tol_f"), worst_f < cfg.tol("slope_tol_f"));
  rep.add_verdict("g_slope", "log2 ||g_n||_{B^{s+k}} decays with slope -1 in n", worst_g,
                  cfg.tol("slope_tol_g"), worst_g < cfg.tol("slope_tol_g"));
  rep.add_verdict("m_independence", "norms are invariant under the translation sweep", worst_m,
                  cfg.tol("m_indep_tol"), worst_m < cfg.tol("m_indep_tol"));
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// separation: zero base datum. For each n integrate f_n+g_n and f_n, record
// sigma_n(t) and fit the lower-bound constant c0 on the window [0.1, T0],
// taking the minimum over the two largest n (the finite-n liminf proxy).
// ---------------------------------------------------------------------------
inline ExperimentReport exp_separation(const ExperimentConfig& cfg) {
  detail::Stopwatch clock;
  cfg.validate();
  if (parse_base_datum(cfg.base_datum) != BaseDatum::zero)
    throw error("exp_separation: base datum preset must be zero");
  if (cfg.n_range.size() < 2) throw error("exp_separation: need at least two n values");
  ExperimentReport rep = detail::new_report("separation", cfg);
  GridPtr g = cfg.grid();
  ChiPhi cp = build_chi_phi(g);
  BesovIndex idx = cfg.index();
  detail::warm_plans(g);

  std::vector<int> ns = cfg.n_range;
  std::sort(ns.begin(), ns.end());
  const double m = cfg.m_list.empty() ? 0.0 : cfg.m_list.front();
  const double t1 = detail::kWindowStart, T0 = detail::window_end(cfg.solver);
  bool window_hit = false;
  for (double t : cfg.solver.snapshot_times)
    window_hit = window_hit || (t >= t1 - 1e-12 && t <= T0 + 1e-12);
  if (!window_hit)
    throw error("exp_separation: no snapshot time falls in the verdict window [0.1, T0]");

  struct CaseOut {
    std::vector<double> sigma;  // per snapshot (incl. t=0)
    double g_norm = 0.0;
    bool ok = false;
    std::string err;
  };
  auto run_case = [&](int n, const SolverConfig& sc, CaseOut& out) {
    PerturbationParams params{n, cfg.n_damp, cfg.s, m};
    auto [f, gg] = make_translated_pair(params, g);
    out.g_norm = besov_norm(gg, idx, cp);
    detail::SolveOutcome a = detail::try_solve(f + gg, sc);
    detail::SolveOutcome b = detail::try_solve(f, sc);
    if (!a.ok || !b.ok) {
      out.err = !a.ok ? a.err : b.err;
      return;
    }
    out.sigma.resize(a.traj.times.size());
    for (std::size_t k = 0; k < a.traj.times.size(); ++k)
      out.sigma[k] = besov_norm(a.traj.states[k] - b.traj.states[k], idx, cp);
    out.ok = true;
  };

  std::vector<CaseOut> cases(ns.size());
  run_parallel(static_cast<int>(ns.size()), cfg.threads,
               [&](int i) { run_case(ns[i], cfg.solver, cases[i]); });
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (!cases[i].ok) {
      detail::record_abort(rep, cases[i].err);
      rep.runtime_seconds = clock.seconds();
      return rep;
    }

  // Snapshot grid actually recorded (t=0 plus sorted unique snapshot times).
  std::vector<double> times{0.0};
  {
    std::vector<double> snaps = cfg.solver.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    for (double t : snaps)
      if (t > 0.0) times.push_back(t);
  }

  CsvTable table;
  table.name = "separation";
  table.columns = {"n", "m", "t", "sigma", "g_norm"};
  for (std::size_t i = 0; i < ns.size(); ++i)
    for (std::size_t k = 0; k < times.size(); ++k)
      table.add_row({static_cast<double>(ns[i]), m, times[k], cases[i].sigma[k],
                     cases[i].g_norm});
  rep.tables.push_back(std::move(table));

  // sigma(0) = ||g_n|| identically (disjoint spectral supports).
  double worst_sigma0 = 0.0;
  for (const auto& c : cases)
    worst_sigma0 = std::max(worst_sigma0, std::abs(c.sigma[0] / c.g_norm - 1.0));

  // Initial distances decay with slope -1.
  std::vector<double> xs(ns.size()), ys(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    xs[i] = ns[i];
    ys[i] = std::log2(cases[i].sigma[0]);
  }
  const double slope0 = detail::ls_slope(xs, ys);

  // c0 = min over the two largest n and window times of sigma/t.
  auto fit_c0 = [&](const std::vector<CaseOut>& cs) {
    double c0 = std::numeric_limits<double>::infinity();
    for (std::size_t i = ns.size() - 2; i < ns.size(); ++i)
      for (std::size_t k = 1; k < times.size(); ++k)
        if (times[k] >= t1 - 1e-12 && times[k] <= T0 + 1e-12)
          c0 = std::min(c0, cs[i].sigma[k] / times[k]);
    return c0;
  };
  const double c0_hat = fit_c0(cases);

  // Non-vanishing in n: on the window the largest-n sigma stays comparable to
  // the runner-up's.
  double n_stab = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < times.size(); ++k)
    if (times[k] >= t1 - 1e-12 && times[k] <= T0 + 1e-12)
      n_stab = std::min(n_stab, cases[ns.size() - 1].sigma[k] / cases[ns.size() - 2].sigma[k]);

  // Discretization robustness: refit c0 with dt halved on the two largest n.
  SolverConfig refined = cfg.solver;
  refined.dt *= 0.5;
  std::vector<CaseOut> rcases(2);
  run_parallel(2, cfg.threads,
               [&](int i) { run_case(ns[ns.size() - 2 + i], refined, rcases[i]); });
  double c0_ref = std::numeric_limits<double>::quiet_NaN();
  bool refine_ok = rcases[0].ok && rcases[1].ok;
  if (refine_ok) {
    std::vector<CaseOut> padded(ns.size());
    padded[ns.size() - 2] = rcases[0];
    padded[ns.size() - 1] = rcases[1];
    c0_ref = fit_c0(padded);
  } else {
    detail::record_abort(rep, rcases[0].ok ? rcases[1].err : rcases[0].err);
  }

  rep.results["c0_hat"] = c0_hat;
  rep.results["c0_hat_refined"] = c0_ref;
  rep.results["sigma0_slope"] = slope0;
  rep.results["window"] = {t1, T0};
  rep.add_verdict("sigma0_identity", "sigma(0) equals ||g_n|| in the Besov norm", worst_sigma0,
                  cfg.tol("sigma0_tol"), worst_sigma0 < cfg.tol("sigma0_tol"));
  rep.add_verdict("initial_distance_slope", "log2 sigma(0) decays with slope -1 in n",
                  std::abs(slope0 + 1.0), cfg.tol("sep_slope_tol"),
                  std::abs(slope0 + 1.0) < cfg.tol("sep_slope_tol"));
  rep.add_verdict("separation_lower_bound",
                  "min over the two largest n and window t of sigma/t stays positive", c0_hat,
                  cfg.tol("c0_min"), c0_hat > cfg.tol("c0_min"));
  rep.add_verdict("n_stability", "sigma on the window does not vanish as n grows", n_stab,
                  cfg.tol("n_stability_min"), n_stab >= cfg.tol("n_stability_min"));
  if (refine_ok) {
    const double drift = std::abs(c0_ref / c0_hat - 1.0);
    rep.add_verdict("c0_dt_stability", "fitted c0 is stable under dt -> dt/2", drift,
                    cfg.tol("c0_refine_tol"), drift < cfg.tol("c0_refine_tol"));
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// nowhere: nonzero base datum u0. Per (n, m):
//   A = S_t(u0+f+g)    B = S_t(u0+f)     C = S_t(S_n u0 + f + g)
//   D = S_t(S_n u0+f)  E = S_t(S_n u0)   F = S_t(f+g)   G = S_t(f)
// tail error      E_n(t)    = (A-C) - (B-D), bounded by C * ||(I-S_n)u0||;
// overlap error   E_{n,m}(t) = (C-E-F) - (D-E-G), decaying in the m sweep;
// separation      sigma(t)  = ||A-B||, bounded below by a fraction of c0*t,
// with c0 refitted from the base-free pairs (F, G) inside the same run.
// ---------------------------------------------------------------------------
namespace detail {

struct NowhereCase {
  std::vector<double> sigma_base, err_tail, err_overlap, sigma_free;
  double w0 = 0.0;
  bool ok = false;
  std::string err;
};

// Shared core so the zero-datum reduction to the separation experiment can be
// exercised directly in tests.
inline NowhereCase run_nowhere_case(const Field& u0, const Field& sn_u0, const Trajectory& traj_e,
                                    const PerturbationParams& params, const GridPtr& g,
                                    const ChiPhi& cp, const BesovIndex& idx,
                                    const SolverConfig& sc) {
  NowhereCase out;
  auto [f, gg] = make_translated_pair(params, g);
  SolveOutcome a = try_solve(u0 + f + gg, sc);
  SolveOutcome b = try_solve(u0 + f, sc);
  SolveOutcome c = try_solve(sn_u0 + f + gg, sc);
  SolveOutcome d = try_solve(sn_u0 + f, sc);
  SolveOutcome ff = try_solve(f + gg, sc);
  SolveOutcome gg_run = try_solve(f, sc);
  for (const SolveOutcome* so : {&a, &b, &c, &d, &ff, &gg_run})
    if (!so->ok) {
      out.err = so->err;
      return out;
    }
  const std::size_t nt = a.traj.times.size();
  if (traj_e.times.size() != nt) {
    out.err = "nowhere: trajectory snapshot grids disagree";
    return out;
  }
  out.w0 = besov_norm(c.traj.states[0] - traj_e.states[0] - ff.traj.states[0], idx, cp);
  for (std::size_t k = 0; k < nt; ++k) {
    out.sigma_base.push_back(besov_norm(a.traj.states[k] - b.traj.states[k], idx, cp));
    out.err_tail.push_back(besov_norm((a.traj.states[k] - c.traj.states[k]) -
                                          (b.traj.states[k] - d.traj.states[k]),
                                      idx, cp));
    Field w_g = c.traj.states[k] - traj_e.states[k] - ff.traj.states[k];
    Field w_f = d.traj.states[k] - traj_e.states[k] - gg_run.traj.states[k];
    out.err_overlap.push_back(besov_norm(w_g - w_f, idx, cp));
    out.sigma_free.push_back(besov_norm(ff.traj.states[k] - gg_run.traj.states[k], idx, cp));
  }
  out.ok = true;
  return out;
}

}  // namespace detail

inline ExperimentReport exp_nowhere(const ExperimentConfig& cfg_in) {
  detail::Stopwatch clock;
  ExperimentConfig cfg = cfg_in;
  // Default m sweep: quarters of the box, {0, L/16, L/8, L/4}.
  if (!cfg.m_list_explicit) {
    const double L = cfg.box_lengths.front();
    cfg.m_list = {0.0, L / 16.0, L / 8.0, L / 4.0};
  }
  std::sort(cfg.m_list.begin(), cfg.m_list.end());
  cfg.validate();
  if (parse_base_datum(cfg.base_datum) == BaseDatum::zero)
    throw error("exp_nowhere: base datum preset must be nonzero");
  if (cfg.n_range.size() < 2) throw error("exp_nowhere: need at least two n values");
  ExperimentReport rep = detail::new_report("nowhere", cfg);
  GridPtr g = cfg.grid();
  ChiPhi cp = build_chi_phi(g);
  BesovIndex idx = cfg.index();
  detail::warm_plans(g);

  std::vector<int> ns = cfg.n_range;
  std::sort(ns.begin(), ns.end());
  const double t1 = detail::kWindowStart, T0 = detail::window_end(cfg.solver);

  Field u0 = make_base_datum(parse_base_datum(cfg.base_datum), cfg.base_amplitude, g, cp, idx,
                             cfg.seed);

  // Per-n shared pieces: S_n u0, its trajectory E, and the tail norm.
  std::vector<Field> sn_u0;
  std::vector<double> tail_norm(ns.size());
  std::vector<Trajectory> traj_e(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sn_u0.push_back(low_freq_truncate(u0, ns[i], cp));
    tail_norm[i] = besov_norm(u0 - sn_u0[i], idx, cp);
  }
  {
    std::vector<detail::SolveOutcome> eo(ns.size());
    run_parallel(static_cast<int>(ns.size()), cfg.threads,
                 [&](int i) { eo[i] = detail::try_solve(sn_u0[i], cfg.solver); });
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (!eo[i].ok) {
        detail::record_abort(rep, eo[i].err);
        rep.runtime_seconds = clock.seconds();
        return rep;
      }
      traj_e[i] = std::move(eo[i].traj);
    }
  }

  const std::size_t nn = ns.size(), nm = cfg.m_list.size();
  std::vector<detail::NowhereCase> cases(nn * nm);
  run_parallel(static_cast<int>(nn * nm), cfg.threads, [&](int ci) {
    const std::size_t i = ci / nm, mi = ci % nm;
    PerturbationParams params{ns[i], cfg.n_damp, cfg.s, cfg.m_list[mi]};
    cases[ci] =
        detail::run_nowhere_case(u0, sn_u0[i], traj_e[i], params, g, cp, idx, cfg.solver);
  });
  for (const auto& c : cases)
    if (!c.ok) {
      detail::record_abort(rep, c.err);
      rep.runtime_seconds = clock.seconds();
      return rep;
    }

  std::vector<double> times = traj_e.front().times;

  CsvTable table;
  table.name = "nowhere";
  table.columns = {"n", "m",        "t",           "sigma_base", "err_tail",
                   "err_overlap",   "sigma_free",  "tail_norm",  "w0_norm"};
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t mi = 0; mi < nm; ++mi) {
      const auto& c = cases[i * nm + mi];
      for (std::size_t k = 0; k < times.size(); ++k)
        table.add_row({static_cast<double>(ns[i]), cfg.m_list[mi], times[k], c.sigma_base[k],
                       c.err_tail[k], c.err_overlap[k], c.sigma_free[k], tail_norm[i], c.w0});
    }
  rep.tables.push_back(std::move(table));

  // Fitted tail constants C_n = sup_{m,t} ||E_n|| / ||(I-S_n)u0||. The bound
  // being certified is one-sided: a single constant must dominate every n, so
  // the sequence may shrink freely (E_n is second order, carrying a ||g_n||
  // factor) and only upward drift along n counts against it.
  std::vector<double> c_tail(nn, 0.0);
  for (std::size_t i = 0; i < nn; ++i) {
    double sup = 0.0;
    for (std::size_t mi = 0; mi < nm; ++mi)
      for (double v : cases[i * nm + mi].err_tail) sup = std::max(sup, v);
    c_tail[i] = sup / std::max(tail_norm[i], 1e-300);
  }
  const double c_spread = *std::max_element(c_tail.begin(), c_tail.end()) /
                          std::max(*std::min_element(c_tail.begin(), c_tail.end()), 1e-300);
  double c_growth = 0.0;
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = i + 1; j < nn; ++j)
      c_growth = std::max(c_growth, c_tail[j] / std::max(c_tail[i], 1e-300));

  // Overlap envelope S_i(m) = sup_t ||E_{n,m}|| and its decay along the sweep.
  std::vector<std::vector<double>> envelope(nn, std::vector<double>(nm, 0.0));
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t mi = 0; mi < nm; ++mi)
      for (double v : cases[i * nm + mi].err_overlap)
        envelope[i][mi] = std::max(envelope[i][mi], v);
  double decay = std::numeric_limits<double>::infinity();
  double monotone_worst = 0.0;
  for (std::size_t i = 0; i < nn; ++i) {
    decay = std::min(decay, envelope[i].front() / std::max(envelope[i].back(), 1e-300));
    for (std::size_t mi = 1; mi < nm; ++mi)
      monotone_worst =
          std::max(monotone_worst, envelope[i][mi] / std::max(envelope[i][mi - 1], 1e-300));
  }

  // c0 refit from the base-free pairs, then the end-to-end budget check at the
  // largest translation.
  double c0_hat = std::numeric_limits<double>::infinity();
  for (std::size_t i = nn - 2; i < nn; ++i)
    for (std::size_t mi = 0; mi < nm; ++mi)
      for (std::size_t k = 1; k < times.size(); ++k)
        if (times[k] >= t1 - 1e-12 && times[k] <= T0 + 1e-12)
          c0_hat = std::min(c0_hat, cases[i * nm + mi].sigma_free[k] / times[k]);
  double budget = std::numeric_limits<double>::infinity();
  for (std::size_t i = nn - 2; i < nn; ++i)
    for (std::size_t k = 1; k < times.size(); ++k)
      if (times[k] >= t1 - 1e-12 && times[k] <= T0 + 1e-12)
        budget = std::min(budget,
                          cases[i * nm + (nm - 1)].sigma_base[k] / (c0_hat * times[k]));

  double w0_max = 0.0;
  for (const auto& c : cases) w0_max = std::max(w0_max, c.w0);

  ordered_json jt = ordered_json::object();
  for (std::size_t i = 0; i < nn; ++i) {
    jt["n" + std::to_string(ns[i])] = {{"tail_norm", tail_norm[i]},
                                       {"C_tail", c_tail[i]},
                                       {"overlap_envelope", envelope[i]}};
  }
  rep.results["per_n"] = jt;
  rep.results["c_tail_spread"] = c_spread;
  rep.results["c_tail_growth"] = c_growth;
  rep.results["c0_hat"] = c0_hat;
  rep.results["window"] = {t1, T0};

  if (nm < 2)
    rep.add_verdict("m_sweep_range", "the translation sweep has at least two points",
                    static_cast<double>(nm), 2.0, false);
  rep.add_verdict("tail_error_bound",
                  "sup_{m,t} ||E_n|| / ||(I-S_n)u0|| admits one n-uniform constant (no upward "
                  "drift along n beyond the stability factor)",
                  c_growth, cfg.tol("tail_c_spread"), c_growth <= cfg.tol("tail_c_spread"));
  rep.add_verdict("overlap_decay", "sup_t ||E_{n,m}|| falls along the m sweep end to end", decay,
                  cfg.tol("overlap_decay_min"), decay >= cfg.tol("overlap_decay_min"));
  rep.add_verdict("overlap_envelope_monotone",
                  "the overlap envelope is nonincreasing along the m sweep (with slack)",
                  monotone_worst, cfg.tol("overlap_monotone_slack"),
                  monotone_worst <= cfg.tol("overlap_monotone_slack"));
  rep.add_verdict("w0_identity", "the superposition defect vanishes at t=0", w0_max,
                  cfg.tol("w0_tol"), w0_max < cfg.tol("w0_tol"));
  rep.add_verdict("end_to_end_separation",
                  "sigma(t) at the largest translation stays above a fraction of c0*t", budget,
                  cfg.tol("sigma_budget_factor"), budget >= cfg.tol("sigma_budget_factor"));
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// inequalities: fitted constants on seeded random smooth fields, coarse grid
// versus one refinement. The refined level re-evaluates the same fields on a
// doubled lattice, so any spread in the fitted constants measures pure
// discretization effects.
// ---------------------------------------------------------------------------
namespace detail {

inline std::vector<std::vector<int>> multi_indices(int d, int max_order) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(d, 0);
  // Enumerate exponent vectors with |a| <= max_order in lexicographic order.
  for (;;) {
    int total = 0;
    for (int v : cur) total += v;
    if (total <= max_order) out.push_back(cur);
    int a = d - 1;
    while (a >= 0 && cur[a] == max_order) cur[a--] = 0;
    if (a < 0) return out;
    ++cur[a];
  }
}

inline Field multi_deriv(const Field& f, const std::vector<int>& alpha) {
  return map_spectrum(f, true, [&](const double* k, cplx& c) {
    for (std::size_t a = 0; a < alpha.size(); ++a)
      for (int q = 0; q < alpha[a]; ++q) c *= cplx(0.0, k[a]);
  });
}

inline RVec magnitude_samples(const Field& f) {
  auto v = inverse(f);
  RVec out(f.grid()->total, 0.0);
  for (int c = 0; c < f.ncomp(); ++c)
    for (long t = 0; t < f.grid()->total; ++t) out[t] += v[c][t] * v[c][t];
  for (long t = 0; t < f.grid()->total; ++t) out[t] = std::sqrt(out[t]);
  return out;
}

inline double product_lp(const RVec& a, const RVec& b, const Grid& g, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (long t = 0; t < g.total; ++t) m = std::max(m, a[t] * b[t]);
    return m;
  }
  double s = 0.0;
  for (long t = 0; t < g.total; ++t) s += std::pow(a[t] * b[t], p);
  return std::pow(g.cell_volume * s, 1.0 / p);
}

// W_{m,p}(f,g) = sum over |a|,|b| <= m of || |d^a f| |d^b g| ||_p.
inline double sobolev_product_sum(const Field& f, const Field& g, int m, double p) {
  const Grid& gr = *f.grid();
  auto idxs = multi_indices(gr.dim, m);
  std::vector<RVec> fa, gb;
  for (const auto& a : idxs) {
    fa.push_back(magnitude_samples(multi_deriv(f, a)));
    gb.push_back(magnitude_samples(multi_deriv(g, a)));
  }
  double sum = 0.0;
  for (const auto& x : fa)
    for (const auto& y : gb) sum += product_lp(x, y, gr, p);
  return sum;
}

inline Field pointwise_product(const Field& a, const Field& b) {
  if (a.ncomp() != 1 || b.ncomp() != 1) throw error("pointwise_product: scalar fields only");
  auto sa = inverse(a), sb = inverse(b);
  RVec prod(a.grid()->total);
  for (long t = 0; t < a.grid()->total; ++t) prod[t] = sa[0][t] * sb[0][t];
  return transform(a.grid(), prod);
}

struct IneqRatios {
  // Order matches ratio_names().
  double t_besov, t_lp_pair, t_lp_w1, t_grad_pair, t_grad_w2;
  double algebra, algebra_shift, bern_hi, bern_lo, interp;
};

inline const std::vector<std::string>& ratio_names() {
  static const std::vector<std::string> names = {
      "t_besov",  "t_lp_pair",     "t_lp_w1", "t_grad_pair", "t_grad_w2",
      "algebra",  "algebra_shift", "bern_hi", "bern_lo",     "interp"};
  return names;
}

// One case holds two vector fields for the transport-operator ratios and two
// scalars for the product-algebra ratios.
struct IneqCase {
  Field f, gg, a, b;
};

// Inputs confined to half the dealias cutoff per axis: every quadratic product
// then fits under the cutoff of the coarse lattice, so the refined level sees
// the identical functions and the fitted constants compare discretizations
// of the same continuum quantities.
inline IneqCase make_ineq_case(const GridPtr& g, std::uint64_t seed) {
  std::vector<double> caps(g->dim);
  for (int a = 0; a < g->dim; ++a) caps[a] = g->nyquist[a] / 3.0;
  return {random_axis_band_field(g, g->dim, caps, seed, 3.0),
          random_axis_band_field(g, g->dim, caps, seed + 0x9e3779b97f4a7c15ULL, 3.0),
          random_axis_band_field(g, 1, caps, seed + 0x6a09e667f3bcc908ULL, 3.0),
          random_axis_band_field(g, 1, caps, seed + 0xbb67ae8584caa73bULL, 3.0)};
}

inline IneqCase regrid(const IneqCase& c, const GridPtr& fine) {
  return {regrid(c.f, fine), regrid(c.gg, fine), regrid(c.a, fine), regrid(c.b, fine)};
}

inline IneqRatios inequality_case(const ChiPhi& cp, const BesovIndex& idx, const IneqCase& cs) {
  const double p = idx.p;
  const double inf = std::numeric_limits<double>::infinity();
  const Field& f = cs.f;
  const Field& gg = cs.gg;
  Field tfg = t_op(f, gg);

  IneqRatios r{};
  const double fb = besov_norm(f, idx, cp), gb = besov_norm(gg, idx, cp);
  r.t_besov = besov_norm(tfg, idx, cp) / (fb * gb);

  JacobianField jf = gradient(f), jg = gradient(gg), jt = gradient(tfg);
  const double grad_f_p = lp_norm(jf, p);
  const double g_pair_inf = lp_norm(gg, inf) + lp_norm(jg, inf);
  r.t_lp_pair = lp_norm(tfg, p) / (grad_f_p * g_pair_inf);
  r.t_lp_w1 = lp_norm(tfg, p) / sobolev_product_sum(f, gg, 1, p);
  r.t_grad_pair = lp_norm(jt, p) / (grad_f_p * g_pair_inf);
  r.t_grad_w2 = lp_norm(jt, p) / sobolev_product_sum(f, gg, 2, p);

  const Field& a = cs.a;
  const Field& b = cs.b;
  Field ab = pointwise_product(a, b);
  const double a_inf = lp_norm(a, inf), b_inf = lp_norm(b, inf);
  r.algebra = besov_norm(ab, idx, cp) /
              (besov_norm(a, idx, cp) * b_inf + besov_norm(b, idx, cp) * a_inf);
  BesovIndex lower(idx.s - 2.0, idx.p, idx.r), mid(idx.s - 1.0, idx.p, idx.r);
  r.algebra_shift =
      besov_norm(ab, lower, cp) / (besov_norm(a, lower, cp) * besov_norm(b, mid, cp));

  // Bernstein on annulus blocks: || grad Delta_j f ||_p / (2^j ||Delta_j f||_p).
  r.bern_hi = 0.0;
  r.bern_lo = inf;
  const double f_p = lp_norm(f, p);
  for (int j = 0; j <= cp.j_max(); ++j) {
    Field blk = dyadic_block(f, j, cp);
    const double bn = lp_norm(blk, p);
    if (bn <= 1e-12 * f_p) continue;
    const double ratio = lp_norm(gradient(blk), p) / (std::ldexp(1.0, j) * bn);
    r.bern_hi = std::max(r.bern_hi, ratio);
    r.bern_lo = std::min(r.bern_lo, ratio);
  }

  BesovIndex up(idx.s + 1.0, idx.p, idx.r);
  r.interp = fb / std::sqrt(besov_norm(f, mid, cp) * besov_norm(f, up, cp));
  return r;
}

}  // namespace detail

inline ExperimentReport exp_inequalities(const ExperimentConfig& cfg, int case_count = 20,
                                         std::uint64_t seed_override = 0) {
  detail::Stopwatch clock;
  cfg.validate();
  if (case_count < 10) throw error("exp_inequalities: case_count must be at least 10");
  ExperimentReport rep = detail::new_report("inequalities", cfg);
  const std::uint64_t seed = seed_override != 0 ? seed_override : cfg.seed + 1;

  GridPtr coarse = cfg.grid();
  std::vector<int> fine_pts = cfg.grid_points;
  for (int& v : fine_pts) v *= 2;
  GridPtr fine = make_grid(fine_pts, cfg.box_lengths);
  ChiPhi cp_c = build_chi_phi(coarse), cp_f = build_chi_phi(fine);
  BesovIndex idx = cfg.index();
  detail::warm_plans(coarse);
  detail::warm_plans(fine);

  const auto& names = detail::ratio_names();
  std::vector<detail::IneqRatios> rc(case_count), rf(case_count);
  run_parallel(case_count, cfg.threads, [&](int i) {
    detail::IneqCase cs = detail::make_ineq_case(coarse, seed + 17 * i);
    rc[i] = detail::inequality_case(cp_c, idx, cs);
    rf[i] = detail::inequality_case(cp_f, idx, detail::regrid(cs, fine));
  });

  CsvTable table;
  table.name = "inequalities";
  table.columns = {"n", "m", "t"};
  for (const auto& nm : names) {
    table.columns.push_back(nm + "_coarse");
    table.columns.push_back(nm + "_fine");
  }
  auto as_array = [](const detail::IneqRatios& r) {
    return std::vector<double>{r.t_besov,  r.t_lp_pair,     r.t_lp_w1, r.t_grad_pair,
                               r.t_grad_w2, r.algebra,      r.algebra_shift,
                               r.bern_hi,  r.bern_lo,       r.interp};
  };
  for (int i = 0; i < case_count; ++i) {
    std::vector<double> row{static_cast<double>(i), 0.0, 0.0};
    auto vc = as_array(rc[i]), vf = as_array(rf[i]);
    for (std::size_t q = 0; q < names.size(); ++q) {
      row.push_back(vc[q]);
      row.push_back(vf[q]);
    }
    table.add_row(std::move(row));
  }
  rep.tables.push_back(std::move(table));

  // Fitted constants: max over cases, except the lower Bernstein constant
  // which is a min.
  auto fit = [&](const std::vector<detail::IneqRatios>& rs, std::size_t q) {
    double best = (names[q] == "bern_lo") ? std::numeric_limits<double>::infinity() : 0.0;
    for (const auto& r : rs) {
      const double v = as_array(r)[q];
      best = (names[q] == "bern_lo") ? std::min(best, v) : std::max(best, v);
    }
    return best;
  };
  ordered_json fits;
  bool finite = true;
  double worst_spread = 1.0, interp_excess = 0.0;
  for (std::size_t q = 0; q < names.size(); ++q) {
    const double cc = fit(rc, q), cf = fit(rf, q);
    fits[names[q]] = {{"coarse", cc}, {"fine", cf}};
    finite = finite && std::isfinite(cc) && std::isfinite(cf) && cc > 0.0 && cf > 0.0;
    if (names[q] == "interp") {
      interp_excess = std::max(cc, cf) - 1.0;
      continue;  // constant-1 bound has its own verdict
    }
    worst_spread = std::max(worst_spread, std::max(cf / cc, cc / cf));
  }
  rep.results["fitted_constants"] = fits;
  rep.add_verdict("constants_finite", "every fitted inequality constant is finite and positive",
                  finite ? 1.0 : 0.0, 1.0, finite);
  rep.add_verdict("refinement_stability",
                  "fitted constants move by at most the allowed factor under refinement",
                  worst_spread, cfg.tol("refine_spread"), worst_spread <= cfg.tol("refine_spread"));
  rep.add_verdict("interpolation_exact", "the interpolation inequality holds with constant 1",
                  interp_excess, cfg.tol("interp_tol"), interp_excess <= cfg.tol("interp_tol"));
  rep.runtime_seconds = clock.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// converge: solver trust gate. Temporal Richardson order on the configured
// preset, energy drift over [0, 1], and solution stability under one spatial
// refinement for a band-limited datum.
// ---------------------------------------------------------------------------
inline ExperimentReport exp_convergence(const ExperimentConfig& cfg) {
  detail::Stopwatch clock;
  cfg.validate();
  ExperimentReport rep = detail::new_report("converge", cfg);
  GridPtr g = cfg.grid();
  ChiPhi cp = build_chi_phi(g);
  BesovIndex idx = cfg.index();
  detail::warm_plans(g);

  Field u0 = make_base_datum(parse_base_datum(cfg.base_datum), cfg.base_amplitude, g, cp, idx,
                             cfg.seed);
  const double T = std::min(0.4, cfg.solver.t_max);

  auto at_T = [&](const Field& datum, double dt) {
    SolverConfig sc = cfg.solver;
    sc.dt = dt;
    sc.snapshot_times = {T};
    return solve(datum, sc).states.back();
  };

  double e1 = 0.0, e2 = 0.0, order = 99.0;
  {
    Field a0 = at_T(u0, cfg.solver.dt);
    Field a1 = at_T(u0, cfg.solver.dt / 2.0);
    Field a2 = at_T(u0, cfg.solver.dt / 4.0);
    e1 = lp_norm(a0 - a1, 2.0);
    e2 = lp_norm(a1 - a2, 2.0);
    if (e2 > 0.0) order = std::log2(e1 / e2);
  }

  double drift = 0.0;
  {
    SolverConfig sc = cfg.solver;
    sc.snapshot_times.clear();
    for (int k = 1; k <= 10; ++k)
      if (0.1 * k <= sc.t_max + 1e-12) sc.snapshot_times.push_back(0.1 * k);
    Trajectory traj = solve(u0, sc);
    if (traj.energies.front() > 0.0)
      for (double e : traj.energies)
        drift = std::max(drift, std::abs(e / traj.energies.front() - 1.0));
  }

  // Spatial refinement on a resolved datum: random spectrum confined to a
  // quarter of each axis's dealias cutoff, so the quadratic cascade needs
  // three product generations before the coarse lattice truncates anything.
  // The sup normalization keeps those generations far below the threshold.
  double spatial = 0.0;
  {
    std::vector<double> caps(g->dim);
    for (int a = 0; a < g->dim; ++a) caps[a] = (2.0 / 3.0) * g->nyquist[a] / 4.0;
    Field band = random_axis_band_field(g, g->dim, caps, cfg.seed + 2, 3.0);
    band *= detail::kSpatialSup / lp_norm(band, std::numeric_limits<double>::infinity());
    std::vector<int> fine_pts = cfg.grid_points;
    for (int& v : fine_pts) v *= 2;
    GridPtr fine = make_grid(fine_pts, cfg.box_lengths);
    detail::warm_plans(fine);
    // One dt that satisfies the advective CFL bound on the finer lattice, so
    // both levels integrate with identical steps.
    const double dx_fine = *std::min_element(fine->spacing.begin(), fine->spacing.end());
    const double cap = cfg.solver.cfl_safety * dx_fine /
                       (lp_norm(band, std::numeric_limits<double>::infinity()) + 1e-12);
    double dt_sp = cfg.solver.dt;
    while (dt_sp > 0.9 * cap) dt_sp *= 0.5;
    Field uc = at_T(band, dt_sp);
    Field uf = at_T(regrid(band, fine), dt_sp);
    const double ref = lp_norm(uf, 2.0);
    spatial = lp_norm(regrid(uc, fine) - uf, 2.0) / std::max(ref, 1e-300);
  }

  CsvTable table;
  table.name = "convergence";
  table.columns = {"n", "m", "t", "richardson_err", "energy_drift", "spatial_change"};
  table.add_row({0.0, 0.0, T, e1, drift, spatial});
  table.add_row({1.0, 0.0, T, e2, drift, spatial});
  rep.tables.push_back(std::move(table));

  rep.results["temporal_order"] = order;
  rep.results["energy_drift"] = drift;
  rep.results["spatial_change"] = spatial;
  rep.add_verdict("temporal_order", "Richardson self-convergence order of the time stepper", order,
                  cfg.tol("order_min"), order >= cfg.tol("order_min"));
  rep.add_verdict("energy_drift", "relative H1 energy drift stays small", drift,
                  cfg.tol("drift_tol"), drift < cfg.tol("drift_tol"));
  rep.add_verdict("spatial_refinement", "solution change under lattice doubling stays small",
                  spatial, cfg.tol("spatial_tol"), spatial < cfg.tol("spatial_tol"));
  rep.runtime_seconds = clock.seconds();
  return rep;
}

}  // namespace eplab

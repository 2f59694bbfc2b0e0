// Command-line front end for the experiment suite. Each subcommand runs one
// experiment, writes report.json + CSV tables (and SVG plots unless
// suppressed) into the output directory, prints one line per verdict, and
// exits 0 only if every verdict passed.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "eplab/experiments.hpp"
#include "eplab/plots.hpp"

namespace {

using namespace eplab;

const CsvTable* find_table(const ExperimentReport& rep, const std::string& name) {
  for (const auto& t : rep.tables)
    if (t.name == name) return &t;
  return nullptr;
}

int column_index(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return static_cast<int>(i);
  return -1;
}

// One series per distinct (n, m) pair, x taken from `xcol`, y from `ycol`.
std::vector<PlotSeries> grouped_series(const CsvTable& t, const std::string& xcol,
                                       const std::string& ycol, bool split_m) {
  const int xi = column_index(t, xcol), yi = column_index(t, ycol);
  std::vector<PlotSeries> out;
  if (xi < 0 || yi < 0) return out;
  for (const auto& row : t.rows) {
    std::string label = "n=" + detail::num_name(row[0]);
    if (split_m) label += " m=" + detail::num_name(row[1]);
    PlotSeries* s = nullptr;
    for (auto& q : out)
      if (q.label == label) s = &q;
    if (!s) {
      out.push_back({label, {}, {}});
      s = &out.back();
    }
    s->x.push_back(row[xi]);
    s->y.push_back(row[yi]);
  }
  return out;
}

void write_plots(const ExperimentReport& rep, const std::filesystem::path& dir) {
  if (rep.experiment == "separation") {
    if (const CsvTable* t = find_table(rep, "separation"))
      write_svg_plot((dir / "separation.svg").string(), "Besov separation sigma(t)", "t", "sigma",
                     grouped_series(*t, "t", "sigma", false), true);
  } else if (rep.experiment == "nowhere") {
    if (const CsvTable* t = find_table(rep, "nowhere")) {
      write_svg_plot((dir / "nowhere_sigma.svg").string(), "Separation with base state", "t",
                     "sigma_base", grouped_series(*t, "t", "sigma_base", true), true);
      write_svg_plot((dir / "nowhere_overlap.svg").string(), "Overlap error envelope", "t",
                     "err_overlap", grouped_series(*t, "t", "err_overlap", true), true);
    }
  } else if (rep.experiment == "scaling") {
    if (const CsvTable* t = find_table(rep, "norm_scaling")) {
      std::vector<PlotSeries> series;
      for (std::size_t c = 3; c < t->columns.size(); ++c) {
        PlotSeries s;
        s.label = t->columns[c];
        for (const auto& row : t->rows)
          if (row[1] == t->rows.front()[1]) {  // first m only
            s.x.push_back(row[0]);
            s.y.push_back(row[c]);
          }
        series.push_back(std::move(s));
      }
      write_svg_plot((dir / "norm_scaling.svg").string(), "Perturbation norm scaling", "n",
                     "norm", series, true);
    }
  } else if (rep.experiment == "localize") {
    if (const CsvTable* t = find_table(rep, "localization"))
      write_svg_plot((dir / "localization.svg").string(), "Block-identity residuals", "n",
                     "diag_residual", grouped_series(*t, "n", "diag_residual", true), false);
  } else if (rep.experiment == "inequalities") {
    if (const CsvTable* t = find_table(rep, "inequalities")) {
      std::vector<PlotSeries> series;
      for (const char* col : {"t_besov_coarse", "t_besov_fine"}) {
        const int ci = column_index(*t, col);
        if (ci < 0) continue;
        PlotSeries s;
        s.label = col;
        for (const auto& row : t->rows) {
          s.x.push_back(row[0]);
          s.y.push_back(row[ci]);
        }
        series.push_back(std::move(s));
      }
      write_svg_plot((dir / "inequalities.svg").string(), "Bilinear estimate ratios", "case",
                     "ratio", series, false);
    }
  }
}

}  // namespace

int main(int argc, char** argv) try {
  CLI::App app{
      "eplab: periodic EPDiff (Euler-Poincare) laboratory.\n"
      "Besov-norm experiments on the data-to-solution map of\n"
      "  d_t u + (u.grad)u = T(u,u)\n"
      "on the flat torus, with Littlewood-Paley diagnostics."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  bool no_plots = false;
  app.add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
  auto* o_out = app.add_option("--out", out_dir, "output directory (overrides config out_dir)");
  auto* o_seed = app.add_option("--seed", seed, "RNG seed for random presets/cases");
  auto* o_threads = app.add_option("--threads", threads, "worker threads (results are"
                                   " scheduling-independent)");
  app.add_flag("--no-plots", no_plots, "skip SVG plot output");

  double s_val = 0, n_damp = 0, amp = 0, dt = 0, t_max = 0;
  std::vector<int> grid_v, nrange_v;
  std::vector<double> box_v, mlist_v, snaps_v;
  std::string datum_v;
  bool dealias_v = true, diag_v = false;
  auto* o_s = app.add_option("--s", s_val, "Besov smoothness index s");
  auto* o_grid = app.add_option("--grid", grid_v, "lattice points per axis (powers of two)");
  auto* o_box = app.add_option("--box", box_v, "box side lengths per axis");
  auto* o_nr = app.add_option("--n-range", nrange_v, "dyadic indices n of the perturbation pairs");
  auto* o_ml = app.add_option("--m-list", mlist_v, "translation sweep offsets");
  auto* o_nd = app.add_option("--n-damp", n_damp, "extra 2^{-n_damp} packet damping");
  auto* o_bd = app.add_option("--base-datum", datum_v,
                              "base state preset: zero | gaussian-vortexlike |"
                              " low-frequency-random");
  auto* o_ba = app.add_option("--base-amplitude", amp, "Besov norm of the base state");
  auto* o_dt = app.add_option("--dt", dt, "RK4 step size");
  auto* o_tm = app.add_option("--t-max", t_max, "declared time horizon");
  auto* o_sn = app.add_option("--snapshots", snaps_v, "snapshot times");
  auto* o_da = app.add_flag("--dealias,!--no-dealias", dealias_v, "2/3-rule dealiasing toggle");
  auto* o_dg = app.add_flag("--diagnostic", diag_v,
                            "allow (s,p,r) outside the regularity window");

  auto* sc_localize =
      app.add_subcommand("localize", "dyadic-block localization of the wave packets");
  auto* sc_scaling =
      app.add_subcommand("scaling", "Besov-norm growth/decay slopes of the perturbation pair");
  std::vector<double> k_list{-1.0, 0.0, 1.0};
  sc_scaling->add_option("--k-list", k_list, "smoothness shifts k probed via B^{s+k}");
  auto* sc_sep =
      app.add_subcommand("separation", "flow separation sigma(t) from a zero base state");
  app.add_subcommand("nowhere", "tail/overlap/separation decomposition around a base state");
  auto* sc_ineq =
      app.add_subcommand("inequalities", "fitted constants of the bilinear/algebra estimates");
  int cases = 20;
  sc_ineq->add_option("--cases", cases, "number of random cases (at least 10)");
  auto* sc_conv = app.add_subcommand("converge", "solver order, drift, and refinement gate");

  // Global options may appear after the subcommand name.
  for (CLI::App* sc : app.get_subcommands({})) sc->fallthrough();

  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = ExperimentConfig::load(config_path);
  if (o_seed->count()) cfg.seed = seed;
  if (o_threads->count()) cfg.threads = threads;
  if (o_out->count()) cfg.out_dir = out_dir;
  if (o_s->count()) cfg.s = s_val;
  if (o_grid->count()) cfg.grid_points = grid_v;
  if (o_box->count()) cfg.box_lengths = box_v;
  if (o_nr->count()) cfg.n_range = nrange_v;
  if (o_ml->count()) {
    cfg.m_list = mlist_v;
    cfg.m_list_explicit = true;
  }
  if (o_nd->count()) cfg.n_damp = n_damp;
  if (o_bd->count()) cfg.base_datum = datum_v;
  if (o_ba->count()) cfg.base_amplitude = amp;
  if (o_dt->count()) cfg.solver.dt = dt;
  if (o_tm->count()) cfg.solver.t_max = t_max;
  if (o_sn->count()) cfg.solver.snapshot_times = snaps_v;
  if (o_da->count()) cfg.solver.dealias = dealias_v;
  if (o_dg->count()) cfg.diagnostic_mode = diag_v;

  ExperimentReport rep;
  if (*sc_localize)
    rep = exp_localization(cfg);
  else if (*sc_scaling)
    rep = exp_norm_scaling(cfg, k_list);
  else if (*sc_sep)
    rep = exp_separation(cfg);
  else if (*sc_ineq)
    rep = exp_inequalities(cfg, cases);
  else if (*sc_conv)
    rep = exp_convergence(cfg);
  else
    rep = exp_nowhere(cfg);

  rep.write(cfg.out_dir);
  if (!no_plots) write_plots(rep, cfg.out_dir);

  for (const auto& v : rep.verdicts)
    std::printf("[%s] %s: %s (observed=%.6g, threshold=%.6g)\n", v.pass ? "PASS" : "FAIL",
                v.name.c_str(), v.invariant.c_str(), v.observed, v.threshold);
  std::printf("report: %s/report.json (%.1f s)\n", cfg.out_dir.c_str(), rep.runtime_seconds);
  return rep.all_pass() ? 0 : 1;
} catch (const std::exception& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  return 2;
}

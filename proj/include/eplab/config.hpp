#pragma once
// Experiment configuration: defaults, strict JSON loading (unknown keys are
// errors, including unknown tolerance-override names), and validation of the
// regularity window and of the packet/grid compatibility.

#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "eplab/besov.hpp"
#include "eplab/ep_dynamics.hpp"
#include "eplab/perturbations.hpp"
#include "eplab/report.hpp"

namespace eplab {

// Every tolerance override a config may carry, with its default. Experiments
// read these through ExperimentConfig::tol().
inline const std::map<std::string, double>& known_tolerances() {
  static const std::map<std::string, double> k = {
      {"diag_tol", 1e-10},            // localization: diagonal block residual
      {"offdiag_tol", 1e-12},         // localization: off-diagonal block residual
      {"slope_tol_f", 0.1},           // scaling: |f-slope - k|
      {"slope_tol_g", 0.1},           // scaling: |g-slope + 1|
      {"m_indep_tol", 1e-6},          // scaling: translation invariance of norms
      {"sigma0_tol", 1e-12},          // separation: sigma(0) = ||g|| identity
      {"sep_slope_tol", 0.05},        // separation: initial-distance slope vs -1
      {"c0_min", 0.0},                // separation: fitted c0 must exceed this
      {"c0_refine_tol", 0.05},        // separation: c0 drift under dt -> dt/2
      {"n_stability_min", 0.5},       // separation: sigma ratio across top two n
      {"tail_c_spread", 2.0},         // nowhere: allowed upward drift of tail constants
      {"overlap_decay_min", 3.0},     // nowhere: end-to-end m-sweep decay factor
      {"overlap_monotone_slack", 1.1},// nowhere: per-step envelope slack
      {"sigma_budget_factor", 0.5},   // nowhere: sigma(t) >= factor * c0 * t
      {"w0_tol", 1e-12},              // nowhere: w(0) identity
      {"refine_spread", 2.0},         // inequalities: constant stability factor
      {"interp_tol", 1e-10},          // inequalities: interpolation ratio - 1
      {"order_min", 3.7},             // convergence: temporal order
      {"drift_tol", 1e-6},            // convergence: relative energy drift
      {"spatial_tol", 1e-8},          // convergence: refinement solution change
  };
  return k;
}

struct ExperimentConfig {
  std::vector<int> grid_points{4096, 64};
  std::vector<double> box_lengths{64.0, 64.0};
  double s = 4.5;
  double p = 2.0;
  double r = 2.0;
  std::vector<int> n_range{4, 5, 6};
  std::vector<double> m_list{0.0, 8.0, 16.0};
  bool m_list_explicit = false;  // set when m_list came from config/CLI
  double n_damp = 0.0;
  std::string base_datum = "zero";
  double base_amplitude = 0.5;
  std::uint64_t seed = 0;
  SolverConfig solver{0.05, 2.0, 0.4, true, {0.1, 0.2, 0.3, 0.4, 0.5}};
  std::string out_dir = ".";
  bool diagnostic_mode = false;
  int threads = 1;
  std::map<std::string, double> tolerances;

  int dim() const { return static_cast<int>(grid_points.size()); }
  GridPtr grid() const { return make_grid(grid_points, box_lengths); }
  BesovIndex index() const { return BesovIndex(s, p, r); }

  double tol(const std::string& name) const {
    auto reg = known_tolerances().find(name);
    if (reg == known_tolerances().end())
      throw error("ExperimentConfig: unknown tolerance '" + name + "'");
    auto it = tolerances.find(name);
    return it == tolerances.end() ? reg->second : it->second;
  }

  void validate() const {
    if (grid_points.empty() || grid_points.size() != box_lengths.size())
      throw error("ExperimentConfig: grid_points and box_lengths must agree and be nonempty");
    BesovIndex idx = index();
    if (!diagnostic_mode && !idx.meets_wellposed_range(dim()))
      throw error(
          "ExperimentConfig: (s,p,r) lies outside the well-posedness regularity window; "
          "set diagnostic_mode to probe it anyway");
    if (n_range.empty()) throw error("ExperimentConfig: n_range must be nonempty");
    GridPtr g = grid();
    for (int n : n_range)
      for (double m : m_list) {
        PerturbationParams params{n, n_damp, s, m};
        params.validate(*g);  // carrier under the dealias cutoff, |m| <= L/4
      }
    solver.validate();
    if (threads < 1) throw error("ExperimentConfig: threads must be at least 1");
    if (!(base_amplitude > 0.0)) throw error("ExperimentConfig: base_amplitude must be positive");
    parse_base_datum(base_datum);
    for (const auto& [name, value] : tolerances) {
      if (known_tolerances().find(name) == known_tolerances().end())
        throw error("ExperimentConfig: unknown tolerance '" + name + "'");
      (void)value;
    }
  }

  ordered_json to_json() const {
    ordered_json j;
    j["grid_points"] = grid_points;
    j["box_lengths"] = box_lengths;
    j["s"] = s;
    j["p"] = p;
    j["r"] = r;
    j["n_range"] = n_range;
    j["m_list"] = m_list;
    j["n_damp"] = n_damp;
    j["base_datum"] = base_datum;
    j["base_amplitude"] = base_amplitude;
    j["seed"] = seed;
    j["solver"] = {{"dt", solver.dt},
                   {"t_max", solver.t_max},
                   {"cfl_safety", solver.cfl_safety},
                   {"dealias", solver.dealias},
                   {"snapshot_times", solver.snapshot_times}};
    j["out_dir"] = out_dir;
    j["diagnostic_mode"] = diagnostic_mode;
    j["threads"] = threads;
    j["tolerances"] = tolerances;
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    for (const auto& [key, value] : j.items()) {
      if (key == "grid_points") c.grid_points = value.get<std::vector<int>>();
      else if (key == "box_lengths") c.box_lengths = value.get<std::vector<double>>();
      else if (key == "s") c.s = value.get<double>();
      else if (key == "p") c.p = value.get<double>();
      else if (key == "r") c.r = value.get<double>();
      else if (key == "n_range") c.n_range = value.get<std::vector<int>>();
      else if (key == "m_list") {
        c.m_list = value.get<std::vector<double>>();
        c.m_list_explicit = true;
      } else if (key == "n_damp") c.n_damp = value.get<double>();
      else if (key == "base_datum") c.base_datum = value.get<std::string>();
      else if (key == "base_amplitude") c.base_amplitude = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "out_dir") c.out_dir = value.get<std::string>();
      else if (key == "diagnostic_mode") c.diagnostic_mode = value.get<bool>();
      else if (key == "threads") c.threads = value.get<int>();
      else if (key == "solver") {
        for (const auto& [sk, sv] : value.items()) {
          if (sk == "dt") c.solver.dt = sv.get<double>();
          else if (sk == "t_max") c.solver.t_max = sv.get<double>();
          else if (sk == "cfl_safety") c.solver.cfl_safety = sv.get<double>();
          else if (sk == "dealias") c.solver.dealias = sv.get<bool>();
          else if (sk == "snapshot_times") c.solver.snapshot_times = sv.get<std::vector<double>>();
          else throw error("ExperimentConfig: unknown solver key '" + sk + "'");
        }
      } else if (key == "tolerances") {
        for (const auto& [tk, tv] : value.items()) {
          if (known_tolerances().find(tk) == known_tolerances().end())
            throw error("ExperimentConfig: unknown tolerance '" + tk + "'");
          c.tolerances[tk] = tv.get<double>();
        }
      } else {
        throw error("ExperimentConfig: unknown key '" + key + "'");
      }
    }
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("ExperimentConfig: cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw error("ExperimentConfig: parse failure in " + path + ": " + e.what());
    }
    return from_json(j);
  }
};

}  // namespace eplab

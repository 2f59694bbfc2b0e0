#pragma once
// Velocity-form dynamics  d_t u + (u.grad)u = T(u,u)  with the nonlocal
// quadratic operators
//   Q(u,v) = -(I-Lap)^{-1} div( Ju Jv + Ju Jv^T - Ju^T Jv - Ju (div v)
//                               + 1/2 (Ju:Jv) I ),
//   R(u,v) = -(I-Lap)^{-1} ( u div v + Ju^T v ),
//   T(u,v) = 1/2 ( Q(u,v) + Q(v,u) + R(u,v) + R(v,u) ),
// where (Ju)_{ij} = d_j u_i throughout. Products are formed pointwise on the
// lattice and truncated by the 2/3 rule when dealiasing is on. Includes the
// classical RK4 integrator with exact snapshot landing, the conserved H^1
// energy, and the one-dimensional Camassa-Holm operator P used as an
// independent oracle for T.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "eplab/besov.hpp"
#include "eplab/field.hpp"

namespace eplab {

struct SolverConfig {
  double dt = 0.05;
  double t_max = 2.0;
  double cfl_safety = 0.4;
  bool dealias = true;
  std::vector<double> snapshot_times;  // scheme is fixed: classical RK4

  void validate() const {
    if (!(dt > 0.0)) throw error("SolverConfig: dt must be positive");
    if (!(t_max > 0.0)) throw error("SolverConfig: t_max must be positive");
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
      throw error("SolverConfig: cfl_safety must lie in (0,1]");
    for (double t : snapshot_times)
      if (!(t >= 0.0) || t > t_max * (1.0 + 1e-12))
        throw error("SolverConfig: snapshot times must lie in [0, t_max]");
  }
};

struct Trajectory {
  std::vector<double> times;    // strictly increasing, starts at 0
  std::vector<Field> states;    // states[0] is the supplied datum
  std::vector<double> energies;
  std::vector<double> besov;    // filled when solve() is given a norm request
};

namespace detail {

// Real-space samples of a vector field: values, all jacobian entries, and the
// divergence. One backward transform per component and per jacobian entry;
// every quadratic operator below reads from here, so each argument of the
// right-hand side is transformed exactly once.
struct FieldSamples {
  GridPtr grid;
  int ncomp = 0;
  std::vector<RVec> val;               // val[i][t]       = u_i(x_t)
  std::vector<std::vector<RVec>> jac;  // jac[i][j][t]    = d_j u_i(x_t)
  RVec div;                            // div[t]          = sum_i d_i u_i(x_t)
};

inline FieldSamples sample_field(const Field& u) {
  const Grid& g = *u.grid();
  if (u.ncomp() != g.dim)
    throw error("ep_dynamics: vector field must have one component per axis");
  FieldSamples s;
  s.grid = u.grid();
  s.ncomp = u.ncomp();
  s.val = inverse(u);
  JacobianField J = gradient(u);
  s.jac.assign(s.ncomp, std::vector<RVec>(g.dim, RVec(g.total)));
  CVec tmp(g.total);
  for (int i = 0; i < s.ncomp; ++i)
    for (int j = 0; j < g.dim; ++j) {
      FftEngine::instance().backward(g, J.entry(i, j).data(), tmp.data());
      for (long t = 0; t < g.total; ++t) s.jac[i][j][t] = tmp[t].real();
    }
  s.div.assign(g.total, 0.0);
  for (int i = 0; i < g.dim; ++i)
    for (long t = 0; t < g.total; ++t) s.div[t] += s.jac[i][i][t];
  return s;
}

// Q from samples: assemble the matrix integrand pointwise, transform its d^2
// entries, then apply the spectral divergence and -(1+|k|^2)^{-1} in one pass.
inline Field q_from_samples(const FieldSamples& a, const FieldSamples& b) {
  const Grid& g = *a.grid;
  const int d = g.dim;
  RVec dot(g.total, 0.0);  // Ja : Jb
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (long t = 0; t < g.total; ++t) dot[t] += a.jac[i][j][t] * b.jac[i][j][t];
  std::vector<RVec> rows(static_cast<std::size_t>(d) * d, RVec(g.total));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      RVec& m = rows[static_cast<std::size_t>(i) * d + j];
      for (long t = 0; t < g.total; ++t) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += a.jac[i][k][t] * b.jac[k][j][t];  // Ja Jb
        for (int k = 0; k < d; ++k) s += a.jac[i][k][t] * b.jac[j][k][t];  // Ja Jb^T
        for (int k = 0; k < d; ++k) s -= a.jac[k][i][t] * b.jac[k][j][t];  // -Ja^T Jb
        s -= a.jac[i][j][t] * b.div[t];                                    // -Ja (div b)
        if (i == j) s += 0.5 * dot[t];
        m[t] = s;
      }
    }
  Field M = transform(a.grid, rows);
  Field out(a.grid, d);
  for_each_mode(g, [&](long t, const int* idx) {
    double k2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double kj = g.freq[j][idx[j]];
      k2 += kj * kj;
    }
    const double w = -1.0 / (1.0 + k2);
    for (int i = 0; i < d; ++i) {
      cplx s(0.0, 0.0);
      for (int j = 0; j < d; ++j)
        s += cplx(0.0, g.deriv_freq[j][idx[j]]) * M.comp(i * d + j)[t];
      out.comp(i)[t] = w * s;
    }
  });
  return out;
}

inline Field r_from_samples(const FieldSamples& a, const FieldSamples& b) {
  const Grid& g = *a.grid;
  const int d = g.dim;
  std::vector<RVec> rows(d, RVec(g.total));
  for (int i = 0; i < d; ++i) {
    RVec& m = rows[i];
    for (long t = 0; t < g.total; ++t) {
      double s = a.val[i][t] * b.div[t];                       // a (div b)
      for (int j = 0; j < d; ++j) s += a.jac[j][i][t] * b.val[j][t];  // Ja^T b
      m[t] = s;
    }
  }
  Field out = transform(a.grid, rows);
  return apply_multiplier(out, [&](const double* k) {
    double k2 = 0.0;
    for (int j = 0; j < d; ++j) k2 += k[j] * k[j];
    return -1.0 / (1.0 + k2);
  });
}

// (a.grad)w, from samples.
inline Field advect_from_samples(const FieldSamples& a, const FieldSamples& w) {
  const Grid& g = *a.grid;
  const int d = g.dim;
  std::vector<RVec> rows(d, RVec(g.total));
  for (int i = 0; i < d; ++i) {
    RVec& m = rows[i];
    for (long t = 0; t < g.total; ++t) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += a.val[j][t] * w.jac[i][j][t];
      m[t] = s;
    }
  }
  return transform(a.grid, rows);
}

inline void check_pair(const Field& u, const Field& v, const char* who) {
  if (!u.grid() || !v.grid() || !u.grid()->same_layout(*v.grid()) || u.ncomp() != v.ncomp()) {
    std::string msg(who);
    throw error(msg + ": fields live on different grids");
  }
}

}  // namespace detail

inline Field q_op(const Field& u, const Field& v, bool do_dealias = true) {
  detail::check_pair(u, v, "q_op");
  const Field& ud = do_dealias ? dealias(u) : u;
  const Field& vd = do_dealias ? dealias(v) : v;
  auto sa = detail::sample_field(ud);
  auto sb = (&u == &v) ? sa : detail::sample_field(vd);
  Field out = detail::q_from_samples(sa, sb);
  return do_dealias ? dealias(out) : out;
}

inline Field r_op(const Field& u, const Field& v, bool do_dealias = true) {
  detail::check_pair(u, v, "r_op");
  const Field& ud = do_dealias ? dealias(u) : u;
  const Field& vd = do_dealias ? dealias(v) : v;
  auto sa = detail::sample_field(ud);
  auto sb = (&u == &v) ? sa : detail::sample_field(vd);
  Field out = detail::r_from_samples(sa, sb);
  return do_dealias ? dealias(out) : out;
}

inline Field advect(const Field& u, const Field& w, bool do_dealias = true) {
  detail::check_pair(u, w, "advect");
  const Field& ud = do_dealias ? dealias(u) : u;
  const Field& wd = do_dealias ? dealias(w) : w;
  auto sa = detail::sample_field(ud);
  auto sw = (&u == &w) ? sa : detail::sample_field(wd);
  Field out = detail::advect_from_samples(sa, sw);
  return do_dealias ? dealias(out) : out;
}

// T(u,v) = 1/2 (Q(u,v)+Q(v,u)+R(u,v)+R(v,u)). The two sums are grouped so the
// u<->v swap permutes commutative additions only: the result is bitwise
// symmetric. For v == u the halving cancels the doubling exactly, so
// t_op(u,u) equals Q(u,u)+R(u,u) bitwise.
inline Field t_op(const Field& u, const Field& v, bool do_dealias = true) {
  detail::check_pair(u, v, "t_op");
  const Field& ud = do_dealias ? dealias(u) : u;
  const Field& vd = do_dealias ? dealias(v) : v;
  auto sa = detail::sample_field(ud);
  const bool same = (&u == &v);
  auto sb = same ? sa : detail::sample_field(vd);
  Field quv = detail::q_from_samples(sa, sb);
  Field qvu = same ? quv : detail::q_from_samples(sb, sa);
  Field ruv = detail::r_from_samples(sa, sb);
  Field rvu = same ? ruv : detail::r_from_samples(sb, sa);
  Field out(u.grid(), u.ncomp());
  const long n = u.grid()->total;
  for (int c = 0; c < u.ncomp(); ++c)
    for (long t = 0; t < n; ++t)
      out.comp(c)[t] =
          0.5 * ((quv.comp(c)[t] + qvu.comp(c)[t]) + (ruv.comp(c)[t] + rvu.comp(c)[t]));
  return do_dealias ? dealias(out) : out;
}

// Full right-hand side -(u.grad)u + T(u,u); one sampling pass feeds all three
// quadratic pieces (14 transforms per call in two dimensions).
inline Field rhs(const Field& u, bool do_dealias = true) {
  const Field& ud = do_dealias ? dealias(u) : u;
  auto s = detail::sample_field(ud);
  Field q = detail::q_from_samples(s, s);
  Field r = detail::r_from_samples(s, s);
  Field adv = detail::advect_from_samples(s, s);
  Field out(u.grid(), u.ncomp());
  const long n = u.grid()->total;
  for (int c = 0; c < u.ncomp(); ++c)
    for (long t = 0; t < n; ++t)
      out.comp(c)[t] = (q.comp(c)[t] + r.comp(c)[t]) - adv.comp(c)[t];
  return do_dealias ? dealias(out) : out;
}

// Conserved H^1 energy: V * sum_k (1+|k|^2) |c(k)|^2 over all components.
inline double energy(const Field& u) {
  const Grid& g = *u.grid();
  double total = 0.0;
  for (int c = 0; c < u.ncomp(); ++c) {
    const auto& arr = u.comp(c);
    for_each_mode(g, [&](long t, const int* idx) {
      double k2 = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        const double k = g.freq[a][idx[a]];
        k2 += k * k;
      }
      total += (1.0 + k2) * std::norm(arr[t]);
    });
  }
  return g.volume * total;
}

// One-dimensional Camassa-Holm operator, used solely as an oracle for t_op:
//   P(u,v) = -d_x (1-d_x^2)^{-1} ( uv + 1/2 u_x v_x ).
inline Field ch_p_op(const Field& u, const Field& v, bool do_dealias = true) {
  detail::check_pair(u, v, "ch_p_op");
  const Grid& g = *u.grid();
  if (g.dim != 1) throw error("ch_p_op: operator is defined on one-dimensional grids only");
  const Field& ud = do_dealias ? dealias(u) : u;
  const Field& vd = do_dealias ? dealias(v) : v;
  auto su = detail::sample_field(ud);
  auto sv = (&u == &v) ? su : detail::sample_field(vd);
  RVec w(g.total);
  for (long t = 0; t < g.total; ++t)
    w[t] = su.val[0][t] * sv.val[0][t] + 0.5 * (su.jac[0][0][t] * sv.jac[0][0][t]);
  Field f = transform(u.grid(), w);
  Field out = map_spectrum(f, true, [&](const double* k, cplx& c) {
    c *= cplx(0.0, -k[0] / (1.0 + k[0] * k[0]));
  });
  return do_dealias ? dealias(out) : out;
}

// Classical RK4 step of the spectral ODE system.
inline Field step(const Field& u, double dt, bool do_dealias = true) {
  Field k1 = rhs(u, do_dealias);
  Field k2 = rhs(u + 0.5 * dt * k1, do_dealias);
  Field k3 = rhs(u + 0.5 * dt * k2, do_dealias);
  Field k4 = rhs(u + dt * k3, do_dealias);
  Field out = u;
  const long n = u.grid()->total;
  for (int c = 0; c < u.ncomp(); ++c)
    for (long t = 0; t < n; ++t)
      out.comp(c)[t] += (dt / 6.0) * (k1.comp(c)[t] + 2.0 * k2.comp(c)[t] +
                                      2.0 * k3.comp(c)[t] + k4.comp(c)[t]);
  return out;
}

// Integrate to every requested snapshot with exact step landing. t=0 is always
// recorded with the supplied datum; integration stops at the last snapshot
// (t_max declares the solver horizon used for validation). Optional ChiPhi and
// BesovIndex pointers request a per-snapshot Besov norm in Trajectory::besov.
inline Trajectory solve(const Field& u0, const SolverConfig& cfg, const ChiPhi* cp = nullptr,
                        const BesovIndex* idx = nullptr) {
  cfg.validate();
  const Grid& g = *u0.grid();

  Field u = cfg.dealias ? dealias(u0) : u0;
  if (cfg.dealias) {
    double kept = 0.0, cut = 0.0;
    for (int c = 0; c < u0.ncomp(); ++c)
      for (long t = 0; t < g.total; ++t) {
        kept += std::norm(u.comp(c)[t]);
        cut += std::norm(u0.comp(c)[t] - u.comp(c)[t]);
      }
    if (cut > 1e-10 * (kept + cut))
      throw error("solve: initial datum carries energy above the dealias cutoff");
  }

  const double m0 = lp_norm(u0, std::numeric_limits<double>::infinity());
  double dx_min = std::numeric_limits<double>::infinity();
  for (int a = 0; a < g.dim; ++a)
    dx_min = std::min(dx_min, g.lengths[a] / static_cast<double>(g.points[a]));
  const double dt_cap = cfg.cfl_safety * dx_min / (m0 + 1e-12);
  if (cfg.dt > dt_cap) {
    std::ostringstream os;
    os << "solve: dt=" << cfg.dt << " violates the advective CFL bound dt<=" << dt_cap;
    throw error(os.str());
  }

  std::vector<double> targets = cfg.snapshot_times;
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  Trajectory traj;
  auto record = [&](double t, const Field& state) {
    traj.times.push_back(t);
    traj.states.push_back(state);
    traj.energies.push_back(energy(state));
    if (cp != nullptr && idx != nullptr) traj.besov.push_back(besov_norm(state, *idx, *cp));
  };
  record(0.0, u0);

  double t = 0.0;
  for (double target : targets) {
    if (target <= 0.0) continue;
    while (t < target) {
      const double h = std::min(cfg.dt, target - t);
      u = step(u, h, cfg.dealias);
      t = (target - t <= cfg.dt) ? target : t + h;
      if (has_non_finite(u) ||
          (m0 > 0.0 && lp_norm(u, std::numeric_limits<double>::infinity()) > 1e3 * m0)) {
        std::ostringstream os;
        os << "blow-up or instability at t=" << t;
        throw error(os.str());
      }
    }
    record(target, u);
  }
  return traj;
}

}  // namespace eplab

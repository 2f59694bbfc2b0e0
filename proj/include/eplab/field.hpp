#pragma once
// Band-limited vector fields on a periodic grid, stored as full-lattice
// spectral coefficients.
//
// Transform convention: the forward transform divides by the total sample
// count, so coefficients are Fourier-series coefficients and
//   f(x) = sum_k c(k) exp(i k.x),   (1/Ntot) sum_x |f(x)|^2 = sum_k |c(k)|^2.
// The inverse transform is the unnormalized spectral sum.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "eplab/fft.hpp"
#include "eplab/grid.hpp"

namespace eplab {

using cplx = std::complex<double>;

class Field {
 public:
  Field() = default;
  Field(GridPtr grid, int ncomp, bool real = true)
      : grid_(std::move(grid)), comp_(ncomp, CVec(grid_->total, cplx(0.0, 0.0))), real_(real) {
    if (ncomp < 1) throw error("Field: component count must be positive");
  }

  const GridPtr& grid() const { return grid_; }
  int ncomp() const { return static_cast<int>(comp_.size()); }
  bool real_symmetric() const { return real_; }
  void set_real_symmetric(bool v) { real_ = v; }

  CVec& comp(int i) { return comp_[i]; }
  const CVec& comp(int i) const { return comp_[i]; }

  Field& operator+=(const Field& o) {
    check_compatible(o);
    for (int c = 0; c < ncomp(); ++c)
      for (long t = 0; t < grid_->total; ++t) comp_[c][t] += o.comp_[c][t];
    real_ = real_ && o.real_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_compatible(o);
    for (int c = 0; c < ncomp(); ++c)
      for (long t = 0; t < grid_->total; ++t) comp_[c][t] -= o.comp_[c][t];
    real_ = real_ && o.real_;
    return *this;
  }
  Field& operator*=(double a) {
    for (auto& arr : comp_)
      for (auto& v : arr) v *= a;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double a, Field f) { return f *= a; }

 private:
  void check_compatible(const Field& o) const {
    if (!grid_ || !o.grid_ || !grid_->same_layout(*o.grid_) || ncomp() != o.ncomp())
      throw error("Field: incompatible operands");
  }

  GridPtr grid_;
  std::vector<CVec> comp_;
  bool real_ = true;
};

// Jacobian of a vector field; entry (i,j) holds the coefficients of d_j u_i.
class JacobianField {
 public:
  JacobianField() = default;
  JacobianField(GridPtr grid, int rows, bool real = true)
      : grid_(std::move(grid)),
        rows_(rows),
        entries_(static_cast<std::size_t>(rows) * grid_->dim, CVec(grid_->total, cplx(0.0, 0.0))),
        real_(real) {}

  const GridPtr& grid() const { return grid_; }
  int rows() const { return rows_; }
  bool real_symmetric() const { return real_; }

  CVec& entry(int i, int j) { return entries_[static_cast<std::size_t>(i) * grid_->dim + j]; }
  const CVec& entry(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * grid_->dim + j];
  }

 private:
  GridPtr grid_;
  int rows_ = 0;
  std::vector<CVec> entries_;
  bool real_ = true;
};

// -- transforms ---------------------------------------------------------------

inline Field transform(GridPtr grid, const std::vector<RVec>& samples) {
  if (samples.empty()) throw error("transform: no components");
  Field out(grid, static_cast<int>(samples.size()));
  const Grid& g = *grid;
  CVec in(g.total);
  for (int c = 0; c < out.ncomp(); ++c) {
    if (static_cast<long>(samples[c].size()) != g.total)
      throw error("transform: sample array size does not match grid");
    for (long t = 0; t < g.total; ++t) in[t] = cplx(samples[c][t], 0.0);
    FftEngine::instance().forward(g, in.data(), out.comp(c).data());
    const double scale = 1.0 / static_cast<double>(g.total);
    for (auto& v : out.comp(c)) v *= scale;
  }
  out.set_real_symmetric(true);
  return out;
}

inline Field transform(GridPtr grid, const RVec& samples) {
  std::vector<RVec> one;
  one.push_back(samples);
  return transform(std::move(grid), one);
}

inline std::vector<RVec> inverse(const Field& f) {
  if (!f.real_symmetric()) throw error("inverse: field is not flagged real");
  const Grid& g = *f.grid();
  std::vector<RVec> out(f.ncomp(), RVec(g.total));
  CVec tmp(g.total);
  for (int c = 0; c < f.ncomp(); ++c) {
    FftEngine::instance().backward(g, f.comp(c).data(), tmp.data());
    for (long t = 0; t < g.total; ++t) out[c][t] = tmp[t].real();
  }
  return out;
}

// -- generic spectral maps ----------------------------------------------------

// fn(k_vector, coefficient&); applied to every component. The caller is
// responsible for the realness flag via the `real` argument.
template <class Fn>
inline Field map_spectrum(const Field& f, bool real, Fn&& fn) {
  Field out = f;
  const Grid& g = *f.grid();
  std::vector<double> k(g.dim);
  for (int c = 0; c < out.ncomp(); ++c) {
    auto& arr = out.comp(c);
    for_each_mode(g, [&](long t, const int* idx) {
      for (int a = 0; a < g.dim; ++a) k[a] = g.freq[a][idx[a]];
      fn(k.data(), arr[t]);
    });
  }
  out.set_real_symmetric(f.real_symmetric() && real);
  return out;
}

// Real even multiplier m(|k| coordinates) given as fn(k_vector) -> double.
template <class Fn>
inline Field apply_multiplier(const Field& f, Fn&& fn) {
  return map_spectrum(f, true, [&](const double* k, cplx& c) { c *= fn(k); });
}

// -- differential operators ---------------------------------------------------

inline JacobianField gradient(const Field& u) {
  const Grid& g = *u.grid();
  JacobianField jac(u.grid(), u.ncomp(), u.real_symmetric());
  for (int i = 0; i < u.ncomp(); ++i) {
    for (int j = 0; j < g.dim; ++j) {
      auto& e = jac.entry(i, j);
      e = u.comp(i);
      for_each_mode(g, [&](long t, const int* idx) {
        e[t] *= cplx(0.0, g.deriv_freq[j][idx[j]]);
      });
    }
  }
  return jac;
}

inline Field divergence(const Field& u) {
  const Grid& g = *u.grid();
  if (u.ncomp() != g.dim) throw error("divergence: field must have one component per axis");
  Field out(u.grid(), 1, u.real_symmetric());
  auto& arr = out.comp(0);
  for_each_mode(g, [&](long t, const int* idx) {
    cplx s(0.0, 0.0);
    for (int j = 0; j < g.dim; ++j) s += cplx(0.0, g.deriv_freq[j][idx[j]]) * u.comp(j)[t];
    arr[t] = s;
  });
  return out;
}

inline Field trace(const JacobianField& jac) {
  const Grid& g = *jac.grid();
  if (jac.rows() != g.dim) throw error("trace: jacobian is not square");
  Field out(jac.grid(), 1, jac.real_symmetric());
  auto& arr = out.comp(0);
  for (int i = 0; i < g.dim; ++i)
    for (long t = 0; t < g.total; ++t) arr[t] += jac.entry(i, i)[t];
  return out;
}

inline Field helmholtz_inverse(const Field& f) {
  const Grid& g = *f.grid();
  return apply_multiplier(f, [&](const double* k) {
    double k2 = 0.0;
    for (int a = 0; a < g.dim; ++a) k2 += k[a] * k[a];
    return 1.0 / (1.0 + k2);
  });
}

inline Field helmholtz(const Field& f) {
  const Grid& g = *f.grid();
  return apply_multiplier(f, [&](const double* k) {
    double k2 = 0.0;
    for (int a = 0; a < g.dim; ++a) k2 += k[a] * k[a];
    return 1.0 + k2;
  });
}

// -- translation --------------------------------------------------------------

// (translate(f,s))(x) = f(x - s): multiply coefficients by exp(-i k.s).
// Phases are built from the fractional part of n*s/L per axis so that
// whole-period and whole-cell shifts are exact. Translation of a real field
// is real; lattice fields keep the flag (Nyquist modes are assumed empty,
// which holds for every dealiased or band-limited field).
inline Field translate(const Field& f, const std::vector<double>& shift) {
  const Grid& g = *f.grid();
  if (static_cast<int>(shift.size()) != g.dim)
    throw error("translate: shift dimension does not match grid");
  std::vector<std::vector<cplx>> phase(g.dim);
  for (int a = 0; a < g.dim; ++a) {
    phase[a].resize(g.points[a]);
    for (int t = 0; t < g.points[a]; ++t) {
      double turns = -g.mode[a][t] * shift[a] / g.lengths[a];
      turns -= std::floor(turns);
      phase[a][t] = std::polar(1.0, 2.0 * M_PI * turns);
    }
  }
  Field out = f;
  for (int c = 0; c < out.ncomp(); ++c) {
    auto& arr = out.comp(c);
    for_each_mode(g, [&](long t, const int* idx) {
      cplx p = phase[0][idx[0]];
      for (int a = 1; a < g.dim; ++a) p *= phase[a][idx[a]];
      arr[t] *= p;
    });
  }
  out.set_real_symmetric(f.real_symmetric());
  return out;
}

// Spectral transfer between grids on the same box: coefficients are copied by
// signed mode; modes not representable on the target lattice are dropped, new
// modes are zero. On a refinement this is exact prolongation.
inline Field regrid(const Field& f, const GridPtr& target) {
  const Grid& gs = *f.grid();
  const Grid& gt = *target;
  if (gs.dim != gt.dim) throw error("regrid: dimension mismatch");
  for (int a = 0; a < gs.dim; ++a)
    if (std::abs(gs.lengths[a] - gt.lengths[a]) > 1e-12 * gs.lengths[a])
      throw error("regrid: box lengths differ");
  Field out(target, f.ncomp(), f.real_symmetric());
  for (int c = 0; c < f.ncomp(); ++c) {
    const auto& src = f.comp(c);
    auto& dst = out.comp(c);
    for_each_mode(gs, [&](long t, const int* idx) {
      long tt = 0;
      for (int a = 0; a < gs.dim; ++a) {
        const int m = gs.mode[a][idx[a]];
        if (m < -gt.points[a] / 2 + 1 || m > gt.points[a] / 2 - 1) return;  // drop
        tt += gt.stride[a] * (m >= 0 ? m : m + gt.points[a]);
      }
      dst[tt] = src[t];
    });
  }
  return out;
}

// -- norms --------------------------------------------------------------------

namespace detail {

// Equal-weight quadrature of the pointwise Euclidean magnitude over any set of
// coefficient arrays (field components or jacobian entries).
inline double lp_norm_arrays(const Grid& g, const std::vector<const CVec*>& arrays, double p) {
  const bool is_inf = std::isinf(p);
  if (!is_inf && !(p >= 1.0)) throw error("lp_norm: p must be >= 1 or infinity");
  CVec tmp(g.total);
  std::vector<RVec> mag2(1, RVec(g.total, 0.0));
  for (const CVec* arr : arrays) {
    FftEngine::instance().backward(g, arr->data(), tmp.data());
    for (long t = 0; t < g.total; ++t) {
      const double v = tmp[t].real();
      mag2[0][t] += v * v;
    }
  }
  if (is_inf) {
    double m = 0.0;
    for (long t = 0; t < g.total; ++t) m = std::max(m, mag2[0][t]);
    return std::sqrt(m);
  }
  if (p == 2.0) {
    double s = 0.0;
    for (long t = 0; t < g.total; ++t) s += mag2[0][t];
    return std::sqrt(g.cell_volume * s);
  }
  double s = 0.0;
  for (long t = 0; t < g.total; ++t) s += std::pow(mag2[0][t], 0.5 * p);
  return std::pow(g.cell_volume * s, 1.0 / p);
}

}  // namespace detail

inline double lp_norm(const Field& f, double p) {
  if (!f.real_symmetric()) throw error("lp_norm: field is not flagged real");
  std::vector<const CVec*> arrays;
  for (int c = 0; c < f.ncomp(); ++c) arrays.push_back(&f.comp(c));
  return detail::lp_norm_arrays(*f.grid(), arrays, p);
}

// Frobenius magnitude of the jacobian, then the same quadrature.
inline double lp_norm(const JacobianField& jac, double p) {
  if (!jac.real_symmetric()) throw error("lp_norm: jacobian is not flagged real");
  const Grid& g = *jac.grid();
  std::vector<const CVec*> arrays;
  for (int i = 0; i < jac.rows(); ++i)
    for (int j = 0; j < g.dim; ++j) arrays.push_back(&jac.entry(i, j));
  return detail::lp_norm_arrays(g, arrays, p);
}

// -- dealiasing ---------------------------------------------------------------

// Two-thirds rule: zero every coefficient whose signed mode n satisfies
// 3|n| > N on any axis (|k_i| above two thirds of the axis Nyquist).
inline Field dealias(const Field& f) {
  const Grid& g = *f.grid();
  Field out = f;
  for (int c = 0; c < out.ncomp(); ++c) {
    auto& arr = out.comp(c);
    for_each_mode(g, [&](long t, const int* idx) {
      for (int a = 0; a < g.dim; ++a) {
        if (3 * std::abs(g.mode[a][idx[a]]) > g.points[a]) {
          arr[t] = cplx(0.0, 0.0);
          return;
        }
      }
    });
  }
  return out;
}

// -- diagnostics --------------------------------------------------------------

inline double max_abs(const Field& f) {
  double m = 0.0;
  for (int c = 0; c < f.ncomp(); ++c)
    for (const auto& v : f.comp(c)) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (int c = 0; c < a.ncomp(); ++c)
    for (long t = 0; t < a.grid()->total; ++t) m = std::max(m, std::abs(a.comp(c)[t] - b.comp(c)[t]));
  return m;
}

// Worst deviation from Hermitian symmetry, relative to the largest coefficient.
inline double hermitian_residual(const Field& f) {
  const Grid& g = *f.grid();
  const double scale = std::max(max_abs(f), std::numeric_limits<double>::min());
  double worst = 0.0;
  for (int c = 0; c < f.ncomp(); ++c) {
    const auto& arr = f.comp(c);
    for_each_mode(g, [&](long t, const int* idx) {
      const long tc = g.conjugate_index(idx);
      worst = std::max(worst, std::abs(arr[t] - std::conj(arr[tc])));
    });
  }
  return worst / scale;
}

inline bool has_non_finite(const Field& f) {
  for (int c = 0; c < f.ncomp(); ++c)
    for (const auto& v : f.comp(c))
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return true;
  return false;
}

}  // namespace eplab

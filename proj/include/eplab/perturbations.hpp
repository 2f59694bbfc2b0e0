#pragma once
// Perturbation data for the separation experiments: a frequency-compact even
// bump, high-frequency packets riding a dyadic ring, low-frequency companion
// bumps, their translates, and named base-datum presets.  Everything is
// assembled directly in coefficient space from closed-form spectra, so block
// localization, evenness, and translation invariance hold to roundoff.
//
// The bump profile equals 1 on |xi| <= 1/4 and 0 on |xi| >= 1/2; the packet
// with dyadic index n oscillates at carrier frequency (17/12)*2^n along x1
// with amplitude 2^(-n*s - n_damp).  For n >= 3 the packet spectrum sits
// entirely inside the annulus (4/3)*2^n <= |xi| <= (3/2)*2^n, which is where
// the dyadic-block multiplier is identically one.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "eplab/besov.hpp"
#include "eplab/chi_phi.hpp"
#include "eplab/field.hpp"
#include "eplab/grid.hpp"
#include "eplab/random_fields.hpp"

namespace eplab {

inline constexpr double kBumpInner = 0.25;
inline constexpr double kBumpOuter = 0.5;
inline constexpr double kCarrierRatio = 17.0 / 12.0;
// Coarsest frequency-lattice spacing on which the bump transition band is
// still sampled (two to three points across [1/4, 1/2]).
inline constexpr double kBumpMaxSpacing = 0.125;
// Spectral scale of the vortex-like preset's stream function, exp(-|xi|/scale).
inline constexpr double kVortexScale = 6.0;

// Even C^inf bump in frequency: 1 on |xi| <= 1/4, 0 on |xi| >= 1/2.
inline double bump_profile(double xi) {
  const double r = std::abs(xi);
  if (r <= kBumpInner) return 1.0;
  if (r >= kBumpOuter) return 0.0;
  return 1.0 - smooth_step((r - kBumpInner) / (kBumpOuter - kBumpInner));
}

namespace detail {

inline void check_bump_resolution(const Grid& g, const char* who) {
  for (int a = 0; a < g.dim; ++a)
    if (g.freq_step[a] > kBumpMaxSpacing + 1e-15)
      throw error(std::string(who) +
                  ": frequency lattice spacing exceeds 1/8; the bump transition band is unresolved");
}

}  // namespace detail

struct PerturbationParams {
  int n = 4;            // dyadic index
  double n_damp = 0.0;  // extra damping exponent in the amplitude 2^(-n*s - n_damp)
  double s = 4.5;       // regularity exponent used in the amplitude
  double m = 0.0;       // translation distance along x1

  double carrier() const { return kCarrierRatio * std::ldexp(1.0, n); }
  double amplitude() const { return std::pow(2.0, -static_cast<double>(n) * s - n_damp); }

  void validate(const Grid& g) const {
    if (n < 0) throw error("PerturbationParams: dyadic index must be nonnegative");
    if (!std::isfinite(s) || !std::isfinite(n_damp) || !std::isfinite(m))
      throw error("PerturbationParams: non-finite parameter");
    const double cutoff = (2.0 / 3.0) * g.nyquist[0];
    if (!(carrier() + kBumpOuter < cutoff))
      throw error("PerturbationParams: carrier frequency does not fit under the dealias cutoff");
    if (std::abs(m) > 0.25 * g.lengths[0] + 1e-12)
      throw error("PerturbationParams: translation exceeds a quarter of the box");
    detail::check_bump_resolution(g, "PerturbationParams");
  }
};

// The bump itself on a one-dimensional grid, as a real field.
inline Field bump_phi(const GridPtr& grid) {
  const Grid& g = *grid;
  if (g.dim != 1) throw error("bump_phi: expects a one-dimensional axis grid");
  detail::check_bump_resolution(g, "bump_phi");
  Field out(grid, 1);
  auto& arr = out.comp(0);
  for_each_mode(g, [&](long t, const int* idx) {
    arr[t] = cplx(bump_profile(g.freq[0][idx[0]]) / g.lengths[0], 0.0);
  });
  out.set_real_symmetric(true);
  return out;
}

// High-frequency packet: amplitude * (cos(carrier*x1) * bump(x1)*...*bump(xd), 0, ..., 0).
// Built spectrally; the constructor verifies that the packet's energy lies
// inside its dyadic annulus (true exactly for n >= 3).
inline Field make_f(const PerturbationParams& params, const GridPtr& grid) {
  const Grid& g = *grid;
  params.validate(g);
  const double c = params.carrier();
  const double amp = params.amplitude();
  Field out(grid, g.dim);
  auto& arr = out.comp(0);
  const double ring_lo = (4.0 / 3.0) * std::ldexp(1.0, params.n);
  const double ring_hi = (3.0 / 2.0) * std::ldexp(1.0, params.n);
  double total = 0.0, leaked = 0.0;
  for_each_mode(g, [&](long t, const int* idx) {
    const double xi1 = g.freq[0][idx[0]];
    double v = 0.5 * (bump_profile(xi1 - c) + bump_profile(xi1 + c)) / g.lengths[0];
    double r2 = xi1 * xi1;
    for (int a = 1; a < g.dim; ++a) {
      const double xia = g.freq[a][idx[a]];
      v *= bump_profile(xia) / g.lengths[a];
      r2 += xia * xia;
    }
    if (v == 0.0) return;
    arr[t] = cplx(amp * v, 0.0);
    const double e = v * v;
    total += e;
    const double r = std::sqrt(r2);
    if (r < ring_lo || r > ring_hi) leaked += e;
  });
  if (!(total > 0.0) || leaked > 1e-12 * total)
    throw error("make_f: packet spectrum leaks outside its dyadic annulus (needs n >= 3)");
  out.set_real_symmetric(true);
  return out;
}

// Low-frequency companion: 2^-n * (bump(x1)*...*bump(xd), 0, ..., 0).
inline Field make_g(int n, const GridPtr& grid) {
  const Grid& g = *grid;
  if (n < 0) throw error("make_g: dyadic index must be nonnegative");
  detail::check_bump_resolution(g, "make_g");
  Field out(grid, g.dim);
  auto& arr = out.comp(0);
  const double amp = std::ldexp(1.0, -n);
  for_each_mode(g, [&](long t, const int* idx) {
    double v = amp;
    for (int a = 0; a < g.dim; ++a) v *= bump_profile(g.freq[a][idx[a]]) / g.lengths[a];
    if (v != 0.0) arr[t] = cplx(v, 0.0);
  });
  out.set_real_symmetric(true);
  return out;
}

// Packet and companion translated by m along x1 (spectral phase shift).
inline std::pair<Field, Field> make_translated_pair(const PerturbationParams& params,
                                                    const GridPtr& grid) {
  const Grid& g = *grid;
  params.validate(g);
  std::vector<double> shift(g.dim, 0.0);
  shift[0] = params.m;
  Field f = make_f(params, grid);
  Field gg = make_g(params.n, grid);
  if (params.m == 0.0) return {std::move(f), std::move(gg)};
  return {translate(f, shift), translate(gg, shift)};
}

// -- base-datum presets -------------------------------------------------------

enum class BaseDatum { zero, gaussian_vortexlike, low_frequency_random };

inline BaseDatum parse_base_datum(const std::string& name) {
  if (name == "zero") return BaseDatum::zero;
  if (name == "gaussian-vortexlike") return BaseDatum::gaussian_vortexlike;
  if (name == "low-frequency-random") return BaseDatum::low_frequency_random;
  throw error("unknown base-datum preset: " + name);
}

inline std::string base_datum_name(BaseDatum kind) {
  switch (kind) {
    case BaseDatum::zero: return "zero";
    case BaseDatum::gaussian_vortexlike: return "gaussian-vortexlike";
    case BaseDatum::low_frequency_random: return "low-frequency-random";
  }
  throw error("unknown base-datum preset enum");
}

// Real base datum, band-limited below the dealias cutoff, rescaled so that
// its Besov norm in the supplied index equals `amplitude`.
inline Field make_base_datum(BaseDatum kind, double amplitude, const GridPtr& grid,
                             const ChiPhi& cp, const BesovIndex& idx, std::uint64_t seed = 0) {
  const Grid& g = *grid;
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw error("make_base_datum: amplitude must be finite and nonnegative");
  if (kind == BaseDatum::zero) return Field(grid, g.dim);

  Field raw;
  if (kind == BaseDatum::gaussian_vortexlike) {
    if (g.dim != 2) throw error("make_base_datum: the vortex-like preset is two-dimensional");
    // Stream function with radially decaying spectrum, velocity (d2 psi, -d1 psi).
    Field psi(grid, 1);
    auto& arr = psi.comp(0);
    for_each_mode(g, [&](long t, const int* idx_) {
      double r2 = 0.0;
      bool keep = true;
      for (int a = 0; a < g.dim; ++a) {
        if (idx_[a] == g.points[a] / 2) keep = false;
        const double xi = g.freq[a][idx_[a]];
        r2 += xi * xi;
      }
      if (!keep) return;
      arr[t] = cplx(std::exp(-std::sqrt(r2) / kVortexScale), 0.0);
    });
    psi.set_real_symmetric(true);
    raw = Field(grid, 2);
    for (int c = 0; c < 2; ++c) {
      const double sign = (c == 0) ? 1.0 : -1.0;
      const int axis = (c == 0) ? 1 : 0;
      auto& dst = raw.comp(c);
      const auto& src = psi.comp(0);
      for_each_mode(g, [&](long t, const int* idx_) {
        dst[t] = src[t] * cplx(0.0, sign * g.deriv_freq[axis][idx_[axis]]);
      });
    }
    raw.set_real_symmetric(true);
  } else {
    raw = random_ball_field(grid, g.dim, 4.0, seed, 2.0);
  }
  raw = dealias(raw);
  const double norm = besov_norm(raw, idx, cp);
  if (!(norm > 0.0)) throw error("make_base_datum: degenerate preset norm");
  raw *= amplitude / norm;
  return raw;
}

}  // namespace eplab

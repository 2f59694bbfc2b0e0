#pragma once
// Seeded smooth random fields assembled directly in coefficient space.  Used
// by the base-datum presets and the randomized inequality suites.  The
// gaussian draw is hand-rolled (Box-Muller over raw mt19937_64 output) so a
// fixed seed gives bitwise-identical fields independent of the standard
// library's distribution internals.

#include <cmath>
#include <cstdint>
#include <random>

#include "eplab/field.hpp"
#include "eplab/grid.hpp"

namespace eplab {

class GaussianDraw {
 public:
  explicit GaussianDraw(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = unit();
    } while (u1 <= 0.0);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * unit();
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Real random field whose spectrum is confined to the frequency ball
// |xi| <= xi_max, with per-mode weight (1 + |xi|^2)^(-decay/2).  Nyquist
// planes stay empty.  Hermitian symmetry is enforced by averaging each draw
// with the conjugate of its mirror, so the samples are real to roundoff.
inline Field random_ball_field(const GridPtr& grid, int ncomp, double xi_max, std::uint64_t seed,
                               double decay = 2.0) {
  if (ncomp < 1) throw error("random_ball_field: component count must be positive");
  if (!(xi_max > 0.0)) throw error("random_ball_field: frequency radius must be positive");
  const Grid& g = *grid;
  GaussianDraw gauss(seed);
  Field f(grid, ncomp);
  for (int c = 0; c < ncomp; ++c) {
    auto& arr = f.comp(c);
    for_each_mode(g, [&](long t, const int* idx) {
      double r2 = 0.0;
      bool keep = true;
      for (int a = 0; a < g.dim; ++a) {
        if (idx[a] == g.points[a] / 2) keep = false;
        const double xi = g.freq[a][idx[a]];
        r2 += xi * xi;
      }
      if (!keep || r2 > xi_max * xi_max) return;
      const double w = std::pow(1.0 + r2, -0.5 * decay);
      arr[t] = w * cplx(gauss(), gauss());
    });
    CVec sym = arr;
    for_each_mode(g, [&](long t, const int* idx) {
      const long tc = g.conjugate_index(idx);
      sym[t] = 0.5 * (arr[t] + std::conj(arr[tc]));
    });
    arr = sym;
  }
  f.set_real_symmetric(true);
  return f;
}

// Real random field confined to the frequency box |xi_a| <= xi_axis_max[a]
// per axis. On strongly anisotropic lattices this respects each axis's own
// resolution, unlike the Euclidean ball above.
inline Field random_axis_band_field(const GridPtr& grid, int ncomp,
                                    const std::vector<double>& xi_axis_max, std::uint64_t seed,
                                    double decay = 2.0) {
  if (ncomp < 1) throw error("random_axis_band_field: component count must be positive");
  const Grid& g = *grid;
  if (static_cast<int>(xi_axis_max.size()) != g.dim)
    throw error("random_axis_band_field: one frequency cap per axis required");
  for (double cap : xi_axis_max)
    if (!(cap > 0.0)) throw error("random_axis_band_field: frequency caps must be positive");
  GaussianDraw gauss(seed);
  Field f(grid, ncomp);
  for (int c = 0; c < ncomp; ++c) {
    auto& arr = f.comp(c);
    for_each_mode(g, [&](long t, const int* idx) {
      double r2 = 0.0;
      bool keep = true;
      for (int a = 0; a < g.dim; ++a) {
        if (idx[a] == g.points[a] / 2) keep = false;
        const double xi = g.freq[a][idx[a]];
        if (std::abs(xi) > xi_axis_max[a]) keep = false;
        r2 += xi * xi;
      }
      if (!keep) return;
      const double w = std::pow(1.0 + r2, -0.5 * decay);
      arr[t] = w * cplx(gauss(), gauss());
    });
    CVec sym = arr;
    for_each_mode(g, [&](long t, const int* idx) {
      const long tc = g.conjugate_index(idx);
      sym[t] = 0.5 * (arr[t] + std::conj(arr[tc]));
    });
    arr = sym;
  }
  f.set_real_symmetric(true);
  return f;
}

}  // namespace eplab

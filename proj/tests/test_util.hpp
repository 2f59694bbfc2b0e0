#pragma once
// Shared helpers for the test suite: oracle-side constructions that avoid the
// library's own fast paths wherever a slow independent route exists.

#include <complex>
#include <random>
#include <vector>

#include "eplab/field.hpp"
#include "eplab/grid.hpp"

namespace test_util {

using eplab::cplx;
using eplab::CVec;
using eplab::Field;
using eplab::Grid;
using eplab::GridPtr;
using eplab::RVec;

// Direct O(N^2) discrete Fourier transform with the library's normalization
// (forward divides by the sample count). Small grids only.
inline CVec dft_oracle(const Grid& g, const RVec& samples) {
  CVec out(g.total, cplx(0.0, 0.0));
  std::vector<int> kidx(g.dim, 0), xidx(g.dim, 0);
  eplab::for_each_mode(g, [&](long tk, const int* ki) {
    cplx acc(0.0, 0.0);
    eplab::for_each_mode(g, [&](long tx, const int* xi) {
      double phase = 0.0;
      for (int a = 0; a < g.dim; ++a)
        phase -= 2.0 * M_PI * static_cast<double>(ki[a]) * xi[a] / g.points[a];
      acc += samples[tx] * std::polar(1.0, phase);
    });
    out[tk] = acc / static_cast<double>(g.total);
  });
  return out;
}

// Exact (non-cyclic) convolution of two spectra; entries that would fall
// outside the lattice are dropped, so for factors band-limited to a third of
// the lattice this is the aliasing-free product spectrum.
inline CVec convolve_oracle(const Grid& g, const CVec& a, const CVec& b) {
  CVec out(g.total, cplx(0.0, 0.0));
  std::vector<int> sum(g.dim, 0);
  eplab::for_each_mode(g, [&](long ta, const int* ia) {
    if (std::abs(a[ta]) == 0.0) return;
    eplab::for_each_mode(g, [&](long tb, const int* ib) {
      if (std::abs(b[tb]) == 0.0) return;
      long tout = 0;
      for (int d = 0; d < g.dim; ++d) {
        const int ma = g.mode[d][ia[d]];
        const int mb = g.mode[d][ib[d]];
        const int m = ma + mb;
        if (m < -g.points[d] / 2 || m >= g.points[d] / 2) return;  // dropped, not wrapped
        const int t = m >= 0 ? m : m + g.points[d];
        tout += g.stride[d] * t;
      }
      out[tout] += a[ta] * b[tb];
    });
  });
  return out;
}

// Random real field with spectrum confined to |n_i| <= band per axis and an
// algebraic decay, built directly in coefficient space with explicit
// Hermitian symmetrization.
inline Field random_band_field(const GridPtr& grid, int ncomp, int band, unsigned long seed,
                               double decay = 2.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Grid& g = *grid;
  Field f(grid, ncomp);
  for (int c = 0; c < ncomp; ++c) {
    auto& arr = f.comp(c);
    eplab::for_each_mode(g, [&](long t, const int* idx) {
      double n2 = 0.0;
      bool keep = true;
      for (int a = 0; a < g.dim; ++a) {
        const int m = g.mode[a][idx[a]];
        if (std::abs(m) > band || idx[a] == g.points[a] / 2) keep = false;
        n2 += static_cast<double>(m) * m;
      }
      if (!keep) return;
      const double w = std::pow(1.0 + n2, -0.5 * decay);
      arr[t] = w * cplx(gauss(rng), gauss(rng));
    });
    // Symmetrize: c(-k) = conj(c(k)).
    CVec sym = arr;
    eplab::for_each_mode(g, [&](long t, const int* idx) {
      const long tc = g.conjugate_index(idx);
      sym[t] = 0.5 * (arr[t] + std::conj(arr[tc]));
    });
    arr = sym;
  }
  f.set_real_symmetric(true);
  return f;
}

// Samples of a product of cosine modes, for analytic cross-checks.
inline RVec sampled(const Grid& g, const std::function<double(const std::vector<double>&)>& fn) {
  RVec out(g.total);
  std::vector<double> x(g.dim);
  eplab::for_each_mode(g, [&](long t, const int* idx) {
    for (int a = 0; a < g.dim; ++a) x[a] = g.spacing[a] * idx[a];
    out[t] = fn(x);
  });
  return out;
}

}  // namespace test_util

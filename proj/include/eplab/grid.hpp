#pragma once
// Periodic anisotropic sampling grids and their frequency lattices.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace eplab {

class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Periodic box [0,L_1) x ... x [0,L_d) sampled on N_1 x ... x N_d points.
// Spectral storage is row-major with axis 0 slowest (FFTW layout); the
// frequency at storage index t along axis i is (2*pi/L_i) * n with
// n = t for t < N_i/2 and n = t - N_i otherwise.
struct Grid {
  int dim = 0;
  std::vector<int> points;
  std::vector<double> lengths;

  std::vector<double> spacing;    // physical sample spacing L_i/N_i
  std::vector<double> freq_step;  // frequency lattice spacing 2*pi/L_i
  std::vector<double> nyquist;    // pi*N_i/L_i
  std::vector<long> stride;       // row-major strides
  long total = 0;
  double volume = 1.0;
  double cell_volume = 1.0;
  std::vector<std::vector<double>> freq;        // signed frequency by storage index
  std::vector<std::vector<double>> deriv_freq;  // as freq, but Nyquist zeroed
  std::vector<std::vector<int>> mode;           // signed integer mode by storage index

  bool same_layout(const Grid& o) const {
    return points == o.points && lengths == o.lengths;
  }

  // Largest |xi| representable on the lattice (the corner mode).
  double corner_radius() const {
    double s = 0.0;
    for (double v : nyquist) s += v * v;
    return std::sqrt(s);
  }

  // Storage index of the mode conjugate to the one at per-axis indices idx.
  long conjugate_index(const int* idx) const {
    long t = 0;
    for (int a = 0; a < dim; ++a) {
      const int ic = idx[a] == 0 ? 0 : points[a] - idx[a];
      t += stride[a] * ic;
    }
    return t;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(const std::vector<int>& points, const std::vector<double>& lengths) {
  if (points.empty() || points.size() != lengths.size())
    throw error("make_grid: points and lengths must be non-empty and equally sized");
  auto g = std::make_shared<Grid>();
  g->dim = static_cast<int>(points.size());
  g->points = points;
  g->lengths = lengths;
  g->total = 1;
  g->volume = 1.0;
  for (int a = 0; a < g->dim; ++a) {
    const int n = points[a];
    const double len = lengths[a];
    if (n < 4 || (n & 1) != 0 || (n & (n - 1)) != 0)
      throw error("make_grid: point counts must be powers of two and at least 4");
    if (!(len > 0.0) || !std::isfinite(len))
      throw error("make_grid: box lengths must be positive and finite");
    g->spacing.push_back(len / n);
    g->freq_step.push_back(2.0 * M_PI / len);
    g->nyquist.push_back(M_PI * n / len);
    g->total *= n;
    g->volume *= len;
  }
  g->cell_volume = g->volume / static_cast<double>(g->total);
  g->stride.assign(g->dim, 1);
  for (int a = g->dim - 2; a >= 0; --a) g->stride[a] = g->stride[a + 1] * points[a + 1];
  g->freq.resize(g->dim);
  g->deriv_freq.resize(g->dim);
  g->mode.resize(g->dim);
  for (int a = 0; a < g->dim; ++a) {
    const int n = points[a];
    g->freq[a].resize(n);
    g->deriv_freq[a].resize(n);
    g->mode[a].resize(n);
    for (int t = 0; t < n; ++t) {
      const int m = t < n / 2 ? t : t - n;
      g->mode[a][t] = m;
      g->freq[a][t] = g->freq_step[a] * m;
      // The unpaired Nyquist mode carries no usable odd-derivative phase.
      g->deriv_freq[a][t] = (t == n / 2) ? 0.0 : g->freq[a][t];
    }
  }
  return g;
}

// Visits every lattice site in storage order; fn(linear_index, per_axis_indices).
template <class Fn>
inline void for_each_mode(const Grid& g, Fn&& fn) {
  std::vector<int> idx(g.dim, 0);
  for (long t = 0; t < g.total; ++t) {
    fn(t, idx.data());
    for (int a = g.dim - 1; a >= 0; --a) {
      if (++idx[a] < g.points[a]) break;
      idx[a] = 0;
    }
  }
}

}  // namespace eplab

#pragma once
// Smooth radial dyadic cutoffs on the frequency lattice.
//
// chi is 1 on |xi| <= 3/4 and 0 on |xi| >= 4/3 with a C^inf bump-quotient
// transition; phi(xi) = chi(xi/2) - chi(xi) is supported in 3/4 <= |xi| <= 8/3
// and equals 1 on 4/3 <= |xi| <= 3/2. The telescoping sum
// chi(xi) + sum_{j>=0} phi(2^-j xi) equals 1 on the whole lattice.

#include <cmath>
#include <vector>

#include "eplab/field.hpp"
#include "eplab/grid.hpp"

namespace eplab {

// C^inf step: 0 for t <= 0, 1 for t >= 1, strictly increasing between.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

inline double chi_profile(double r) {
  r = std::abs(r);
  if (r <= 0.75) return 1.0;
  if (r >= 4.0 / 3.0) return 0.0;
  return 1.0 - smooth_step((r - 0.75) / (4.0 / 3.0 - 0.75));
}

inline double phi_profile(double r) { return chi_profile(0.5 * r) - chi_profile(r); }

// Grid-bound realization of the cutoffs: the radius of every lattice mode,
// the per-block multiplier tables, and the largest block index with lattice
// support; blocks above j_max vanish identically on this grid.
class ChiPhi {
 public:
  explicit ChiPhi(GridPtr grid) : grid_(std::move(grid)) {
    const Grid& g = *grid_;
    for (int a = 0; a < g.dim; ++a)
      if (g.freq_step[a] > 0.25)
        throw error("build_chi_phi: frequency lattice spacing exceeds 1/4; "
                    "the transition band of chi is unresolved");
    radius_.resize(g.total);
    for_each_mode(g, [&](long t, const int* idx) {
      double r2 = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        const double k = g.freq[a][idx[a]];
        r2 += k * k;
      }
      radius_[t] = std::sqrt(r2);
    });
    j_max_ = std::max(-1, static_cast<int>(std::floor(std::log2(g.corner_radius() / 0.75))));
    block_mult_.resize(j_max_ + 2);
    for (int j = -1; j <= j_max_; ++j) {
      auto& m = block_mult_[j + 1];
      m.resize(g.total);
      const double scale = j < 0 ? 1.0 : std::ldexp(1.0, -j);
      for (long t = 0; t < g.total; ++t)
        m[t] = j < 0 ? chi_profile(radius_[t]) : phi_profile(scale * radius_[t]);
    }
    partition_residual_ = 0.0;
    for (long t = 0; t < grid_->total; ++t) {
      double s = 0.0;
      for (const auto& m : block_mult_) s += m[t];
      partition_residual_ = std::max(partition_residual_, std::abs(s - 1.0));
    }
  }

  const GridPtr& grid() const { return grid_; }
  int j_max() const { return j_max_; }
  double partition_residual() const { return partition_residual_; }
  const RVec& radius() const { return radius_; }
  // Multiplier table of block j (j = -1 is the chi ball); empty above j_max.
  const RVec& block_multiplier(int j) const { return block_mult_[j + 1]; }

  void check_grid(const Field& f, const char* who) const {
    if (!f.grid()->same_layout(*grid_)) throw error(std::string(who) + ": mismatched grids");
  }

 private:
  GridPtr grid_;
  int j_max_ = -1;
  double partition_residual_ = 0.0;
  RVec radius_;
  std::vector<RVec> block_mult_;
};

inline ChiPhi build_chi_phi(GridPtr grid) { return ChiPhi(std::move(grid)); }

}  // namespace eplab

#pragma once
// Dyadic block decomposition and Besov norms over the truncated scale range,
// plus the Bernstein and interpolation inequality checkers.
//
// Block convention: Delta_j = 0 for j <= -2, Delta_{-1} = chi(D),
// Delta_j = phi(2^-j D) for j >= 0; S_n = chi(2^-n D) = sum_{j<=n-1} Delta_j.
// Norms sum j = -1 .. j_max only; blocks above j_max vanish on the lattice.

#include <cmath>
#include <limits>
#include <vector>

#include "eplab/chi_phi.hpp"
#include "eplab/field.hpp"

namespace eplab {

struct BesovIndex {
  double s = 0.0;
  double p = 2.0;
  double r = 2.0;

  BesovIndex(double s_, double p_, double r_) : s(s_), p(p_), r(r_) {
    if (!(p > 1.0) || std::isinf(p)) throw error("BesovIndex: p must lie in (1, inf)");
    if (!(r >= 1.0) || std::isinf(r)) throw error("BesovIndex: r must lie in [1, inf)");
    if (!std::isfinite(s)) throw error("BesovIndex: s must be finite");
  }

  // Regularity window of the well-posedness result being probed.
  bool meets_wellposed_range(int dim) const {
    return s > 2.0 + std::max(1.0 + dim / p, 1.5);
  }
  // Weaker diagnostic window.
  bool meets_weak_range(int dim) const { return s > std::max(1.0 + 0.5 * dim, 1.5); }
};

inline Field dyadic_block(const Field& f, int j, const ChiPhi& cp) {
  cp.check_grid(f, "dyadic_block");
  if (j <= -2 || j > cp.j_max()) {
    Field zero(f.grid(), f.ncomp(), f.real_symmetric());
    return zero;
  }
  const RVec& m = cp.block_multiplier(j);
  Field out = f;
  for (int c = 0; c < out.ncomp(); ++c) {
    auto& arr = out.comp(c);
    for (long t = 0; t < f.grid()->total; ++t) arr[t] *= m[t];
  }
  return out;
}

// S_n f = chi(2^-n D) f, the low-frequency part below scale 2^n.
inline Field low_freq_truncate(const Field& f, int n, const ChiPhi& cp) {
  cp.check_grid(f, "low_freq_truncate");
  const double scale = std::ldexp(1.0, -n);
  const RVec& r = cp.radius();
  Field out = f;
  for (int c = 0; c < out.ncomp(); ++c) {
    auto& arr = out.comp(c);
    for (long t = 0; t < f.grid()->total; ++t) arr[t] *= chi_profile(scale * r[t]);
  }
  return out;
}

inline Field high_freq_tail(const Field& f, int n, const ChiPhi& cp) {
  return f - low_freq_truncate(f, n, cp);
}

struct BlockDecomposition {
  int j_min = -1;
  std::vector<Field> blocks;  // index j - j_min

  Field reconstruct() const {
    Field sum = blocks.front();
    for (std::size_t i = 1; i < blocks.size(); ++i) sum += blocks[i];
    return sum;
  }
};

inline BlockDecomposition decompose(const Field& f, const ChiPhi& cp) {
  BlockDecomposition out;
  for (int j = -1; j <= cp.j_max(); ++j) out.blocks.push_back(dyadic_block(f, j, cp));
  return out;
}

struct BesovProfile {
  double value = 0.0;
  std::vector<double> summands;  // 2^{sj} ||Delta_j f||_p for j = -1 .. j_max
};

namespace detail {

inline BesovProfile besov_core(const Field& f, double s, double p, double r, const ChiPhi& cp) {
  cp.check_grid(f, "besov_norm");
  if (!(p > 1.0) || std::isinf(p)) throw error("besov_norm: p must lie in (1, inf)");
  BesovProfile out;
  for (int j = -1; j <= cp.j_max(); ++j) {
    const double block = lp_norm(dyadic_block(f, j, cp), p);
    out.summands.push_back(block * std::pow(2.0, s * j));
  }
  if (std::isinf(r)) {
    for (double a : out.summands) out.value = std::max(out.value, a);
  } else {
    double acc = 0.0;
    for (double a : out.summands) acc += std::pow(a, r);
    out.value = std::pow(acc, 1.0 / r);
  }
  return out;
}

}  // namespace detail

inline BesovProfile besov_profile(const Field& f, const BesovIndex& idx, const ChiPhi& cp) {
  return detail::besov_core(f, idx.s, idx.p, idx.r, cp);
}

inline double besov_norm(const Field& f, const BesovIndex& idx, const ChiPhi& cp) {
  return besov_profile(f, idx, cp).value;
}

// r = infinity variant (sup over blocks), offered for diagnostics only.
inline double besov_sup_norm(const Field& f, double s, double p, const ChiPhi& cp) {
  return detail::besov_core(f, s, p, std::numeric_limits<double>::infinity(), cp).value;
}

// -- Bernstein ----------------------------------------------------------------

enum class SpectralRegion { ball, annulus };

struct BernsteinCheck {
  double ratio = 0.0;         // ||D^k f||_q / (lambda^{k + d/p - d/q} ||f||_p)
  double support_leak = 0.0;  // relative coefficient energy outside the region
};

namespace detail {

inline void multi_indices(int dim, int order, std::vector<int>& cur, int axis,
                          std::vector<std::vector<int>>& out) {
  if (axis == dim - 1) {
    cur[axis] = order;
    out.push_back(cur);
    return;
  }
  for (int take = 0; take <= order; ++take) {
    cur[axis] = take;
    multi_indices(dim, order - take, cur, axis + 1, out);
  }
}

// sup_{|alpha| = k} ||d^alpha f||_q  (k = 0 gives ||f||_q).
inline double dk_norm(const Field& f, int k, double q) {
  if (k == 0) return lp_norm(f, q);
  const Grid& g = *f.grid();
  std::vector<std::vector<int>> alphas;
  std::vector<int> cur(g.dim, 0);
  multi_indices(g.dim, k, cur, 0, alphas);
  double best = 0.0;
  for (const auto& alpha : alphas) {
    Field df = f;
    for (int c = 0; c < df.ncomp(); ++c) {
      auto& arr = df.comp(c);
      for_each_mode(g, [&](long t, const int* idx) {
        cplx m(1.0, 0.0);
        for (int a = 0; a < g.dim; ++a)
          for (int rep = 0; rep < alpha[a]; ++rep) m *= cplx(0.0, g.deriv_freq[a][idx[a]]);
        arr[t] *= m;
      });
    }
    best = std::max(best, lp_norm(df, q));
  }
  return best;
}

}  // namespace detail

inline BernsteinCheck check_bernstein(const Field& f, SpectralRegion region, double lambda,
                                      int k, double p, double q) {
  if (!(lambda > 0.0)) throw error("check_bernstein: lambda must be positive");
  if (k < 0) throw error("check_bernstein: derivative order must be non-negative");
  const bool ball = region == SpectralRegion::ball;
  if (ball && q < p) throw error("check_bernstein: ball case needs p <= q");
  if (!ball && q != p) throw error("check_bernstein: annulus case is stated for q = p");

  const Grid& g = *f.grid();
  double inside = 0.0, outside = 0.0;
  for (int c = 0; c < f.ncomp(); ++c) {
    const auto& arr = f.comp(c);
    for_each_mode(g, [&](long t, const int* idx) {
      double r2 = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        const double kk = g.freq[a][idx[a]];
        r2 += kk * kk;
      }
      const double r = std::sqrt(r2);
      const bool in = ball ? (r <= lambda * 4.0 / 3.0)
                           : (r >= lambda * 0.75 && r <= lambda * 8.0 / 3.0);
      (in ? inside : outside) += std::norm(arr[t]);
    });
  }
  BernsteinCheck out;
  const double total = inside + outside;
  out.support_leak = total > 0.0 ? outside / total : 0.0;
  if (out.support_leak > 1e-10)
    throw error("check_bernstein: field is not supported in the stated region");

  const double fnorm = lp_norm(f, p);
  const double dk = detail::dk_norm(f, k, ball ? q : p);
  const double dinv = static_cast<double>(g.dim);
  const double expo = ball ? k + dinv / p - dinv / q : static_cast<double>(k);
  out.ratio = dk / (std::pow(lambda, expo) * fnorm);
  return out;
}

// -- interpolation ------------------------------------------------------------

struct InterpolationCheck {
  double ratio_first = 0.0;    // vs the constant-1 inequality
  double fitted_second = 0.0;  // fitted constant of the B_{p,1} endpoint bound
  bool zero_field = false;     // 0/0 resolved as pass-by-convention
};

inline InterpolationCheck check_interpolation(const Field& f, double s1, double s2,
                                              double theta, double p, double r,
                                              const ChiPhi& cp) {
  if (!(s1 < s2)) throw error("check_interpolation: needs s1 < s2");
  if (!(theta > 0.0 && theta < 1.0)) throw error("check_interpolation: theta must lie in (0,1)");
  const double smid = theta * s1 + (1.0 - theta) * s2;
  InterpolationCheck out;
  const double n1 = detail::besov_core(f, s1, p, r, cp).value;
  const double n2 = detail::besov_core(f, s2, p, r, cp).value;
  const double nm = detail::besov_core(f, smid, p, r, cp).value;
  if (n1 == 0.0 || n2 == 0.0) {
    out.zero_field = true;
    return out;
  }
  out.ratio_first = nm / (std::pow(n1, theta) * std::pow(n2, 1.0 - theta));

  const double inf = std::numeric_limits<double>::infinity();
  const double w1 = detail::besov_core(f, s1, p, inf, cp).value;
  const double w2 = detail::besov_core(f, s2, p, inf, cp).value;
  const double lhs = detail::besov_core(f, smid, p, 1.0, cp).value;
  const double shape = (1.0 / theta + 1.0 / (1.0 - theta)) / (s2 - s1);
  out.fitted_second = lhs / (shape * std::pow(w1, theta) * std::pow(w2, 1.0 - theta));
  return out;
}

}  // namespace eplab

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eplab/besov.hpp"
#include "eplab/chi_phi.hpp"
#include "test_util.hpp"

using namespace eplab;
using test_util::random_band_field;
using test_util::sampled;

namespace {
GridPtr unit_grid() { return make_grid({1024}, {2.0 * M_PI * 8.0}); }
}  // namespace

TEST_CASE("smooth step endpoints and monotonicity") {
  CHECK(smooth_step(-1.0) == 0.0);
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(2.0) == 1.0);
  CHECK(smooth_step(0.5) == Catch::Approx(0.5).margin(1e-14));
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = smooth_step(i / 100.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("chi and phi profile plateaus and supports") {
  CHECK(chi_profile(0.0) == 1.0);
  CHECK(chi_profile(0.5) == 1.0);
  CHECK(chi_profile(0.75) == 1.0);
  CHECK(chi_profile(4.0 / 3.0) == 0.0);
  CHECK(chi_profile(2.0) == 0.0);
  const double mid = chi_profile(1.0);
  CHECK((mid > 0.0 && mid < 1.0));

  CHECK(phi_profile(0.5) == 0.0);            // both chis are 1
  CHECK(phi_profile(0.74) == 0.0);           // below the annulus
  CHECK(phi_profile(4.0 / 3.0) == 1.0);      // plateau
  CHECK(phi_profile(1.45) == 1.0);           // plateau
  CHECK(phi_profile(1.5) == 1.0);            // plateau edge
  CHECK(phi_profile(8.0 / 3.0) == 0.0);      // upper support edge
  CHECK(phi_profile(3.0) == 0.0);
  const double rim = phi_profile(1.0);
  CHECK((rim > 0.0 && rim < 1.0));
}

TEST_CASE("partition of unity on the lattice") {
  auto cp = build_chi_phi(make_grid({128, 32}, {40.0, 30.0}));
  CHECK(cp.partition_residual() < 1e-10);

  auto cp2 = build_chi_phi(make_grid({4096, 64}, {64.0, 64.0}));
  CHECK(cp2.partition_residual() < 1e-10);
  CHECK(cp2.j_max() == 8);  // corner radius just above 201 -> floor(log2(268.1))

  auto cp3 = build_chi_phi(make_grid({256, 256}, {2.0 * M_PI * 10.0, 2.0 * M_PI * 10.0}));
  CHECK(cp3.j_max() == 4);
}

TEST_CASE("chi transition needs a resolved frequency lattice") {
  CHECK_THROWS_AS(build_chi_phi(make_grid({64}, {16.0})), error);  // spacing 0.39 > 1/4
  CHECK_NOTHROW(build_chi_phi(make_grid({64}, {32.0})));           // spacing 0.196
}

TEST_CASE("blocks vanish for j <= -2 and reconstruct the field") {
  auto g = unit_grid();
  auto cp = build_chi_phi(g);
  Field f = random_band_field(g, 1, 80, 17);
  CHECK(max_abs(dyadic_block(f, -2, cp)) == 0.0);
  CHECK(max_abs(dyadic_block(f, -7, cp)) == 0.0);

  BlockDecomposition dec = decompose(f, cp);
  CHECK(max_abs_diff(dec.reconstruct(), f) < 1e-10 * std::max(1.0, max_abs(f)));
}

TEST_CASE("blocks with distant indices are orthogonal") {
  auto g = unit_grid();
  auto cp = build_chi_phi(g);
  Field f = random_band_field(g, 1, 80, 23);
  for (int j = -1; j <= cp.j_max(); ++j) {
    for (int jp = j + 2; jp <= cp.j_max(); ++jp) {
      Field twice = dyadic_block(dyadic_block(f, jp, cp), j, cp);
      CHECK(max_abs(twice) < 1e-12 * std::max(1.0, max_abs(f)));
    }
  }
  // Adjacent blocks overlap: pick one pair and confirm the product is nonzero.
  Field adj = dyadic_block(dyadic_block(f, 3, cp), 2, cp);
  CHECK(max_abs(adj) > 1e-10);
}

TEST_CASE("low-frequency truncation is the partial block sum") {
  auto g = unit_grid();
  auto cp = build_chi_phi(g);
  Field f = random_band_field(g, 1, 80, 29);
  for (int n : {0, 2, 5}) {
    Field sn = low_freq_truncate(f, n, cp);
    Field sum = dyadic_block(f, -1, cp);
    for (int j = 0; j <= n - 1; ++j) sum += dyadic_block(f, j, cp);
    CHECK(max_abs_diff(sn, sum) < 1e-10 * std::max(1.0, max_abs(f)));
  }
  // Far above the lattice corner, truncation is the identity.
  Field all = low_freq_truncate(f, cp.j_max() + 2, cp);
  CHECK(max_abs_diff(all, f) < 1e-12 * std::max(1.0, max_abs(f)));
  // The mean survives every truncation at n >= 0.
  Field c = transform(g, sampled(*g, [](const std::vector<double>&) { return 3.0; }));
  CHECK(max_abs_diff(c, low_freq_truncate(c, 0, cp)) < 1e-13);
}

TEST_CASE("high-frequency tails shrink monotonically") {
  auto g = unit_grid();
  auto cp = build_chi_phi(g);
  BesovIndex idx(2.5, 2.0, 2.0);
  Field f = random_band_field(g, 1, 80, 31, 1.2);
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= cp.j_max(); ++n) {
    const double tail = besov_norm(high_freq_tail(f, n, cp), idx, cp);
    CHECK(tail <= prev * (1.0 + 1e-12));
    prev = tail;
  }
}

TEST_CASE("besov norm of single and double cosine modes") {
  auto g = unit_grid();
  auto cp = build_chi_phi(g);
  // |k| = 11 lies in [4/3, 3/2] * 2^3, so the profile has one entry at j = 3.
  Field f = transform(g, sampled(*g, [](const std::vector<double>& x) { return std::cos(11.0 * x[0]); }));
  const double l2 = std::sqrt(0.5 * g->volume);
  for (double r : {1.0, 1.5, 2.0}) {
    BesovIndex idx(1.7, 2.0, r);
    BesovProfile prof = besov_profile(f, idx, cp);
    CHECK(prof.value == Catch::Approx(std::pow(2.0, 3 * idx.s) * l2).epsilon(1e-10));
    for (int j = -1; j <= cp.j_max(); ++j)
      if (j != 3) CHECK(prof.summands[j + 1] < 1e-10);
  }
  // Two isolated blocks: the r-sum is exercised nontrivially.
  Field f2 = transform(g, sampled(*g, [](const std::vector<double>& x) {
    return std::cos(11.0 * x[0]) + std::cos(43.0 * x[0]);
  }));
  BesovIndex idx(1.3, 2.0, 1.5);
  const double a3 = std::pow(2.0, 3 * idx.s) * l2;  // same L2 norm per isolated mode
  const double a5 = std::pow(2.0, 5 * idx.s) * l2;
  const double want = std::pow(std::pow(a3, idx.r) + std::pow(a5, idx.r), 1.0 / idx.r);
  CHECK(besov_norm(f2, idx, cp) == Catch::Approx(want).epsilon(1e-10));
  // Diagnostic sup variant.
  CHECK(besov_sup_norm(f2, idx.s, 2.0, cp) == Catch::Approx(std::max(a3, a5)).epsilon(1e-10));
}

TEST_CASE("besov norm is translation invariant") {
  auto g = make_grid({128, 32}, {40.0, 30.0});
  auto cp = build_chi_phi(g);
  Field f = random_band_field(g, 2, 9, 37);
  BesovIndex idx(3.1, 2.0, 2.0);
  const double base = besov_norm(f, idx, cp);
  CHECK(std::abs(besov_norm(translate(f, {1.234, 0.567}), idx, cp) - base) < 1e-9 * base);
  BesovIndex idxq(3.1, 2.5, 1.0);
  const double baseq = besov_norm(f, idxq, cp);
  Field gridshift = translate(f, {7.0 * g->spacing[0], 3.0 * g->spacing[1]});
  CHECK(std::abs(besov_norm(gridshift, idxq, cp) - baseq) < 1e-9 * baseq);
}

TEST_CASE("besov index validation and admissibility windows") {
  CHECK_THROWS_AS(BesovIndex(2.0, 1.0, 2.0), error);
  CHECK_THROWS_AS(BesovIndex(2.0, std::numeric_limits<double>::infinity(), 2.0), error);
  CHECK_THROWS_AS(BesovIndex(2.0, 2.0, 0.5), error);
  CHECK_THROWS_AS(BesovIndex(2.0, 2.0, std::numeric_limits<double>::infinity()), error);

  BesovIndex good(4.5, 2.0, 2.0);
  CHECK(good.meets_wellposed_range(2));
  CHECK(good.meets_weak_range(2));
  BesovIndex low(3.9, 2.0, 2.0);
  CHECK_FALSE(low.meets_wellposed_range(2));  // needs s > 4 for d = 2, p = 2
  CHECK(low.meets_weak_range(2));
  BesovIndex verylow(1.9, 2.0, 2.0);
  CHECK_FALSE(verylow.meets_weak_range(2));
}

TEST_CASE("besov norm rejects mismatched grids") {
  auto g = unit_grid();
  auto g2 = make_grid({128}, {2.0 * M_PI * 8.0});
  auto cp = build_chi_phi(g);
  Field f = random_band_field(g2, 1, 10, 3);
  CHECK_THROWS_AS(besov_norm(f, BesovIndex(2.0, 2.0, 2.0), cp), error);
}

TEST_CASE("bernstein: closed-form cases") {
  auto g = unit_grid();
  // Single mode |k0| = 11, ball lambda = 10 (radius 13.3 covers it).
  Field f = transform(g, sampled(*g, [](const std::vector<double>& x) { return std::cos(11.0 * x[0]); }));
  BernsteinCheck ball = check_bernstein(f, SpectralRegion::ball, 10.0, 1, 2.0, 2.0);
  CHECK(ball.ratio == Catch::Approx(1.1).epsilon(1e-10));
  CHECK(ball.support_leak < 1e-12);

  // Constant field: k = 0, p = q gives ratio exactly 1 for any lambda.
  Field c = transform(g, sampled(*g, [](const std::vector<double>&) { return 2.0; }));
  for (double lambda : {0.01, 1.0, 50.0}) {
    BernsteinCheck bc = check_bernstein(c, SpectralRegion::ball, lambda, 0, 2.0, 2.0);
    CHECK(bc.ratio == Catch::Approx(1.0).epsilon(1e-12));
  }

  // Annulus two-sided ratio for a shell-supported field stays inside the shell bounds.
  Field shell = transform(g, sampled(*g, [](const std::vector<double>& x) {
    return std::cos(9.0 * x[0]) + 0.5 * std::sin(13.0 * x[0]);
  }));
  BernsteinCheck ann = check_bernstein(shell, SpectralRegion::annulus, 8.0, 1, 2.0, 2.0);
  CHECK(ann.ratio >= 0.75);
  CHECK(ann.ratio <= 8.0 / 3.0);

  // Support violation is an error.
  CHECK_THROWS_AS(check_bernstein(f, SpectralRegion::annulus, 1.0, 1, 2.0, 2.0), error);
  // Ball case requires p <= q.
  CHECK_THROWS_AS(check_bernstein(f, SpectralRegion::ball, 10.0, 1, 3.0, 2.0), error);
}

TEST_CASE("bernstein: ball case p < q sweep stays bounded") {
  auto g = make_grid({256, 256}, {2.0 * M_PI * 8.0, 2.0 * M_PI * 8.0});
  double worst = 0.0;
  for (unsigned long seed : {1ul, 2ul, 3ul}) {
    Field f = random_band_field(g, 2, 6, seed);
    // Band 6 modes on this box live inside |xi| <= 6/8 * sqrt(2) < 4/3 * 1.
    BernsteinCheck bc = check_bernstein(f, SpectralRegion::ball, 1.0, 1, 2.0,
                                        std::numeric_limits<double>::infinity());
    worst = std::max(worst, bc.ratio);
  }
  CHECK(worst < 50.0);
  CHECK(worst > 0.0);
}

TEST_CASE("interpolation: constant-one inequality") {
  auto g = unit_grid();
  auto cp = build_chi_phi(g);

  Field f = random_band_field(g, 1, 70, 41, 1.0);
  for (double theta : {0.25, 0.5, 0.9}) {
    for (double r : {1.0, 2.0}) {
      InterpolationCheck ic = check_interpolation(f, 1.0, 3.0, theta, 2.0, r, cp);
      CHECK_FALSE(ic.zero_field);
      CHECK(ic.ratio_first <= 1.0 + 1e-10);
      CHECK(ic.fitted_second > 0.0);
      CHECK(std::isfinite(ic.fitted_second));
    }
  }

  // A single-block field makes the first inequality an equality.
  Field mono = transform(g, sampled(*g, [](const std::vector<double>& x) { return std::cos(11.0 * x[0]); }));
  InterpolationCheck eq = check_interpolation(mono, 0.5, 2.5, 0.4, 2.0, 2.0, cp);
  CHECK(eq.ratio_first == Catch::Approx(1.0).epsilon(1e-12));

  // Zero field: 0/0 resolved as pass-by-convention.
  Field zero(g, 1);
  InterpolationCheck zc = check_interpolation(zero, 1.0, 2.0, 0.5, 2.0, 2.0, cp);
  CHECK(zc.zero_field);

  CHECK_THROWS_AS(check_interpolation(f, 3.0, 1.0, 0.5, 2.0, 2.0, cp), error);
  CHECK_THROWS_AS(check_interpolation(f, 1.0, 3.0, 1.5, 2.0, 2.0, cp), error);
}

#include <cmath>

#include "avsal/metrics.hpp"
#include "avsal/rng.hpp"
#include "avsal/types.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace avsal;

namespace {

SaliencyMap random_map(Rng& rng, int h, int w) {
  SaliencyMap m{h, w, {}};
  m.values.resize(static_cast<size_t>(h) * w);
  for (auto& v : m.values) v = rng.uniform();
  return m;
}

SaliencyMap random_dist(Rng& rng, int h, int w) {
  return normalize(random_map(rng, h, w));
}

FixationFrame random_fixations(Rng& rng, int h, int w, int count) {
  FixationFrame f(h, w);
  while (static_cast<int>(f.points.size()) < count) f.add(rng.below(h), rng.below(w));
  return f;
}

}  // namespace

TEST_CASE("nss closed form on a 2x2 single-fixation map") {
  // Map [[0,0],[0,1]], fixation at the 1: mean 1/4, population sd sqrt(3)/4,
  // so the z-score is sqrt(3).
  SaliencyMap m{2, 2, {0.0, 0.0, 0.0, 1.0}};
  FixationFrame f(2, 2);
  f.add(1, 1);
  CHECK(nss(m, f) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("nss is invariant to affine rescaling of the map") {
  Rng rng(substream_seed(21, "metrics"));
  auto m = random_map(rng, 12, 10);
  auto f = random_fixations(rng, 12, 10, 9);
  double base = nss(m, f);
  auto scaled = m;
  for (auto& v : scaled.values) v = 3.7 * v + 11.0;
  CHECK(nss(scaled, f) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("nss rejects constant maps and empty fixations") {
  SaliencyMap flat{2, 2, {0.5, 0.5, 0.5, 0.5}};
  FixationFrame f(2, 2);
  f.add(0, 0);
  try {
    nss(flat, f);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::zero_variance);
  }
  SaliencyMap m{2, 2, {0.0, 0.0, 0.0, 1.0}};
  FixationFrame empty(2, 2);
  try {
    nss(m, empty);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_fixations);
  }
}

TEST_CASE("nss matches the direct oracle on random instances") {
  Rng rng(substream_seed(22, "metrics"));
  for (int it = 0; it < 20; ++it) {
    auto m = random_map(rng, 8, 14);
    auto f = random_fixations(rng, 8, 14, 1 + rng.below(20));
    CHECK(nss(m, f) == doctest::Approx(oracle::nss_direct(m, f)).epsilon(1e-12));
  }
}

TEST_CASE("cc basics: self correlation 1, anti correlation -1") {
  Rng rng(substream_seed(23, "metrics"));
  auto a = random_map(rng, 6, 7);
  CHECK(cc(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  auto b = a;
  for (auto& v : b.values) v = -2.0 * v + 5.0;
  CHECK(cc(a, b) == doctest::Approx(-1.0).epsilon(1e-12));
  auto c = random_map(rng, 6, 7);
  CHECK(cc(a, c) == doctest::Approx(oracle::cc_direct(a, c)).epsilon(1e-12));
  CHECK(cc(a, c) == doctest::Approx(cc(c, a)).epsilon(1e-15));
}

TEST_CASE("cc rejects constant inputs and shape mismatch") {
  SaliencyMap flat{2, 2, {1.0, 1.0, 1.0, 1.0}};
  SaliencyMap var{2, 2, {0.0, 1.0, 2.0, 3.0}};
  CHECK_THROWS_AS(cc(flat, var), Error);
  SaliencyMap other{2, 3, {0, 1, 2, 3, 4, 5}};
  CHECK_THROWS_AS(cc(var, other), Error);
}

TEST_CASE("sim: identical distributions score 1, disjoint score 0") {
  Rng rng(substream_seed(24, "metrics"));
  auto a = random_dist(rng, 5, 9);
  CHECK(sim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  SaliencyMap left{1, 4, {0.5, 0.5, 0.0, 0.0}};
  SaliencyMap right{1, 4, {0.0, 0.0, 0.5, 0.5}};
  CHECK(sim(left, right) == 0.0);
  auto b = random_dist(rng, 5, 9);
  CHECK(sim(a, b) == doctest::Approx(oracle::sim_direct(a, b)).epsilon(1e-12));
  CHECK(sim(a, b) == doctest::Approx(sim(b, a)).epsilon(1e-15));
  CHECK(sim(a, b) >= 0.0);
  CHECK(sim(a, b) <= 1.0 + 1e-12);
}

TEST_CASE("sim rejects unnormalized inputs") {
  SaliencyMap raw{1, 4, {0.5, 0.5, 0.5, 0.5}};
  SaliencyMap dist{1, 4, {0.25, 0.25, 0.25, 0.25}};
  try {
    sim(raw, dist);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unnormalized_input);
  }
}

TEST_CASE("auc_judd is exactly one half on constant maps") {
  SaliencyMap flat{4, 4, std::vector<double>(16, 0.3)};
  FixationFrame f(4, 4);
  f.add(1, 1);
  f.add(2, 3);
  CHECK(auc_judd(flat, f) == 0.5);
}

TEST_CASE("auc_judd is 1 when fixations take the top values and near 0 reversed") {
  SaliencyMap m{1, 8, {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.9, 1.0}};
  FixationFrame top(1, 8);
  top.add(0, 6);
  top.add(0, 7);
  CHECK(auc_judd(m, top) == doctest::Approx(1.0).epsilon(1e-12));
  FixationFrame bottom(1, 8);
  bottom.add(0, 0);
  bottom.add(0, 1);
  bottom.add(0, 2);
  // Fixations at the k lowest values: every threshold admits all negatives
  // (fp stays 1), so only the first trapezoid up to tp = 1/k has area.
  CHECK(auc_judd(m, bottom) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("auc_judd matches the exhaustive-threshold oracle") {
  Rng rng(substream_seed(25, "metrics"));
  for (int it = 0; it < 20; ++it) {
    auto m = random_map(rng, 7, 9);
    // Include duplicated values to exercise tie handling.
    for (auto& v : m.values) v = std::round(v * 12.0) / 12.0;
    auto f = random_fixations(rng, 7, 9, 1 + rng.below(12));
    auto neg = oracle::non_fixated_pixels(m, f.points);
    CHECK(auc_judd(m, f) == doctest::Approx(oracle::auc_exhaustive(m, f.points, neg)).epsilon(1e-9));
  }
}

TEST_CASE("auc_judd is invariant under monotone transforms") {
  Rng rng(substream_seed(26, "metrics"));
  auto m = random_map(rng, 6, 11);
  auto f = random_fixations(rng, 6, 11, 7);
  double base = auc_judd(m, f);
  auto warped = m;
  for (auto& v : warped.values) v = std::exp(2.0 * v);
  CHECK(auc_judd(warped, f) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("sauc scores against supplied negatives and removes coincidences") {
  Rng rng(substream_seed(27, "metrics"));
  auto m = random_map(rng, 9, 9);
  auto f = random_fixations(rng, 9, 9, 6);
  FixationFrame negatives(9, 9);
  for (int i = 0; i < 40; ++i) negatives.add(static_cast<int>(rng.below(9)), static_cast<int>(rng.below(9)));
  // Inject exact coincidences with the positives; they must be dropped.
  negatives.add(f.points[0].y, f.points[0].x);
  negatives.add(f.points[1].y, f.points[1].x);
  std::vector<Point> clean;
  for (const auto& p : negatives.points) {
    bool hit = false;
    for (const auto& q : f.points)
      if (p == q) hit = true;
    if (!hit) clean.push_back(p);
  }
  CHECK(sauc(m, f, negatives) ==
        doctest::Approx(oracle::auc_exhaustive(m, f.points, clean)).epsilon(1e-9));
}

TEST_CASE("sauc rejects empty or fully coincident negative sets") {
  SaliencyMap m{2, 2, {0.0, 0.25, 0.5, 1.0}};
  FixationFrame f(2, 2);
  f.add(0, 0);
  try {
    sauc(m, f, FixationFrame(2, 2));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_negatives);
  }
  FixationFrame coincident(2, 2);
  coincident.add(0, 0);
  CHECK_THROWS_AS(sauc(m, f, coincident), Error);
}

TEST_CASE("sauc is 1 when positives rank strictly above all negatives") {
  SaliencyMap m{1, 6, {0.0, 0.1, 0.2, 0.3, 0.8, 0.9}};
  FixationFrame f(1, 6);
  f.add(0, 4);
  f.add(0, 5);
  FixationFrame neg(1, 6);
  neg.add(0, 0);
  neg.add(0, 1);
  neg.add(0, 2);
  CHECK(sauc(m, f, neg) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("central fixations with central negatives neutralize center bias") {
  // A pure center-bias map scores well on centrally clustered fixations under
  // auc_judd (uniform negatives) but drops to chance when the negatives share
  // the same central distribution.
  int h = 24, w = 24;
  SaliencyMap m{h, w, {}};
  m.values.resize(static_cast<size_t>(h) * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double dy = y - (h - 1) / 2.0, dx = x - (w - 1) / 2.0;
      m.values[static_cast<size_t>(y) * w + x] = std::exp(-(dy * dy + dx * dx) / 30.0);
    }
  Rng rng(substream_seed(28, "metrics"));
  auto draw_central = [&](int n) {
    std::vector<Point> pts;
    while (static_cast<int>(pts.size()) < n) {
      int y = static_cast<int>(std::lround(rng.normal(h / 2.0, 2.5)));
      int x = static_cast<int>(std::lround(rng.normal(w / 2.0, 2.5)));
      if (y >= 0 && y < h && x >= 0 && x < w) pts.push_back({y, x});
    }
    return pts;
  };
  FixationFrame f(h, w);
  for (const auto& p : draw_central(30)) f.add(p.y, p.x);
  FixationFrame negatives(h, w);
  for (const auto& p : draw_central(200)) negatives.add(p.y, p.x);
  double plain = auc_judd(m, f);
  double shuffled = sauc(m, f, negatives);
  CHECK(plain > 0.9);
  CHECK(shuffled < plain - 0.2);
}

TEST_CASE("kl divergence closed forms") {
  // Identical distributions: zero.
  SaliencyMap g{1, 4, {0.25, 0.25, 0.25, 0.25}};
  CHECK(kl_div(g, g) == doctest::Approx(0.0).epsilon(1e-15));
  // Point mass vs uniform on 2 cells: ln 2 up to epsilon smoothing.
  SaliencyMap point{1, 2, {1.0, 0.0}};
  SaliencyMap uni{1, 2, {0.5, 0.5}};
  CHECK(kl_div(uni, point) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  // And the acceptance-scale case: n = 1000.
  int n = 1000;
  SaliencyMap big_point{1, n, std::vector<double>(n, 0.0)};
  big_point.values[0] = 1.0;
  SaliencyMap big_uni{1, n, std::vector<double>(n, 1.0 / n)};
  CHECK(std::abs(kl_div(big_uni, big_point) - std::log(static_cast<double>(n))) < 1e-3);
}

TEST_CASE("kl divergence is asymmetric, nonnegative, and matches the oracle") {
  Rng rng(substream_seed(29, "metrics"));
  auto s = random_dist(rng, 6, 8);
  auto g = random_dist(rng, 6, 8);
  CHECK(kl_div(s, g) == doctest::Approx(oracle::kl_direct(s, g)).epsilon(1e-12));
  CHECK(kl_div(s, g) >= -1e-9);
  CHECK(kl_div(s, g) != doctest::Approx(kl_div(g, s)).epsilon(1e-6));
}

TEST_CASE("anova: equal groups give F=0 and p=1") {
  auto r = anova_oneway({{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}});
  CHECK(r.f == 0.0);
  CHECK(r.p == 1.0);
  CHECK_FALSE(r.degenerate_within);
}

TEST_CASE("anova: zero within-variance with distinct means is degenerate") {
  auto r = anova_oneway({{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}});
  CHECK(std::isinf(r.f));
  CHECK(r.p == 0.0);
  CHECK(r.degenerate_within);
}

TEST_CASE("anova: identical constant groups give F=0 p=1 without degeneracy flag trickery") {
  auto r = anova_oneway({{2.0, 2.0}, {2.0, 2.0}});
  CHECK(r.f == 0.0);
  CHECK(r.p == 1.0);
}

TEST_CASE("anova F and p match brute-force sums and quadrature") {
  Rng rng(substream_seed(30, "metrics"));
  for (int it = 0; it < 8; ++it) {
    std::vector<std::vector<double>> groups(2 + rng.below(3));
    for (auto& g : groups) {
      g.resize(4 + rng.below(10));
      double shift = rng.uniform(-1.0, 1.0);
      for (auto& v : g) v = shift + rng.normal();
    }
    auto r = anova_oneway(groups);
    auto o = oracle::anova_f_direct(groups);
    CHECK(r.f == doctest::Approx(o.f).epsilon(1e-10));
    double p_oracle = oracle::f_pvalue_quadrature(o.f, o.d1, o.d2);
    CHECK(r.p == doctest::Approx(p_oracle).epsilon(1e-7));
  }
}

TEST_CASE("anova rejects fewer than two groups or empty groups") {
  CHECK_THROWS_AS(anova_oneway({{1.0, 2.0}}), Error);
  CHECK_THROWS_AS(anova_oneway({{1.0, 2.0}, {}}), Error);
  CHECK_THROWS_AS(anova_oneway({{1.0}, {2.0}}), Error);  // zero within dof
}

TEST_CASE("regularized incomplete beta sanity") {
  CHECK(betainc_reg(2.0, 3.0, 0.0) == 0.0);
  CHECK(betainc_reg(2.0, 3.0, 1.0) == 1.0);
  // I_x(1,1) = x.
  CHECK(betainc_reg(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-12));
  // I_x(a,b) + I_{1-x}(b,a) = 1.
  double x = 0.21;
  CHECK(betainc_reg(2.5, 4.5, x) + betainc_reg(4.5, 2.5, 1.0 - x) == doctest::Approx(1.0).epsilon(1e-12));
}

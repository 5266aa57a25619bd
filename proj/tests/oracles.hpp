#pragma once

// Independent brute-force oracles for the test suites. These deliberately
// re-derive every quantity from first principles with naive algorithms and
// must not share code with the library implementations they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <set>
#include <vector>

#include "avsal/types.hpp"

namespace oracle {

// NSS: z-score the map with population statistics, average at fixations.
inline double nss_direct(const avsal::SaliencyMap& s, const avsal::FixationFrame& f) {
  double mu = 0.0;
  for (double v : s.values) mu += v;
  mu /= static_cast<double>(s.values.size());
  double var = 0.0;
  for (double v : s.values) var += (v - mu) * (v - mu);
  var /= static_cast<double>(s.values.size());
  double sigma = std::sqrt(var);
  double total = 0.0;
  for (const auto& p : f.points) total += (s.at(p.y, p.x) - mu) / sigma;
  return total / static_cast<double>(f.points.size());
}

inline double cc_direct(const avsal::SaliencyMap& a, const avsal::SaliencyMap& b) {
  size_t n = a.values.size();
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += a.values[i];
    mb += b.values[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    cov += (a.values[i] - ma) * (b.values[i] - mb);
    va += (a.values[i] - ma) * (a.values[i] - ma);
    vb += (b.values[i] - mb) * (b.values[i] - mb);
  }
  return (cov / n) / (std::sqrt(va / n) * std::sqrt(vb / n));
}

inline double sim_direct(const avsal::SaliencyMap& a, const avsal::SaliencyMap& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) acc += std::min(a.values[i], b.values[i]);
  return acc;
}

inline double kl_direct(const avsal::SaliencyMap& s, const avsal::SaliencyMap& g,
                        double eps = 1e-8) {
  double acc = 0.0;
  for (size_t i = 0; i < s.values.size(); ++i) {
    acc += g.values[i] * std::log((g.values[i] + eps) / (s.values[i] + eps));
  }
  return acc;
}

// Exhaustive ROC: sweep every distinct fixated-pixel value as a threshold
// (plus the closed endpoints), count TP/FP by brute force over the point
// sets, integrate trapezoidally. Thresholds come from the positives only;
// that is the saliency-AUC convention, where non-fixated values merely get
// counted, never define curve vertices.
inline double auc_exhaustive(const avsal::SaliencyMap& s, const std::vector<avsal::Point>& pos,
                             const std::vector<avsal::Point>& neg) {
  std::set<double> thresholds;
  for (const auto& p : pos) thresholds.insert(s.at(p.y, p.x));
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(0.0, 0.0);
  pts.emplace_back(1.0, 1.0);
  for (double thr : thresholds) {
    size_t tp = 0, fp = 0;
    for (const auto& p : pos)
      if (s.at(p.y, p.x) >= thr) ++tp;
    for (const auto& p : neg)
      if (s.at(p.y, p.x) >= thr) ++fp;
    pts.emplace_back(static_cast<double>(fp) / neg.size(), static_cast<double>(tp) / pos.size());
  }
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) {
    area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
  }
  return area;
}

inline std::vector<avsal::Point> non_fixated_pixels(const avsal::SaliencyMap& s,
                                                    const std::vector<avsal::Point>& pos) {
  std::set<std::pair<int, int>> fixed;
  for (const auto& p : pos) fixed.insert({p.y, p.x});
  std::vector<avsal::Point> neg;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      if (!fixed.count({y, x})) neg.push_back({y, x});
    }
  }
  return neg;
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& fn, double a, double b, double fa,
                      double fb, double fm, double eps, int depth) {
  double m = (a + b) / 2.0;
  double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
  double flm = fn(lm), frm = fn(rm);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(fn, a, m, fa, fm, flm, eps / 2.0, depth - 1) +
         simpson(fn, m, b, fm, fb, frm, eps / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& fn, double a, double b,
                        double eps = 1e-12) {
  double fa = fn(a), fb = fn(b), fm = fn((a + b) / 2.0);
  return simpson(fn, a, b, fa, fb, fm, eps, 40);
}

// F-distribution density, integrated numerically for the ANOVA p oracle.
inline double f_density(double x, double d1, double d2) {
  if (x <= 0.0) return 0.0;
  double ln = 0.5 * d1 * std::log(d1) + 0.5 * d2 * std::log(d2) + (0.5 * d1 - 1.0) * std::log(x) -
              0.5 * (d1 + d2) * std::log(d2 + d1 * x) + std::lgamma(0.5 * (d1 + d2)) -
              std::lgamma(0.5 * d1) - std::lgamma(0.5 * d2);
  return std::exp(ln);
}

// Upper tail P(F > f) by quadrature over [0, f] (complement avoids the
// infinite upper limit). Substituting x = u^2 turns the x^(d1/2 - 1) factor
// into u^(d1 - 1), removing the integrable singularity at 0 when d1 = 1.
inline double f_pvalue_quadrature(double f, double d1, double d2) {
  if (f <= 0.0) return 1.0;
  double lower = integrate([=](double u) { return 2.0 * u * f_density(u * u, d1, d2); }, 0.0,
                           std::sqrt(f));
  return 1.0 - lower;
}

struct AnovaSums {
  double f;
  double d1, d2;
};

// Brute-force sums of squares.
inline AnovaSums anova_f_direct(const std::vector<std::vector<double>>& groups) {
  double grand = 0.0;
  size_t n = 0;
  for (const auto& g : groups)
    for (double v : g) {
      grand += v;
      ++n;
    }
  grand /= n;
  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    double m = 0.0;
    for (double v : g) m += v;
    m /= g.size();
    ssb += g.size() * (m - grand) * (m - grand);
    for (double v : g) ssw += (v - m) * (v - m);
  }
  double d1 = static_cast<double>(groups.size()) - 1.0;
  double d2 = static_cast<double>(n - groups.size());
  return {(ssb / d1) / (ssw / d2), d1, d2};
}

// Naive DFT magnitude, for resampler spectral checks.
inline std::vector<double> dft_magnitude(const std::vector<double>& x) {
  size_t n = x.size();
  std::vector<double> mag(n / 2 + 1);
  for (size_t k = 0; k < mag.size(); ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (size_t t = 0; t < n; ++t) {
      double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) / n;
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    mag[k] = std::abs(acc);
  }
  return mag;
}

inline size_t dft_peak_bin(const std::vector<double>& x) {
  auto mag = dft_magnitude(x);
  return std::distance(mag.begin(), std::max_element(mag.begin() + 1, mag.end()));
}

// HTK mel scale helpers for filterbank checks.
inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }

// Band whose (uniform-in-mel) center is nearest the tone: the filterbank
// response at a pure tone peaks there.
inline int expected_mel_band(double tone_hz, int bands, double fmin, double fmax) {
  double lo = hz_to_mel(fmin), hi = hz_to_mel(fmax);
  double step = (hi - lo) / (bands + 1);
  double m = hz_to_mel(tone_hz);
  int best = 0;
  double best_dist = 1e300;
  for (int b = 0; b < bands; ++b) {
    double center = lo + step * (b + 1);
    if (std::abs(center - m) < best_dist) {
      best_dist = std::abs(center - m);
      best = b;
    }
  }
  return best;
}

// Piecewise-linear resample of (position, value) pairs onto n uniform points
// over [0, 1]; the temporal-profile oracle.
inline std::vector<double> linear_resample(const std::vector<double>& positions,
                                           const std::vector<double>& values, int n) {
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) {
    double t = n == 1 ? 0.0 : static_cast<double>(j) / (n - 1);
    if (t <= positions.front()) {
      out[j] = values.front();
      continue;
    }
    if (t >= positions.back()) {
      out[j] = values.back();
      continue;
    }
    size_t i = 1;
    while (positions[i] < t) ++i;
    double w = (t - positions[i - 1]) / (positions[i] - positions[i - 1]);
    out[j] = values[i - 1] + w * (values[i] - values[i - 1]);
  }
  return out;
}

}  // namespace oracle

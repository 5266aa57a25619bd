#include "avsal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace avsal {
namespace {

void require_same_shape(const SaliencyMap& s, int h, int w, const char* what) {
  if (s.height != h || s.width != w) {
    throw Error(Errc::shape_mismatch, std::string(what) + ": shapes do not match");
  }
}

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

Moments map_moments(const SaliencyMap& s) {
  double sum = 0.0, sq = 0.0;
  for (double v : s.values) {
    sum += v;
    sq += v * v;
  }
  double n = static_cast<double>(s.size());
  Moments m;
  m.mean = sum / n;
  double var = sq / n - m.mean * m.mean;
  m.stddev = var > 0.0 ? std::sqrt(var) : 0.0;
  return m;
}

// Shared ROC sweep: thresholds at the unique positive values, >= rule,
// trapezoid over points sorted by FP rate with (0,0) and (1,1) appended.
double roc_area(std::vector<double> pos_vals, std::vector<double> neg_vals) {
  std::sort(pos_vals.begin(), pos_vals.end());
  std::sort(neg_vals.begin(), neg_vals.end());
  const double n_pos = static_cast<double>(pos_vals.size());
  const double n_neg = static_cast<double>(neg_vals.size());

  std::vector<std::pair<double, double>> points;  // (fp, tp)
  points.reserve(pos_vals.size() + 2);
  points.emplace_back(0.0, 0.0);
  for (size_t i = 0; i < pos_vals.size(); ++i) {
    if (i > 0 && pos_vals[i] == pos_vals[i - 1]) continue;  // unique thresholds
    double thr = pos_vals[i];
    double tp = static_cast<double>(pos_vals.end() -
                                    std::lower_bound(pos_vals.begin(), pos_vals.end(), thr)) /
                n_pos;
    double fp = static_cast<double>(neg_vals.end() -
                                    std::lower_bound(neg_vals.begin(), neg_vals.end(), thr)) /
                n_neg;
    points.emplace_back(fp, tp);
  }
  points.emplace_back(1.0, 1.0);
  std::sort(points.begin(), points.end());

  double area = 0.0;
  for (size_t i = 1; i < points.size(); ++i) {
    area += (points[i].first - points[i - 1].first) * (points[i].second + points[i - 1].second) *
            0.5;
  }
  return area;
}

}  // namespace

double nss(const SaliencyMap& s, const FixationFrame& fixations) {
  validate_map(s);
  require_same_shape(s, fixations.height, fixations.width, "nss");
  if (fixations.empty()) throw Error(Errc::empty_fixations, "nss: no fixations");
  Moments m = map_moments(s);
  if (m.stddev <= 0.0) throw Error(Errc::zero_variance, "nss: constant saliency map");
  double acc = 0.0;
  for (const Point& p : fixations.points) acc += (s.at(p.y, p.x) - m.mean) / m.stddev;
  return acc / static_cast<double>(fixations.count());
}

double cc(const SaliencyMap& s, const SaliencyMap& g) {
  validate_map(s);
  validate_map(g);
  require_same_shape(g, s.height, s.width, "cc");
  double n = static_cast<double>(s.size());
  double ms = 0.0, mg = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    ms += s.values[i];
    mg += g.values[i];
  }
  ms /= n;
  mg /= n;
  double cov = 0.0, vs = 0.0, vg = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    double a = s.values[i] - ms;
    double b = g.values[i] - mg;
    cov += a * b;
    vs += a * a;
    vg += b * b;
  }
  if (vs <= 0.0 || vg <= 0.0) throw Error(Errc::zero_variance, "cc: constant input map");
  return cov / std::sqrt(vs * vg);
}

double sim(const SaliencyMap& s, const SaliencyMap& g) {
  validate_map(s);
  validate_map(g);
  require_same_shape(g, s.height, s.width, "sim");
  if (!is_normalized(s) || !is_normalized(g)) {
    throw Error(Errc::unnormalized_input, "sim: inputs must sum to 1");
  }
  double acc = 0.0;
  for (size_t i = 0; i < s.size(); ++i) acc += std::min(s.values[i], g.values[i]);
  return acc;
}

double auc_judd(const SaliencyMap& s, const FixationFrame& fixations) {
  validate_map(s);
  require_same_shape(s, fixations.height, fixations.width, "auc_judd");
  if (fixations.empty()) throw Error(Errc::empty_fixations, "auc_judd: no fixations");
  if (fixations.count() >= s.size()) {
    throw Error(Errc::degenerate_negatives, "auc_judd: no non-fixated pixels");
  }
  std::vector<double> pos_vals;
  pos_vals.reserve(fixations.count());
  std::vector<bool> fixated(s.size(), false);
  for (const Point& p : fixations.points) {
    fixated[static_cast<size_t>(p.y) * s.width + p.x] = true;
    pos_vals.push_back(s.at(p.y, p.x));
  }
  std::vector<double> neg_vals;
  neg_vals.reserve(s.size() - fixations.count());
  for (size_t i = 0; i < s.size(); ++i) {
    if (!fixated[i]) neg_vals.push_back(s.values[i]);
  }
  return roc_area(std::move(pos_vals), std::move(neg_vals));
}

double sauc(const SaliencyMap& s, const FixationFrame& fixations, const FixationFrame& negatives) {
  validate_map(s);
  require_same_shape(s, fixations.height, fixations.width, "sauc");
  require_same_shape(s, negatives.height, negatives.width, "sauc negatives");
  if (fixations.empty()) throw Error(Errc::empty_fixations, "sauc: no fixations");
  std::vector<double> pos_vals, neg_vals;
  for (const Point& p : fixations.points) pos_vals.push_back(s.at(p.y, p.x));
  for (const Point& p : negatives.points) {
    // Negatives coinciding with positives are dropped.
    if (std::binary_search(fixations.points.begin(), fixations.points.end(), p)) continue;
    neg_vals.push_back(s.at(p.y, p.x));
  }
  if (neg_vals.empty()) {
    throw Error(Errc::empty_negatives, "sauc: no negatives after coincidence removal");
  }
  return roc_area(std::move(pos_vals), std::move(neg_vals));
}

double kl_div(const SaliencyMap& s, const SaliencyMap& g) {
  validate_map(s);
  validate_map(g);
  require_same_shape(g, s.height, s.width, "kl_div");
  if (!is_normalized(s) || !is_normalized(g)) {
    throw Error(Errc::unnormalized_input, "kl_div: inputs must sum to 1");
  }
  double acc = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    acc += g.values[i] * std::log((g.values[i] + kKlEpsilon) / (s.values[i] + kKlEpsilon));
  }
  return acc;
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw Error(Errc::bad_argument, "anova: need at least 2 groups");
  size_t total = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw Error(Errc::bad_argument, "anova: each group needs >= 2 samples");
    total += g.size();
  }
  double grand = 0.0;
  for (const auto& g : groups)
    for (double v : g) grand += v;
  grand /= static_cast<double>(total);

  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    double m = 0.0;
    for (double v : g) m += v;
    m /= static_cast<double>(g.size());
    ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ssw += (v - m) * (v - m);
  }
  double d1 = static_cast<double>(groups.size() - 1);
  double d2 = static_cast<double>(total - groups.size());

  AnovaResult res;
  if (ssw <= 0.0) {
    if (ssb <= 0.0) {  // identical constant data
      res.f = 0.0;
      res.p = 1.0;
    } else {
      res.f = std::numeric_limits<double>::infinity();
      res.p = 0.0;
      res.degenerate_within = true;
    }
    return res;
  }
  res.f = (ssb / d1) / (ssw / d2);
  res.p = f_upper_tail(res.f, d1, d2);
  return res;
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 400;
  constexpr double kEps = 1e-15;
  constexpr double kFpMin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double betainc_reg(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(Errc::bad_argument, "betainc: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                    b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double f_upper_tail(double f, double d1, double d2) {
  if (std::isinf(f)) return 0.0;
  if (f <= 0.0) return 1.0;
  return betainc_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

}  // namespace avsal

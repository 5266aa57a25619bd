#pragma once

#include <vector>

#include "avsal/types.hpp"

namespace avsal {

// Mean of the z-scored map sampled at fixated pixels. Population statistics.
// Throws Errc::empty_fixations, Errc::zero_variance, Errc::shape_mismatch.
double nss(const SaliencyMap& s, const FixationFrame& fixations);

// Pearson correlation over all pixels, population statistics.
double cc(const SaliencyMap& s, const SaliencyMap& g);

// Histogram intersection of two normalized maps. Inputs must sum to 1
// within 1e-6 or Errc::unnormalized_input is thrown.
double sim(const SaliencyMap& s, const SaliencyMap& g);

// ROC area with thresholds swept over the saliency values at fixated pixels;
// a pixel equal to the threshold counts as positive. Negatives are all
// non-fixated pixels. Endpoints (0,0) and (1,1) included, trapezoidal rule.
double auc_judd(const SaliencyMap& s, const FixationFrame& fixations);

// Same sweep, but the false-positive rate is measured over the supplied
// negative point set. Negatives coinciding with positives are removed first.
double sauc(const SaliencyMap& s, const FixationFrame& fixations, const FixationFrame& negatives);

constexpr double kKlEpsilon = 1e-8;

// sum_x G(x) * log((G(x)+eps)/(S(x)+eps)), natural log, eps = 1e-8 on both
// arguments. Inputs must be normalized within 1e-6.
double kl_div(const SaliencyMap& s, const SaliencyMap& g);

struct AnovaResult {
  double f = 0.0;
  double p = 1.0;
  bool degenerate_within = false;  // zero within-group variance with unequal means
};

// One-way fixed-effects ANOVA. Needs >= 2 groups of >= 2 samples each.
// Zero within-group variance with unequal means reports F = inf, p = 0;
// identical constant data reports F = 0, p = 1.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double betainc_reg(double a, double b, double x);

// Upper tail of the F distribution with (d1, d2) degrees of freedom.
double f_upper_tail(double f, double d1, double d2);

}  // namespace avsal

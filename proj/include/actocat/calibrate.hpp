#pragma once

// Threshold calibration against labeled validation data: confusion counts,
// ROC sweep, trapezoidal AUC, threshold selection and intensity correlation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "actocat/error.hpp"
#include "actocat/stats.hpp"
#include "actocat/types.hpp"

namespace actocat {

// One aligned epoch: the label-derived expectation and the measured |dA/dt|.
struct LabeledPair {
  std::uint8_t expected = 0;
  double da = 0.0;
};

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  double sensitivity() const {
    return tp + fn == 0 ? 0.0
                        : static_cast<double>(tp) /
                              static_cast<double>(tp + fn);
  }
  double specificity() const {
    return tn + fp == 0 ? 0.0
                        : static_cast<double>(tn) /
                              static_cast<double>(tn + fp);
  }
};

// prediction = (dA > threshold), strict, matching the classifier.
inline ConfusionCounts confusion_at_threshold(
    std::span<const LabeledPair> pairs, double threshold) {
  if (pairs.empty())
    throw ParamError("confusion_at_threshold: no pairs");
  ConfusionCounts c;
  for (const auto& p : pairs) {
    const bool pred = p.da > threshold;
    if (p.expected) {
      pred ? ++c.tp : ++c.fn;
    } else {
      pred ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

struct RocPoint {
  double threshold = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double fpr = 0.0;  // 1 - specificity
};

struct RocCurve {
  std::vector<RocPoint> points;  // ordered by threshold
  std::optional<double> auc;     // empty when degenerate
  bool degenerate = false;       // single-class input
};

// Trapezoidal area over (fpr, sensitivity), anchored at (0,0) and (1,1).
inline double auc_trapezoid(std::span<const RocPoint> points) {
  if (points.size() < 2)
    throw ParamError("auc_trapezoid: need at least 2 points");
  std::vector<std::pair<double, double>> xy;
  xy.reserve(points.size() + 2);
  xy.emplace_back(0.0, 0.0);
  xy.emplace_back(1.0, 1.0);
  for (const auto& p : points) xy.emplace_back(p.fpr, p.sensitivity);
  std::sort(xy.begin(), xy.end());
  double area = 0.0;
  for (std::size_t i = 1; i < xy.size(); ++i)
    area += (xy[i].first - xy[i - 1].first) *
            (xy[i].second + xy[i - 1].second) * 0.5;
  return area;
}

// Sweeps `steps` equal thresholds over [0, max(dA)] plus the two corner
// thresholds, dedupes identical operating points (keeping the smallest
// threshold) and integrates the AUC. Single-class input yields a degenerate
// curve with no AUC.
inline RocCurve roc_sweep(std::span<const LabeledPair> pairs,
                          int steps = 512) {
  if (pairs.empty()) throw ParamError("roc_sweep: no pairs");
  if (steps < 1) throw ParamError("roc_sweep: steps must be >= 1");

  double max_da = 0.0;
  std::size_t n_pos = 0;
  for (const auto& p : pairs) {
    max_da = std::max(max_da, p.da);
    n_pos += p.expected ? 1 : 0;
  }
  RocCurve curve;
  curve.degenerate = (n_pos == 0 || n_pos == pairs.size());

  std::vector<double> thresholds;
  thresholds.reserve(static_cast<std::size_t>(steps) + 2);
  thresholds.push_back(-1.0);  // all-active corner: every dA > -1
  for (int i = 0; i <= steps; ++i)
    thresholds.push_back(max_da * static_cast<double>(i) /
                         static_cast<double>(steps));
  // max(dA) itself maps to the all-inactive corner under the strict rule.

  for (double thr : thresholds) {
    const ConfusionCounts c = confusion_at_threshold(pairs, thr);
    RocPoint pt;
    pt.threshold = thr;
    pt.sensitivity = c.sensitivity();
    pt.specificity = c.specificity();
    pt.fpr = 1.0 - pt.specificity;
    curve.points.push_back(pt);
  }
  // Dedupe identical operating points; thresholds ascend, so the first
  // occurrence is the smallest threshold.
  std::vector<RocPoint> dedup;
  for (const auto& pt : curve.points) {
    if (!dedup.empty() && dedup.back().sensitivity == pt.sensitivity &&
        dedup.back().fpr == pt.fpr)
      continue;
    dedup.push_back(pt);
  }
  curve.points = std::move(dedup);
  if (!curve.degenerate) curve.auc = auc_trapezoid(curve.points);
  return curve;
}

enum class ThresholdCriterion { youden, closest_to_corner, fixed };

inline const char* to_string(ThresholdCriterion c) {
  switch (c) {
    case ThresholdCriterion::youden: return "youden";
    case ThresholdCriterion::closest_to_corner: return "closest_to_corner";
    case ThresholdCriterion::fixed: return "fixed";
  }
  return "?";
}

// Picks the operating point: Youden's J, distance to the (0,1) corner, or
// the grid point nearest a supplied value. Ties break toward the smaller
// threshold.
inline RocPoint select_threshold(
    const RocCurve& curve, ThresholdCriterion criterion,
    double fixed_value = std::numeric_limits<double>::quiet_NaN()) {
  if (curve.points.empty())
    throw DegenerateError("select_threshold: empty curve");
  if (criterion != ThresholdCriterion::fixed && curve.degenerate)
    throw DegenerateError("select_threshold: degenerate single-class curve");

  const RocPoint* best = nullptr;
  double best_score = 0.0;
  for (const auto& pt : curve.points) {
    double score = 0.0;
    switch (criterion) {
      case ThresholdCriterion::youden:
        score = -(pt.sensitivity + pt.specificity - 1.0);
        break;
      case ThresholdCriterion::closest_to_corner:
        score = pt.fpr * pt.fpr +
                (1.0 - pt.sensitivity) * (1.0 - pt.sensitivity);
        break;
      case ThresholdCriterion::fixed:
        if (std::isnan(fixed_value))
          throw ParamError("select_threshold: fixed criterion needs a value");
        score = std::fabs(pt.threshold - fixed_value);
        break;
    }
    // strict < keeps the earliest (= smallest threshold) on ties
    if (!best || score < best_score) {
      best = &pt;
      best_score = score;
    }
  }
  return *best;
}

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

// Product-moment correlation with the exact t-transform p-value.
inline PearsonResult pearson_correlation(std::span<const double> x,
                                         std::span<const double> y) {
  if (x.size() != y.size())
    throw ParamError("pearson_correlation: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw ParamError("pearson_correlation: need n >= 3");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw DegenerateError("pearson_correlation: zero variance");

  PearsonResult res;
  res.n = n;
  res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  if (1.0 - res.r * res.r <= 0.0) {
    res.p = 0.0;
    return res;
  }
  const double t = res.r * std::sqrt(df / (1.0 - res.r * res.r));
  res.p = std::min(1.0, 2.0 * (1.0 - student_t_cdf(std::fabs(t), df)));
  return res;
}

struct CalibrationReport {
  RocCurve curve;
  RocPoint selected;
  ThresholdCriterion criterion = ThresholdCriterion::youden;
  PearsonResult pearson;
  std::size_t n_pairs = 0;
  std::size_t n_minutes = 0;            // intensity windows correlated
  std::size_t unmatched_estimates = 0;  // alignment losses
  std::size_t unmatched_expectations = 0;
};

}  // namespace actocat

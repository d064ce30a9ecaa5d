#pragma once

// Activity-estimation pipeline: acceleration magnitude, absolute derivative,
// threshold classification, expectation downsampling, per-minute intensity
// and epoch alignment.
//
// The derivative is stamped at the later sample of each pair and is never
// computed across session gaps: a recharge gap would otherwise fabricate a
// spike.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "actocat/error.hpp"
#include "actocat/ingest.hpp"
#include "actocat/time.hpp"
#include "actocat/types.hpp"

namespace actocat {

inline double accel_magnitude(double ax, double ay, double az) {
  if (!std::isfinite(ax) || !std::isfinite(ay) || !std::isfinite(az))
    throw NumericError("accel_magnitude: non-finite component");
  return std::sqrt(ax * ax + ay * ay + az * az);
}

inline double accel_magnitude(const ImuSample& s) {
  return accel_magnitude(s.ax, s.ay, s.az);
}

inline std::vector<double> magnitude_series(const SampleSeries& series) {
  std::vector<double> out;
  out.reserve(series.samples.size());
  for (const auto& s : series.samples) out.push_back(accel_magnitude(s));
  return out;
}

// dA_n = |A_{n+1} - A_n| / (t_{n+1} - t_n), stamped at t_{n+1}. A single
// point yields an empty series.
inline DerivativeSeries accel_derivative(std::span<const std::int64_t> t_ms,
                                         std::span<const double> magnitude) {
  if (t_ms.size() != magnitude.size())
    throw ParamError("accel_derivative: length mismatch");
  DerivativeSeries out;
  if (t_ms.size() < 2) return out;
  out.t_ms.reserve(t_ms.size() - 1);
  out.da.reserve(t_ms.size() - 1);
  for (std::size_t i = 1; i < t_ms.size(); ++i) {
    const std::int64_t dt = t_ms[i] - t_ms[i - 1];
    if (dt == 0)
      throw NumericError("accel_derivative: repeated timestamp " +
                         format_utc(t_ms[i]));
    if (dt < 0)
      throw OrderingError("accel_derivative: decreasing timestamps");
    out.t_ms.push_back(t_ms[i]);
    out.da.push_back(std::fabs(magnitude[i] - magnitude[i - 1]) /
                     (static_cast<double>(dt) / 1000.0));
  }
  return out;
}

// Derivative over a full series, restarted at each session boundary.
inline DerivativeSeries derivative_over_sessions(
    const SampleSeries& series, std::span<const Session> sessions) {
  DerivativeSeries out;
  std::vector<std::int64_t> t;
  std::vector<double> a;
  for (const auto& ses : sessions) {
    t.clear();
    a.clear();
    for (std::size_t i = ses.first; i <= ses.last; ++i) {
      t.push_back(series.samples[i].t_ms);
      a.push_back(accel_magnitude(series.samples[i]));
    }
    DerivativeSeries part = accel_derivative(t, a);
    out.t_ms.insert(out.t_ms.end(), part.t_ms.begin(), part.t_ms.end());
    out.da.insert(out.da.end(), part.da.begin(), part.da.end());
  }
  return out;
}

// level = 1 iff dA strictly exceeds the threshold.
inline ActivityLevelSeries classify_activity(const DerivativeSeries& deriv,
                                             double threshold,
                                             std::string cat_id = {},
                                             double period_s = 5.0) {
  if (!(threshold >= 0.0))
    throw ParamError("classify_activity: threshold must be >= 0");
  ActivityLevelSeries out;
  out.cat_id = std::move(cat_id);
  out.period_s = period_s;
  out.t_ms = deriv.t_ms;
  out.level.reserve(deriv.da.size());
  for (double da : deriv.da)
    out.level.push_back(da > threshold ? 1 : 0);
  return out;
}

// Per non-overlapping window of the 1 Hz track, expected = 1 iff the active
// seconds reach ratio * window. The trailing partial window is dropped.
inline ExpectationSeries expectation_downsample(const LabelTrack& track,
                                                double window_s = 5.0,
                                                double ratio = 0.2) {
  if (!(window_s > 0.0))
    throw ParamError("expectation_downsample: window must be > 0");
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw ParamError("expectation_downsample: ratio must be in (0, 1]");
  const auto w = static_cast<std::size_t>(window_s);
  if (static_cast<double>(w) != window_s || w == 0)
    throw ParamError("expectation_downsample: window must be a whole number "
                     "of label seconds");
  ExpectationSeries out;
  const double min_active = ratio * static_cast<double>(w);
  for (std::size_t i = 0; i + w <= track.active.size(); i += w) {
    int active = 0;
    for (std::size_t j = 0; j < w; ++j) active += track.active[i + j];
    out.t_ms.push_back(track.start_ms +
                       static_cast<std::int64_t>(i) * kMsPerSecond);
    out.expected.push_back(
        static_cast<double>(active) >= min_active - 1e-9 ? 1 : 0);
  }
  return out;
}

// Count of active epochs per non-overlapping window (60 s -> 0..12 counts at
// 5 s epochs). Windows are anchored at `origin` (default: first epoch) and a
// trailing window is kept only when the epoch grid spans it completely.
inline IntensitySeries activity_intensity(
    const ActivityLevelSeries& levels, double window_s = 60.0,
    std::optional<std::int64_t> origin_ms = std::nullopt) {
  if (!(window_s > 0.0)) throw ParamError("activity_intensity: bad window");
  IntensitySeries out;
  if (levels.t_ms.empty()) return out;
  const auto w_ms = static_cast<std::int64_t>(window_s * 1000.0);
  const auto period_ms = static_cast<std::int64_t>(levels.period_s * 1000.0);
  const std::int64_t origin = origin_ms.value_or(levels.t_ms.front());
  // The grid spans a window completely when the last epoch reaches the
  // window's end (an epoch stamped t accounts for [t, t + period)).
  const std::int64_t covered_end = levels.t_ms.back() + period_ms;

  std::int64_t cur_bin = -1;
  int count = 0;
  bool have_bin = false;
  auto flush = [&] {
    if (have_bin && origin + (cur_bin + 1) * w_ms <= covered_end) {
      out.window_start_ms.push_back(origin + cur_bin * w_ms);
      out.count.push_back(count);
    }
  };
  for (std::size_t i = 0; i < levels.t_ms.size(); ++i) {
    if (levels.t_ms[i] < origin) continue;
    const std::int64_t bin = (levels.t_ms[i] - origin) / w_ms;
    if (!have_bin || bin != cur_bin) {
      flush();
      cur_bin = bin;
      count = 0;
      have_bin = true;
    }
    count += levels.level[i];
  }
  flush();
  return out;
}

struct AlignedEpoch {
  std::int64_t t_est_ms = 0;
  std::size_t est_index = 0;
  std::size_t exp_index = 0;
};

struct AlignedSeries {
  std::vector<AlignedEpoch> pairs;
  std::size_t unmatched_estimates = 0;
  std::size_t unmatched_expectations = 0;
};

// Greedy nearest-timestamp matching within `tolerance_s`. Both inputs must be
// sorted. Throws when the series share no matching epochs at all.
inline AlignedSeries align_epochs(std::span<const std::int64_t> t_est,
                                  std::span<const std::int64_t> t_exp,
                                  double tolerance_s = 1.0) {
  const auto tol_ms = static_cast<std::int64_t>(tolerance_s * 1000.0);
  AlignedSeries out;
  std::size_t j = 0;
  for (std::size_t i = 0; i < t_est.size(); ++i) {
    while (j < t_exp.size() && t_exp[j] < t_est[i] - tol_ms) {
      ++out.unmatched_expectations;
      ++j;
    }
    if (j < t_exp.size() && std::llabs(t_exp[j] - t_est[i]) <= tol_ms) {
      // Prefer the closer of the two straddling candidates.
      if (j + 1 < t_exp.size() &&
          std::llabs(t_exp[j + 1] - t_est[i]) <
              std::llabs(t_exp[j] - t_est[i])) {
        ++out.unmatched_expectations;
        ++j;
      }
      out.pairs.push_back(AlignedEpoch{t_est[i], i, j});
      ++j;
    } else {
      ++out.unmatched_estimates;
    }
  }
  out.unmatched_expectations += t_exp.size() - j;
  if (out.pairs.empty())
    throw AlignmentError("align_epochs: series do not overlap");
  return out;
}

// Pairs (expected, estimated) levels on matching epochs.
inline AlignedSeries align_series(const ActivityLevelSeries& estimates,
                                  const ExpectationSeries& expectations,
                                  double tolerance_s = 1.0) {
  return align_epochs(estimates.t_ms, expectations.t_ms, tolerance_s);
}

// Debug dump mirroring the pipeline stages: t, A, dA, level per epoch.
inline void write_stage_csv(std::ostream& out, const SampleSeries& series,
                            std::span<const Session> sessions,
                            double threshold) {
  const DerivativeSeries deriv = derivative_over_sessions(series, sessions);
  const ActivityLevelSeries levels =
      classify_activity(deriv, threshold, series.cat_id,
                        series.nominal_period_s);
  out << "t_iso,magnitude,derivative,level\n";
  std::size_t k = 0;
  char buf[80];
  for (const auto& s : series.samples) {
    const double a = accel_magnitude(s);
    if (k < deriv.t_ms.size() && deriv.t_ms[k] == s.t_ms) {
      std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%d\n", a, deriv.da[k],
                    static_cast<int>(levels.level[k]));
      ++k;
    } else {
      std::snprintf(buf, sizeof(buf), ",%.6f,,\n", a);
    }
    out << format_utc(s.t_ms) << buf;
  }
}

}  // namespace actocat

#pragma once

// End-to-end orchestration shared by the CLI and the integration tests:
// per-cat pipeline runs, threshold calibration from labeled data, and the
// cohort-level statistics.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actocat/calibrate.hpp"
#include "actocat/ephemeris.hpp"
#include "actocat/error.hpp"
#include "actocat/ingest.hpp"
#include "actocat/rhythm.hpp"
#include "actocat/signal.hpp"
#include "actocat/stats.hpp"
#include "actocat/types.hpp"

namespace actocat {

struct PipelineOptions {
  double threshold = 0.025;          // m/s^3
  double gap_threshold_s = 15.0;
  double epoch_s = 5.0;
  double expectation_ratio = 0.2;
  double intensity_window_s = 60.0;
  double align_tolerance_s = 1.0;
  int roc_steps = 512;
  ThresholdCriterion roc_criterion = ThresholdCriterion::youden;
  double fixed_threshold = 0.025;    // used when roc_criterion == fixed
  double alpha = 0.05;
  TestMode wilcoxon_mode = TestMode::automatic;
  bool continuity_correction = true;
  int tz_offset_min = 0;
};

struct CatAnalysis {
  std::string cat_id;
  std::optional<CatProfile> profile;
  std::size_t n_samples = 0;
  std::size_t n_sessions = 0;
  std::size_t skipped_rows = 0;
  TimeBudget budget;
  DayNightSplit split;
  HourlyProfile hourly;
};

// Full single-cat pipeline on an already-parsed series.
inline CatAnalysis analyze_series(const SampleSeries& series,
                                  std::span<const DayContext> contexts,
                                  const PipelineOptions& opt) {
  CatAnalysis out;
  out.cat_id = series.cat_id;
  out.n_samples = series.samples.size();
  const auto sessions = assemble_sessions(series, opt.gap_threshold_s);
  out.n_sessions = sessions.size();
  const DerivativeSeries deriv = derivative_over_sessions(series, sessions);
  const ActivityLevelSeries levels =
      classify_activity(deriv, opt.threshold, series.cat_id, opt.epoch_s);
  out.budget = time_budget(levels);
  out.split = daynight_split(levels, contexts, opt.tz_offset_min);
  out.hourly = hourly_profile(levels, opt.tz_offset_min);
  return out;
}

struct CohortStats {
  std::optional<CohortSummary> budget_summary;     // active_pct across cats
  std::optional<CohortSummary> day_share_summary;  // day share across cats
  std::optional<TestResult> activity_vs_inactivity;  // signed-rank, paired
  std::optional<TestResult> day_vs_night;            // rank-sum, unpaired
  std::optional<AnovaTable> hourly_anova;
  std::optional<TukeyResult> hourly_tukey;
  std::vector<std::uint8_t> hourly_marker;  // 24 flags from the Tukey pairs
};

// Per-hour observations are per-cat-per-day proportions, pooled across cats.
inline std::vector<std::vector<double>> hourly_observation_groups(
    std::span<const CatAnalysis> cats) {
  std::vector<std::vector<double>> groups(24);
  for (const auto& cat : cats) {
    for (const auto& row : cat.hourly.per_day) {
      for (std::size_t h = 0; h < 24; ++h) {
        if (row.epochs[h] == 0) continue;
        groups[h].push_back(100.0 * static_cast<double>(row.active[h]) /
                            static_cast<double>(row.epochs[h]));
      }
    }
  }
  return groups;
}

inline CohortStats cohort_stats(std::span<const CatAnalysis> cats,
                                const PipelineOptions& opt) {
  CohortStats out;
  if (cats.size() < 2) return out;  // cohort section needs n >= 2

  std::vector<double> active, inactive, day_share, night_share;
  for (const auto& c : cats) {
    active.push_back(c.budget.active_pct);
    inactive.push_back(c.budget.inactive_pct);
    if (c.split.day_share_pct) {
      day_share.push_back(*c.split.day_share_pct);
      night_share.push_back(*c.split.night_share_pct);
    }
  }
  out.budget_summary = cohort_aggregate(active);
  if (day_share.size() >= 2) out.day_share_summary = cohort_aggregate(day_share);

  try {
    out.activity_vs_inactivity =
        wilcoxon_signed_rank(inactive, active, Alternative::two_sided,
                             opt.wilcoxon_mode, opt.continuity_correction);
  } catch (const Error&) {
    // all cats exactly at 50%: comparison degenerate, leave empty
  }
  if (!day_share.empty() && !night_share.empty()) {
    try {
      out.day_vs_night =
          wilcoxon_rank_sum(day_share, night_share, Alternative::two_sided,
                            opt.wilcoxon_mode, opt.continuity_correction);
    } catch (const Error&) {
    }
  }

  auto groups = hourly_observation_groups(cats);
  const bool anova_ok =
      std::all_of(groups.begin(), groups.end(),
                  [](const auto& g) { return g.size() >= 2; });
  if (anova_ok) {
    try {
      out.hourly_anova = one_way_anova(groups);
      out.hourly_tukey = tukey_hsd(groups, opt.alpha);
      // Mark an hour when it sits above the grand bin mean and differs
      // significantly from more than half of the other bins.
      std::vector<double> means(24);
      double grand = 0.0;
      for (std::size_t h = 0; h < 24; ++h) {
        means[h] = std::accumulate(groups[h].begin(), groups[h].end(), 0.0) /
                   static_cast<double>(groups[h].size());
        grand += means[h];
      }
      grand /= 24.0;
      std::vector<int> sig_count(24, 0);
      for (const auto& p : out.hourly_tukey->pairs) {
        if (!p.significant) continue;
        ++sig_count[p.group_i];
        ++sig_count[p.group_j];
      }
      out.hourly_marker.assign(24, 0);
      for (std::size_t h = 0; h < 24; ++h)
        out.hourly_marker[h] =
            (means[h] > grand && sig_count[h] > 11) ? 1 : 0;
    } catch (const DegenerateError&) {
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// calibration run
// ---------------------------------------------------------------------------

struct LabeledRecording {
  SampleSeries series;
  LabelTrack track;
};

// Pools aligned (expectation, dA) pairs across recordings, sweeps the ROC,
// selects the operating threshold and validates per-minute intensity with a
// Pearson correlation at that threshold.
inline CalibrationReport run_calibration(
    std::span<const LabeledRecording> recordings, const PipelineOptions& opt) {
  if (recordings.empty())
    throw ParamError("run_calibration: no labeled recordings");

  struct PerCat {
    DerivativeSeries deriv;
    ExpectationSeries expect;
    AlignedSeries aligned;
  };
  std::vector<PerCat> per_cat;
  std::vector<LabeledPair> pairs;
  CalibrationReport report;

  for (const auto& rec : recordings) {
    PerCat pc;
    const auto sessions = assemble_sessions(rec.series, opt.gap_threshold_s);
    pc.deriv = derivative_over_sessions(rec.series, sessions);
    pc.expect =
        expectation_downsample(rec.track, opt.epoch_s, opt.expectation_ratio);
    pc.aligned = align_epochs(pc.deriv.t_ms, pc.expect.t_ms,
                              opt.align_tolerance_s);
    for (const auto& ap : pc.aligned.pairs)
      pairs.push_back(LabeledPair{pc.expect.expected[ap.exp_index],
                                  pc.deriv.da[ap.est_index]});
    report.unmatched_estimates += pc.aligned.unmatched_estimates;
    report.unmatched_expectations += pc.aligned.unmatched_expectations;
    per_cat.push_back(std::move(pc));
  }

  report.n_pairs = pairs.size();
  report.curve = roc_sweep(pairs, opt.roc_steps);
  report.criterion = opt.roc_criterion;
  report.selected = select_threshold(report.curve, opt.roc_criterion,
                                     opt.fixed_threshold);

  // Intensity validation at the selected threshold, minute-matched per cat.
  std::vector<double> est_counts, exp_counts;
  for (const auto& pc : per_cat) {
    const ActivityLevelSeries est_levels = classify_activity(
        pc.deriv, report.selected.threshold, "", opt.epoch_s);
    ActivityLevelSeries exp_levels;
    exp_levels.period_s = opt.epoch_s;
    exp_levels.t_ms = pc.expect.t_ms;
    exp_levels.level = pc.expect.expected;
    const std::int64_t origin = pc.aligned.pairs.front().t_est_ms;
    const IntensitySeries est_int =
        activity_intensity(est_levels, opt.intensity_window_s, origin);
    const IntensitySeries exp_int =
        activity_intensity(exp_levels, opt.intensity_window_s, origin);
    std::size_t i = 0, j = 0;
    while (i < est_int.window_start_ms.size() &&
           j < exp_int.window_start_ms.size()) {
      if (est_int.window_start_ms[i] < exp_int.window_start_ms[j]) {
        ++i;
      } else if (est_int.window_start_ms[i] > exp_int.window_start_ms[j]) {
        ++j;
      } else {
        est_counts.push_back(static_cast<double>(est_int.count[i]));
        exp_counts.push_back(static_cast<double>(exp_int.count[j]));
        ++i;
        ++j;
      }
    }
  }
  report.n_minutes = est_counts.size();
  if (est_counts.size() >= 3) {
    try {
      report.pearson = pearson_correlation(est_counts, exp_counts);
    } catch (const DegenerateError&) {
      report.pearson = PearsonResult{};  // zero-variance fixture
    }
  }
  return report;
}

}  // namespace actocat

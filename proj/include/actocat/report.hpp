#pragma once

// JSON and CSV emission for calibration and analysis reports. Every report
// carries a metadata block naming the tool version, the config hash and the
// method choices, so downstream readers can tell exactly how numbers were
// produced. Output is deterministic: ordered keys, fixed float formatting in
// CSVs, no wall-clock content.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "actocat/analysis.hpp"
#include "actocat/calibrate.hpp"
#include "actocat/rhythm.hpp"
#include "actocat/stats.hpp"

namespace actocat {

constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// FNV-1a, stable across platforms (std::hash is not).
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

inline Json metadata_json(const std::string& config_hash,
                          const PipelineOptions& opt) {
  Json m;
  m["tool"] = "actocat";
  m["version"] = kVersion;
  m["config_hash"] = config_hash;
  Json methods;
  methods["derivative_stamp"] = "later_sample";
  methods["threshold_rule"] = "strict_greater";
  methods["std_denominator"] = "n-1";
  methods["hourly_aggregation"] = "per_day_then_mean";
  methods["phase_interval"] = "sunrise_inclusive_sunset_exclusive";
  methods["wilcoxon_mode"] =
      opt.wilcoxon_mode == TestMode::automatic
          ? "auto"
          : (opt.wilcoxon_mode == TestMode::exact ? "exact" : "approx");
  methods["continuity_correction"] = opt.continuity_correction;
  methods["roc_criterion"] = to_string(opt.roc_criterion);
  methods["alpha"] = opt.alpha;
  m["methods"] = methods;
  return m;
}

inline Json to_json(const TestResult& r) {
  Json j;
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  j["method"] = to_string(r.method);
  j["alternative"] = to_string(r.alternative);
  j["n1"] = r.n1;
  if (r.n2 > 0) j["n2"] = r.n2;
  if (r.zeros_dropped > 0) j["zeros_dropped"] = r.zeros_dropped;
  j["ties"] = r.ties;
  return j;
}

inline Json to_json(const AnovaTable& a) {
  Json j;
  j["ss_between"] = a.ss_between;
  j["ss_within"] = a.ss_within;
  j["df_between"] = a.df_between;
  j["df_within"] = a.df_within;
  j["f"] = a.f;
  j["p"] = a.p;
  return j;
}

inline Json to_json(const TukeyResult& t) {
  Json j;
  j["alpha"] = t.alpha;
  j["k"] = t.k;
  j["df_within"] = t.df_within;
  j["ms_within"] = t.ms_within;
  j["q_critical"] = t.q_critical;
  Json pairs = Json::array();
  for (const auto& p : t.pairs) {
    Json pj;
    pj["i"] = p.group_i;
    pj["j"] = p.group_j;
    pj["mean_diff"] = p.mean_diff;
    pj["q"] = p.q_stat;
    pj["p"] = p.p_value;
    pj["significant"] = p.significant;
    pairs.push_back(pj);
  }
  j["pairs"] = pairs;
  return j;
}

inline Json to_json(const CatAnalysis& c) {
  Json j;
  j["cat_id"] = c.cat_id;
  j["n_samples"] = c.n_samples;
  j["n_sessions"] = c.n_sessions;
  j["skipped_rows"] = c.skipped_rows;
  j["budget"] = {{"active_pct", c.budget.active_pct},
                 {"inactive_pct", c.budget.inactive_pct},
                 {"epochs", c.budget.epochs}};
  Json split;
  if (c.split.day_share_pct) {
    split["day_share_pct"] = *c.split.day_share_pct;
    split["night_share_pct"] = *c.split.night_share_pct;
  } else {
    split["day_share_pct"] = nullptr;
    split["night_share_pct"] = nullptr;
  }
  split["day_rate_per_h"] = c.split.day_rate_per_h;
  split["night_rate_per_h"] = c.split.night_rate_per_h;
  split["epochs_day"] = c.split.epochs_day;
  split["epochs_night"] = c.split.epochs_night;
  j["daynight"] = split;
  Json hourly;
  hourly["mean_pct"] = c.hourly.mean_pct;
  hourly["days_covered"] = c.hourly.days_covered;
  j["hourly"] = hourly;
  return j;
}

inline Json to_json(const CohortSummary& s,
                    const std::vector<std::string>& ids) {
  Json j;
  j["mean"] = s.mean;
  j["stddev"] = s.stddev;
  Json out = Json::array();
  for (auto idx : s.outliers) out.push_back(ids[idx]);
  j["outliers"] = out;
  return j;
}

inline Json analysis_json(const std::string& config_hash,
                          const PipelineOptions& opt, double threshold,
                          const std::vector<CatAnalysis>& cats,
                          const CohortStats& stats,
                          const std::vector<std::string>& failed_cats) {
  Json j;
  j["metadata"] = metadata_json(config_hash, opt);
  j["threshold"] = threshold;
  Json cats_json = Json::array();
  std::vector<std::string> ids;
  for (const auto& c : cats) {
    cats_json.push_back(to_json(c));
    ids.push_back(c.cat_id);
  }
  j["cats"] = cats_json;
  if (!failed_cats.empty()) j["failed_cats"] = failed_cats;

  if (cats.size() >= 2) {
    Json cohort;
    if (stats.budget_summary)
      cohort["active_pct"] = to_json(*stats.budget_summary, ids);
    if (stats.day_share_summary)
      cohort["day_share_pct"] = to_json(*stats.day_share_summary, ids);
    j["cohort"] = cohort;
    Json tests;
    tests["activity_vs_inactivity"] =
        stats.activity_vs_inactivity ? to_json(*stats.activity_vs_inactivity)
                                     : Json(nullptr);
    tests["day_vs_night"] =
        stats.day_vs_night ? to_json(*stats.day_vs_night) : Json(nullptr);
    tests["hourly_anova"] =
        stats.hourly_anova ? to_json(*stats.hourly_anova) : Json(nullptr);
    tests["hourly_tukey"] =
        stats.hourly_tukey ? to_json(*stats.hourly_tukey) : Json(nullptr);
    j["tests"] = tests;
  }
  return j;
}

inline Json to_json(const CalibrationReport& r,
                    const std::string& config_hash,
                    const PipelineOptions& opt) {
  Json j;
  j["metadata"] = metadata_json(config_hash, opt);
  j["n_pairs"] = r.n_pairs;
  j["unmatched_estimates"] = r.unmatched_estimates;
  j["unmatched_expectations"] = r.unmatched_expectations;
  j["criterion"] = to_string(r.criterion);
  Json sel;
  sel["threshold"] = r.selected.threshold;
  sel["sensitivity"] = r.selected.sensitivity;
  sel["specificity"] = r.selected.specificity;
  sel["fpr"] = r.selected.fpr;
  j["selected"] = sel;
  j["auc"] = r.curve.auc ? Json(*r.curve.auc) : Json(nullptr);
  j["degenerate"] = r.curve.degenerate;
  Json pearson;
  pearson["r"] = r.pearson.r;
  pearson["p"] = r.pearson.p;
  pearson["n_minutes"] = r.n_minutes;
  j["intensity_pearson"] = pearson;
  return j;
}

// Plot-ready ROC sweep: threshold, sensitivity, specificity, fpr.
inline void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "threshold,sensitivity,specificity,fpr\n";
  char buf[128];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.6f,%.6f,%.6f\n", p.threshold,
                  p.sensitivity, p.specificity, p.fpr);
    out << buf;
  }
}

inline void write_per_cat_csv(std::ostream& out,
                              const std::vector<CatAnalysis>& cats) {
  out << "cat_id,epochs,active_pct,inactive_pct,day_share_pct,"
         "night_share_pct,day_rate_per_h,night_rate_per_h,n_sessions\n";
  char buf[256];
  for (const auto& c : cats) {
    std::string day = c.split.day_share_pct
                          ? [&] {
                              char b[32];
                              std::snprintf(b, sizeof(b), "%.6f",
                                            *c.split.day_share_pct);
                              return std::string(b);
                            }()
                          : std::string();
    std::string night = c.split.night_share_pct
                            ? [&] {
                                char b[32];
                                std::snprintf(b, sizeof(b), "%.6f",
                                              *c.split.night_share_pct);
                                return std::string(b);
                              }()
                            : std::string();
    std::snprintf(buf, sizeof(buf), "%s,%zu,%.6f,%.6f,%s,%s,%.6f,%.6f,%zu\n",
                  c.cat_id.c_str(), c.budget.epochs, c.budget.active_pct,
                  c.budget.inactive_pct, day.c_str(), night.c_str(),
                  c.split.day_rate_per_h, c.split.night_rate_per_h,
                  c.n_sessions);
    out << buf;
  }
}

// Bar data for the activity/inactivity figure: cohort mean and std.
inline void write_fig_budget_csv(std::ostream& out,
                                 const std::vector<CatAnalysis>& cats) {
  std::vector<double> active;
  for (const auto& c : cats) active.push_back(c.budget.active_pct);
  out << "state,mean_pct,std_pct\n";
  char buf[96];
  if (cats.size() >= 2) {
    const CohortSummary s = cohort_aggregate(active);
    std::snprintf(buf, sizeof(buf), "active,%.6f,%.6f\ninactive,%.6f,%.6f\n",
                  s.mean, s.stddev, 100.0 - s.mean, s.stddev);
  } else {
    std::snprintf(buf, sizeof(buf), "active,%.6f,\ninactive,%.6f,\n",
                  active.front(), 100.0 - active.front());
  }
  out << buf;
}

inline void write_fig_daynight_csv(std::ostream& out,
                                   const std::vector<CatAnalysis>& cats,
                                   const CohortStats& stats) {
  std::vector<double> day;
  for (const auto& c : cats)
    if (c.split.day_share_pct) day.push_back(*c.split.day_share_pct);
  out << "phase,mean_share_pct,std_pct,wilcoxon_p\n";
  char buf[160];
  const std::string p =
      stats.day_vs_night
          ? [&] {
              char b[32];
              std::snprintf(b, sizeof(b), "%.9g", stats.day_vs_night->p_value);
              return std::string(b);
            }()
          : std::string();
  if (day.size() >= 2) {
    const CohortSummary s = cohort_aggregate(day);
    std::snprintf(buf, sizeof(buf), "day,%.6f,%.6f,%s\nnight,%.6f,%.6f,%s\n",
                  s.mean, s.stddev, p.c_str(), 100.0 - s.mean, s.stddev,
                  p.c_str());
  } else if (day.size() == 1) {
    std::snprintf(buf, sizeof(buf), "day,%.6f,,%s\nnight,%.6f,,%s\n",
                  day.front(), p.c_str(), 100.0 - day.front(), p.c_str());
  } else {
    std::snprintf(buf, sizeof(buf), "day,,,\nnight,,,\n");
  }
  out << buf;
}

// Hour-of-day profile: cohort mean of per-cat bin means, std across cats,
// and the Tukey marker column.
inline void write_fig_hourly_csv(std::ostream& out,
                                 const std::vector<CatAnalysis>& cats,
                                 const CohortStats& stats) {
  out << "hour,mean_pct,std_pct,tukey_marker\n";
  char buf[96];
  for (std::size_t h = 0; h < 24; ++h) {
    std::vector<double> vals;
    for (const auto& c : cats)
      if (c.hourly.days_covered[h] > 0) vals.push_back(c.hourly.mean_pct[h]);
    const char* mark =
        (h < stats.hourly_marker.size() && stats.hourly_marker[h]) ? "m" : "";
    if (vals.size() >= 2) {
      const CohortSummary s = cohort_aggregate(vals);
      std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%s\n", h, s.mean,
                    s.stddev, mark);
    } else if (vals.size() == 1) {
      std::snprintf(buf, sizeof(buf), "%zu,%.6f,,%s\n", h, vals.front(), mark);
    } else {
      std::snprintf(buf, sizeof(buf), "%zu,,,%s\n", h, mark);
    }
    out << buf;
  }
}

}  // namespace actocat

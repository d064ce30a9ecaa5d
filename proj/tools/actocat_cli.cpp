// actocat command-line tool.
//
// Subcommands:
//   calibrate  ROC threshold calibration from labeled recordings
//   analyze    per-cat + cohort activity and rhythm reports
//   report     render an existing analysis.json as markdown
//   synth      generate synthetic fixture recordings with ground truth
//
// Configuration comes from a JSON file (--config, or $ACTOCAT_CONFIG);
// command-line flags override file values. Exit codes: 0 success, 1 partial
// (some cats failed), 2 unusable input.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "actocat/actocat.hpp"

namespace fs = std::filesystem;
using actocat::Json;

namespace {

struct CatInput {
  std::string id;
  std::string samples_path;
  std::string labels_path;  // empty when unlabeled
};

struct Config {
  std::vector<CatInput> cats;
  actocat::AccelUnits units = actocat::AccelUnits::milli_g;
  char delimiter = ',';
  bool threshold_from_calibration = false;
  actocat::PipelineOptions pipeline;
  std::optional<actocat::GeoSite> site;
  std::string sun_table_path;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  bool dump_stages = false;
  actocat::Taxonomy taxonomy = actocat::default_taxonomy();
  Json synth;       // raw synth section
  Json effective;   // merged config for hashing
};

[[noreturn]] void fail(const std::string& msg, int code = 2) {
  std::cerr << "actocat: " << msg << "\n";
  std::exit(code);
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    fail(std::string("bad JSON in ") + path + ": " + e.what());
  }
}

std::optional<actocat::GeoSite> parse_site(const Json& j) {
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    if (const auto preset = actocat::site_preset(text)) return preset;
    double lat, lon;
    int tz;
    if (std::sscanf(text.c_str(), "%lf,%lf,%d", &lat, &lon, &tz) != 3)
      fail("site wants a preset name or 'lat,lon,tz_offset_min'");
    return actocat::GeoSite{lat, lon, tz};
  }
  actocat::GeoSite s;
  s.latitude_deg = j.at("latitude").get<double>();
  s.longitude_deg = j.at("longitude").get<double>();
  s.tz_offset_min = j.value("tz_offset_min", 0);
  return s;
}

actocat::ThresholdCriterion parse_criterion(const std::string& s) {
  if (s == "youden") return actocat::ThresholdCriterion::youden;
  if (s == "closest_to_corner")
    return actocat::ThresholdCriterion::closest_to_corner;
  if (s == "fixed") return actocat::ThresholdCriterion::fixed;
  fail("unknown roc_criterion '" + s + "'");
}

Config build_config(const Json& file_json) {
  Config cfg;
  Json j = file_json;

  if (j.contains("cats")) {
    for (const auto& c : j["cats"]) {
      CatInput ci;
      ci.id = c.at("id").get<std::string>();
      ci.samples_path = c.value("samples", "");
      ci.labels_path = c.value("labels", "");
      cfg.cats.push_back(ci);
    }
  }
  std::sort(cfg.cats.begin(), cfg.cats.end(),
            [](const CatInput& a, const CatInput& b) { return a.id < b.id; });

  const std::string units = j.value("units", "milli_g");
  if (units == "milli_g")
    cfg.units = actocat::AccelUnits::milli_g;
  else if (units == "m_per_s2")
    cfg.units = actocat::AccelUnits::m_per_s2;
  else
    fail("unknown units '" + units + "'");
  if (j.contains("delimiter"))
    cfg.delimiter = j["delimiter"].get<std::string>().at(0);

  auto& p = cfg.pipeline;
  if (j.contains("threshold")) {
    if (j["threshold"].is_string()) {
      if (j["threshold"] != "calibrate")
        fail("threshold must be a number or \"calibrate\"");
      cfg.threshold_from_calibration = true;
    } else {
      p.threshold = j["threshold"].get<double>();
    }
  }
  p.gap_threshold_s = j.value("gap_threshold_s", p.gap_threshold_s);
  p.epoch_s = j.value("epoch_s", p.epoch_s);
  p.expectation_ratio = j.value("expectation_ratio", p.expectation_ratio);
  p.intensity_window_s = j.value("intensity_window_s", p.intensity_window_s);
  p.align_tolerance_s = j.value("align_tolerance_s", p.align_tolerance_s);
  p.roc_steps = j.value("roc_steps", p.roc_steps);
  if (j.contains("roc_criterion"))
    p.roc_criterion = parse_criterion(j["roc_criterion"].get<std::string>());
  p.fixed_threshold = j.value("fixed_threshold", p.fixed_threshold);
  p.alpha = j.value("alpha", p.alpha);
  const std::string wmode = j.value("wilcoxon_mode", "auto");
  p.wilcoxon_mode = wmode == "exact"
                        ? actocat::TestMode::exact
                        : (wmode == "approx" ? actocat::TestMode::approx
                                             : actocat::TestMode::automatic);
  p.continuity_correction =
      j.value("continuity_correction", p.continuity_correction);

  if (j.contains("site")) cfg.site = parse_site(j["site"]);
  cfg.sun_table_path = j.value("sun_table", "");
  if (cfg.site) p.tz_offset_min = cfg.site->tz_offset_min;
  p.tz_offset_min = j.value("tz_offset_min", p.tz_offset_min);

  cfg.out_dir = j.value("out", cfg.out_dir);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.dump_stages = j.value("dump_stages", false);
  if (j.contains("taxonomy")) {
    cfg.taxonomy.clear();
    for (const auto& [name, cls] : j["taxonomy"].items()) {
      const std::string v = cls.get<std::string>();
      if (v != "active" && v != "inactive")
        fail("taxonomy values must be active/inactive");
      cfg.taxonomy[name] = (v == "active");
    }
  }
  if (j.contains("synth")) cfg.synth = j["synth"];
  cfg.effective = j;
  return cfg;
}

actocat::SunTable load_sun_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open sun table " + path);
  actocat::CsvReader reader(in);
  const int cd = actocat::find_column(reader.header(), {"date"});
  const int cr = actocat::find_column(reader.header(),
                                      {"sunriselocal", "sunrise"});
  const int cs = actocat::find_column(reader.header(),
                                      {"sunsetlocal", "sunset"});
  if (cd < 0 || cr < 0 || cs < 0)
    fail("sun table needs date,sunrise_local,sunset_local columns");
  actocat::SunTable table;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const auto date = actocat::parse_date(fields[cd]);
    const auto rise = actocat::parse_time_of_day(fields[cr]);
    const auto set = actocat::parse_time_of_day(fields[cs]);
    if (!date || !rise || !set) fail("bad sun table row in " + path);
    actocat::DayContext ctx;
    ctx.date = *date;
    ctx.sunrise_local_ms = *rise;
    ctx.sunset_local_ms = *set;
    table[*date] = ctx;
  }
  return table;
}

actocat::ImuParseResult parse_cat_samples(const Config& cfg,
                                          const CatInput& cat) {
  std::ifstream in(cat.samples_path);
  if (!in)
    throw actocat::ParseError("cannot open " + cat.samples_path);
  actocat::ImuParseOptions opt;
  opt.units = cfg.units;
  opt.tz_offset_min = cfg.pipeline.tz_offset_min;
  opt.delimiter = cfg.delimiter;
  opt.cat_id = cat.id;
  return actocat::parse_imu_log(in, opt);
}

// The hash fingerprints the analysis inputs; the output location is not one.
std::string config_hash(const Config& cfg) {
  Json j = cfg.effective;
  j.erase("out");
  return actocat::fnv1a_hex(j.dump());
}

std::vector<actocat::DayContext> contexts_for_series(
    const Config& cfg, const actocat::SunTable& table,
    const actocat::SampleSeries& series) {
  const std::int64_t tz =
      static_cast<std::int64_t>(cfg.pipeline.tz_offset_min) *
      actocat::kMsPerMinute;
  const auto from = actocat::date_of(series.samples.front().t_ms + tz);
  const auto to = actocat::date_of(series.samples.back().t_ms + tz);
  return actocat::build_day_contexts(cfg.site, table, from, to);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path.string());
  out << content;
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

int cmd_calibrate(const Config& cfg) {
  std::vector<actocat::LabeledRecording> recs;
  for (const auto& cat : cfg.cats) {
    if (cat.labels_path.empty()) continue;
    auto parsed = parse_cat_samples(cfg, cat);
    std::ifstream lin(cat.labels_path);
    if (!lin) fail("cannot open labels " + cat.labels_path);
    actocat::LabelTrack track =
        actocat::parse_label_log(lin, cfg.taxonomy, cfg.delimiter);
    if (track.active.empty())
      fail("labels in " + cat.labels_path + " cover no time");
    recs.push_back({std::move(parsed.series), std::move(track)});
  }
  if (recs.empty()) fail("calibrate: no cats with label files");

  const actocat::CalibrationReport report =
      actocat::run_calibration(recs, cfg.pipeline);

  fs::create_directories(cfg.out_dir);
  const std::string hash = config_hash(cfg);
  write_file(fs::path(cfg.out_dir) / "calibration.json",
             actocat::to_json(report, hash, cfg.pipeline).dump(2) + "\n");
  std::ostringstream roc;
  actocat::write_roc_csv(roc, report.curve);
  write_file(fs::path(cfg.out_dir) / "roc.csv", roc.str());

  std::cout << "calibrate: " << report.n_pairs << " pairs, selected threshold "
            << report.selected.threshold << " (auc "
            << (report.curve.auc ? std::to_string(*report.curve.auc)
                                 : std::string("undefined"))
            << ", pearson r " << report.pearson.r << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

int cmd_analyze(Config cfg) {
  if (cfg.cats.empty()) fail("analyze: no cats configured");
  actocat::SunTable table;
  if (!cfg.sun_table_path.empty()) table = load_sun_table(cfg.sun_table_path);
  if (!cfg.site && table.empty())
    fail("analyze: need a site or a sun table for day/night context");

  double threshold = cfg.pipeline.threshold;
  if (cfg.threshold_from_calibration) {
    std::vector<actocat::LabeledRecording> recs;
    for (const auto& cat : cfg.cats) {
      if (cat.labels_path.empty()) continue;
      auto parsed = parse_cat_samples(cfg, cat);
      std::ifstream lin(cat.labels_path);
      if (!lin) fail("cannot open labels " + cat.labels_path);
      recs.push_back({std::move(parsed.series),
                      actocat::parse_label_log(lin, cfg.taxonomy,
                                               cfg.delimiter)});
    }
    if (recs.empty())
      fail("analyze: threshold=\"calibrate\" needs at least one labeled cat");
    threshold =
        actocat::run_calibration(recs, cfg.pipeline).selected.threshold;
  }
  cfg.pipeline.threshold = threshold;

  struct Slot {
    std::optional<actocat::CatAnalysis> analysis;
    std::string error;
  };
  std::vector<Slot> slots(cfg.cats.size());

  // Per-cat pipelines are independent; run them on all cores. The report
  // merge below is sequential and ordered, so output is deterministic.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < cfg.cats.size();
         i = next.fetch_add(1)) {
      try {
        auto parsed = parse_cat_samples(cfg, cfg.cats[i]);
        const auto contexts = contexts_for_series(cfg, table, parsed.series);
        actocat::CatAnalysis a =
            actocat::analyze_series(parsed.series, contexts, cfg.pipeline);
        a.skipped_rows = parsed.skipped_rows;
        if (cfg.dump_stages) {
          const auto sessions = actocat::assemble_sessions(
              parsed.series, cfg.pipeline.gap_threshold_s);
          std::ostringstream stages;
          actocat::write_stage_csv(stages, parsed.series, sessions,
                                   cfg.pipeline.threshold);
          fs::create_directories(cfg.out_dir);
          write_file(fs::path(cfg.out_dir) / (cfg.cats[i].id + "_stages.csv"),
                     stages.str());
        }
        slots[i].analysis = std::move(a);
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  {
    const unsigned n_workers = std::max(
        1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                               static_cast<unsigned>(cfg.cats.size())));
    std::vector<std::future<void>> futs;
    for (unsigned t = 0; t < n_workers; ++t)
      futs.push_back(std::async(std::launch::async, worker));
    for (auto& f : futs) f.get();
  }

  std::vector<actocat::CatAnalysis> cats;
  std::vector<std::string> failed;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].analysis) {
      cats.push_back(std::move(*slots[i].analysis));
    } else {
      failed.push_back(cfg.cats[i].id + ": " + slots[i].error);
      std::cerr << "actocat: cat " << cfg.cats[i].id << " failed: "
                << slots[i].error << "\n";
    }
  }
  if (cats.empty()) fail("analyze: every cat failed");

  const actocat::CohortStats stats = actocat::cohort_stats(cats, cfg.pipeline);
  const std::string hash = config_hash(cfg);

  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "analysis.json",
             actocat::analysis_json(hash, cfg.pipeline, threshold, cats,
                                    stats, failed)
                     .dump(2) +
                 "\n");
  std::ostringstream per_cat;
  actocat::write_per_cat_csv(per_cat, cats);
  write_file(fs::path(cfg.out_dir) / "per_cat.csv", per_cat.str());
  std::ostringstream fb, fd, fh;
  actocat::write_fig_budget_csv(fb, cats);
  actocat::write_fig_daynight_csv(fd, cats, stats);
  actocat::write_fig_hourly_csv(fh, cats, stats);
  write_file(fs::path(cfg.out_dir) / "fig_time_budget.csv", fb.str());
  write_file(fs::path(cfg.out_dir) / "fig_daynight.csv", fd.str());
  write_file(fs::path(cfg.out_dir) / "fig_hourly.csv", fh.str());

  std::cout << "analyze: " << cats.size() << " cats ok";
  if (!failed.empty()) std::cout << ", " << failed.size() << " failed";
  std::cout << ", threshold " << threshold << ", reports in " << cfg.out_dir
            << "\n";
  return failed.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int cmd_report(const Config& cfg, const std::string& in_path) {
  const std::string path =
      in_path.empty() ? (fs::path(cfg.out_dir) / "analysis.json").string()
                      : in_path;
  const Json j = load_json_file(path);

  std::ostringstream md;
  md << "# Activity analysis\n\n";
  md << "threshold: " << j.value("threshold", 0.0) << " m/s^3\n\n";
  md << "| cat | epochs | active % | day share % | sessions |\n";
  md << "|-----|--------|----------|-------------|----------|\n";
  char buf[256];
  for (const auto& c : j.at("cats")) {
    const auto& split = c.at("daynight");
    std::string day = split.at("day_share_pct").is_null()
                          ? "-"
                          : [&] {
                              char b[32];
                              std::snprintf(b, sizeof(b), "%.2f",
                                            split.at("day_share_pct")
                                                .get<double>());
                              return std::string(b);
                            }();
    std::snprintf(buf, sizeof(buf), "| %s | %zu | %.2f | %s | %zu |\n",
                  c.at("cat_id").get<std::string>().c_str(),
                  c.at("budget").at("epochs").get<std::size_t>(),
                  c.at("budget").at("active_pct").get<double>(), day.c_str(),
                  c.at("n_sessions").get<std::size_t>());
    md << buf;
  }
  if (j.contains("cohort") && j["cohort"].contains("active_pct")) {
    const auto& s = j["cohort"]["active_pct"];
    std::snprintf(buf, sizeof(buf),
                  "\ncohort activity: mean %.2f%%, std %.2f",
                  s.at("mean").get<double>(), s.at("stddev").get<double>());
    md << buf;
    md << ", outliers: ";
    if (s.at("outliers").empty())
      md << "none";
    else
      for (const auto& o : s.at("outliers")) md << o.get<std::string>() << " ";
    md << "\n";
  }
  if (j.contains("tests")) {
    md << "\n## Tests\n\n";
    for (const auto& [name, t] : j["tests"].items()) {
      if (t.is_null()) {
        md << "- " << name << ": not computed\n";
      } else if (t.contains("statistic")) {
        std::snprintf(buf, sizeof(buf), "- %s: statistic %.6g, p %.6g (%s)\n",
                      name.c_str(), t.at("statistic").get<double>(),
                      t.at("p_value").get<double>(),
                      t.at("method").get<std::string>().c_str());
        md << buf;
      } else if (t.contains("f")) {
        std::snprintf(buf, sizeof(buf), "- %s: F %.6g, p %.6g\n", name.c_str(),
                      t.at("f").get<double>(), t.at("p").get<double>());
        md << buf;
      } else if (t.contains("q_critical")) {
        std::size_t sig = 0;
        for (const auto& p : t.at("pairs"))
          if (p.at("significant").get<bool>()) ++sig;
        std::snprintf(buf, sizeof(buf),
                      "- %s: %zu significant pairs (q_crit %.4f)\n",
                      name.c_str(), sig, t.at("q_critical").get<double>());
        md << buf;
      }
    }
  }
  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "summary.md", md.str());
  std::cout << "report: wrote " << (fs::path(cfg.out_dir) / "summary.md").string()
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int cmd_synth(const Config& cfg) {
  const Json& sj = cfg.synth;
  const int n_cats = sj.value("n_cats", 12);
  const int days = sj.value("days", 21);
  const std::string start = sj.value("start_date", "2020-09-21");
  const auto start_date = actocat::parse_date(start);
  if (!start_date || n_cats < 1 || days < 1) fail("synth: bad parameters");

  // Daily active windows, local time. Default preset: bimodal feeding peaks
  // plus a short night bout, ~14.5% daily activity.
  std::vector<actocat::Interval> windows;
  if (sj.contains("windows")) {
    for (const auto& w : sj["windows"]) {
      const auto a = actocat::parse_time_of_day(w.at("start").get<std::string>());
      const auto b = actocat::parse_time_of_day(w.at("end").get<std::string>());
      if (!a || !b) fail("synth: bad window time");
      windows.emplace_back(*a, *b);
    }
  } else {
    windows = {{9 * actocat::kMsPerHour, 11 * actocat::kMsPerHour},
               {16 * actocat::kMsPerHour, 17 * actocat::kMsPerHour},
               {22 * actocat::kMsPerHour,
                22 * actocat::kMsPerHour + 30 * actocat::kMsPerMinute}};
  }
  const auto stagger_min = sj.value("per_cat_stagger_min", 5);

  actocat::NoiseModel base_noise;
  if (sj.contains("noise")) {
    const auto& nj = sj["noise"];
    base_noise.rest_jitter_sigma =
        nj.value("rest_jitter_sigma", base_noise.rest_jitter_sigma);
    base_noise.active_amp = nj.value("active_amp", base_noise.active_amp);
    base_noise.active_jitter_sigma =
        nj.value("active_jitter_sigma", base_noise.active_jitter_sigma);
  }

  // Collar recharge dropouts.
  const int drop_every = sj.value("dropout_every_days", 0);
  const int drop_minutes = sj.value("dropout_minutes", 30);
  std::vector<actocat::Interval> dropouts;

  fs::create_directories(cfg.out_dir);
  Json manifest;
  manifest["seed"] = cfg.seed;
  manifest["days"] = days;
  manifest["start_date"] = start;
  Json files = Json::array();

  for (int i = 0; i < n_cats; ++i) {
    std::vector<actocat::Interval> cat_windows = windows;
    // Vary the last window end per cat so budgets spread around the preset.
    if (!cat_windows.empty() && stagger_min > 0) {
      const std::int64_t delta = static_cast<std::int64_t>(
          ((i % 5) - 2) * stagger_min) * actocat::kMsPerMinute;
      cat_windows.back().second =
          std::max(cat_windows.back().first + 5 * actocat::kMsPerSecond,
                   cat_windows.back().second + delta);
    }
    actocat::ActivitySchedule schedule;
    try {
      schedule = actocat::ActivitySchedule::from_daily_windows(
          *start_date, days, cat_windows, cfg.pipeline.tz_offset_min);
    } catch (const actocat::Error& e) {
      fail(std::string("synth: invalid schedule: ") + e.what());
    }

    dropouts.clear();
    if (drop_every > 0) {
      const std::int64_t at_local =
          actocat::parse_time_of_day(sj.value("dropout_at", "09:00"))
              .value_or(9 * actocat::kMsPerHour);
      for (int d = 0; d < days; d += drop_every) {
        const std::int64_t t0 = schedule.span_start_ms +
                                static_cast<std::int64_t>(d) *
                                    actocat::kMsPerDay +
                                at_local;
        dropouts.emplace_back(
            t0, t0 + static_cast<std::int64_t>(drop_minutes) *
                         actocat::kMsPerMinute);
      }
    }

    char id[16];
    std::snprintf(id, sizeof(id), "cat%02d", i + 1);
    actocat::NoiseModel noise = base_noise;
    noise.seed = cfg.seed + static_cast<std::uint64_t>(i) * 7919;
    const actocat::SyntheticTrace trace =
        actocat::generate_trace(schedule, noise, cfg.pipeline.epoch_s,
                                dropouts, id);

    std::ostringstream samples;
    actocat::write_canonical_csv(samples, trace.series);
    const std::string sample_name = std::string(id) + ".csv";
    write_file(fs::path(cfg.out_dir) / sample_name, samples.str());

    std::ostringstream truth;
    truth << "t_iso,expected\n";
    for (std::size_t k = 0; k < trace.truth.t_ms.size(); ++k)
      truth << actocat::format_utc(trace.truth.t_ms[k]) << ","
            << static_cast<int>(trace.truth.expected[k]) << "\n";
    const std::string truth_name = std::string(id) + "_truth.csv";
    write_file(fs::path(cfg.out_dir) / truth_name, truth.str());

    // Label events tiling the schedule span, as a video coder would write.
    std::ostringstream labels;
    labels << "behavior,start,end\n";
    std::int64_t cursor = schedule.span_start_ms;
    for (const auto& iv : schedule.active) {
      if (iv.first > cursor)
        labels << "resting," << actocat::format_utc(cursor) << ","
               << actocat::format_utc(iv.first) << "\n";
      labels << "walking," << actocat::format_utc(iv.first) << ","
             << actocat::format_utc(iv.second) << "\n";
      cursor = iv.second;
    }
    if (cursor < schedule.span_end_ms)
      labels << "resting," << actocat::format_utc(cursor) << ","
             << actocat::format_utc(schedule.span_end_ms) << "\n";
    const std::string labels_name = std::string(id) + "_labels.csv";
    write_file(fs::path(cfg.out_dir) / labels_name, labels.str());

    Json f;
    f["id"] = id;
    f["samples"] = sample_name;
    f["truth"] = truth_name;
    f["labels"] = labels_name;
    f["active_fraction"] = schedule.active_fraction();
    files.push_back(f);
  }
  manifest["cats"] = files;
  write_file(fs::path(cfg.out_dir) / "manifest.json",
             manifest.dump(2) + "\n");
  std::cout << "synth: wrote " << n_cats << " fixture cats to " << cfg.out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMU collar actigraphy and circadian rhythm analytics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string threshold_text, site_text, sun_table, out_dir, report_in;
  double gap_threshold = -1.0;
  std::int64_t seed = -1;

  app.add_option("--config", config_path,
                 "JSON config file (default: $ACTOCAT_CONFIG)");
  app.add_option("--threshold", threshold_text,
                 "classification threshold in m/s^3, or 'calibrate'");
  app.add_option("--site", site_text,
                 "site preset name or 'lat,lon,tz_offset_min'");
  app.add_option("--sun-table", sun_table,
                 "CSV of date,sunrise_local,sunset_local overrides");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed for synth");
  app.add_option("--gap-threshold", gap_threshold,
                 "session gap threshold in seconds");

  auto* sub_cal = app.add_subcommand("calibrate",
                                     "ROC calibration from labeled data");
  auto* sub_ana = app.add_subcommand("analyze", "full rhythm analysis");
  auto* sub_rep = app.add_subcommand("report", "render analysis.json");
  sub_rep->add_option("--in", report_in, "analysis.json path");
  auto* sub_syn = app.add_subcommand("synth", "generate synthetic fixtures");
  for (auto* sub : {sub_cal, sub_ana, sub_rep, sub_syn})
    sub->fallthrough();  // global flags may follow the subcommand

  CLI11_PARSE(app, argc, argv);

  if (config_path.empty()) {
    if (const char* env = std::getenv("ACTOCAT_CONFIG")) config_path = env;
  }
  Json file_json = Json::object();
  if (!config_path.empty()) file_json = load_json_file(config_path);

  // Flags win over file values.
  if (!threshold_text.empty()) {
    if (threshold_text == "calibrate") {
      file_json["threshold"] = "calibrate";
    } else {
      try {
        file_json["threshold"] = std::stod(threshold_text);
      } catch (const std::exception&) {
        fail("--threshold wants a number or 'calibrate'");
      }
    }
  }
  if (!site_text.empty()) file_json["site"] = site_text;
  if (!sun_table.empty()) file_json["sun_table"] = sun_table;
  if (!out_dir.empty()) file_json["out"] = out_dir;
  if (seed >= 0) file_json["seed"] = static_cast<std::uint64_t>(seed);
  if (gap_threshold >= 0.0) file_json["gap_threshold_s"] = gap_threshold;

  Config cfg = build_config(file_json);

  try {
    if (sub_cal->parsed()) return cmd_calibrate(cfg);
    if (sub_ana->parsed()) return cmd_analyze(cfg);
    if (sub_rep->parsed()) return cmd_report(cfg, report_in);
    if (sub_syn->parsed()) return cmd_synth(cfg);
  } catch (const actocat::Error& e) {
    fail(e.what());
  } catch (const std::exception& e) {
    fail(std::string("unexpected error: ") + e.what());
  }
  return 2;
}

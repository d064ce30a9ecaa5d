#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "actocat/ingest.hpp"

using namespace actocat;

namespace {

std::string logger_header() {
  return "rtcDate,rtcTime,aX,aY,aZ,gX,gY,gZ,imu_degC\n";
}

std::string logger_row(const std::string& date, const std::string& time,
                       double ax, double ay, double az) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s,%s,%.2f,%.2f,%.2f,0.1,0.1,0.1,21.5\n",
                date.c_str(), time.c_str(), ax, ay, az);
  return buf;
}

ImuParseResult parse(const std::string& text, AccelUnits units,
                     int tz_offset_min = 0) {
  std::istringstream in(text);
  ImuParseOptions opt;
  opt.units = units;
  opt.tz_offset_min = tz_offset_min;
  opt.cat_id = "test";
  return parse_imu_log(in, opt);
}

}  // namespace

TEST_CASE("milli-g conversion, gravity on one axis") {
  const auto res = parse(logger_header() +
                             logger_row("09/21/2020", "09:00:00.00", 0, 0,
                                        1000),
                         AccelUnits::milli_g);
  REQUIRE(res.series.samples.size() == 1);
  const auto& s = res.series.samples.front();
  CHECK(s.ax == 0.0);
  CHECK(s.ay == 0.0);
  CHECK(s.az == Catch::Approx(9.80665).margin(1e-12));
  REQUIRE(s.temp_c.has_value());
  CHECK(*s.temp_c == Catch::Approx(21.5));
}

TEST_CASE("20 minutes at 0.2 Hz yields 240 samples") {
  std::string text = logger_header();
  for (int i = 0; i < 240; ++i) {
    char time[32];
    std::snprintf(time, sizeof(time), "09:%02d:%02d.00", i * 5 / 60,
                  (i * 5) % 60);
    text += logger_row("09/21/2020", time, 10.0, 20.0, 990.0);
  }
  const auto res = parse(text, AccelUnits::milli_g);
  CHECK(res.series.samples.size() == 240);
  CHECK(res.skipped_rows == 0);
}

TEST_CASE("malformed rows are skipped and counted, never interpolated") {
  const std::string text = logger_header() +
                           logger_row("09/21/2020", "09:00:00.00", 0, 0, 1000) +
                           "09/21/2020,09:00:05.00,not_a_number,0,1000,0,0,0,21\n" +
                           logger_row("09/21/2020", "09:00:10.00", 0, 0, 1000) +
                           logger_row("09/21/2020", "09:00:15.00", 0, 0, 1000);
  const auto res = parse(text, AccelUnits::milli_g);
  CHECK(res.series.samples.size() == 3);
  CHECK(res.skipped_rows == 1);
}

TEST_CASE("sensor range guard drops impossible rows") {
  // 2 g full scale with 5% slack: 2100 milli-g must survive, 2200 must not.
  const std::string text = logger_header() +
                           logger_row("09/21/2020", "09:00:00.00", 0, 0, 2099) +
                           logger_row("09/21/2020", "09:00:05.00", 0, 0, 2200);
  const auto res = parse(text, AccelUnits::milli_g);
  CHECK(res.series.samples.size() == 1);
  CHECK(res.skipped_rows == 1);
}

TEST_CASE("schema and empty-input errors") {
  std::istringstream missing("rtcDate,rtcTime,gX,gY,gZ\n");
  CHECK_THROWS_AS(parse_imu_log(missing), SchemaError);
  std::istringstream empty(logger_header());
  CHECK_THROWS_AS(parse_imu_log(empty), ParseError);
}

TEST_CASE("naked timestamps are local; Z-suffixed are UTC") {
  const auto local = parse(logger_header() +
                               logger_row("09/21/2020", "12:00:00.00", 0, 0,
                                          1000),
                           AccelUnits::milli_g, 120);
  CHECK(local.series.samples.front().t_ms == utc_ms({2020, 9, 21}, 10, 0, 0));

  std::istringstream canonical(
      "t_iso,ax,ay,az\n2020-09-21T10:00:00.000Z,0.0,0.0,9.80665\n");
  ImuParseOptions opt;
  opt.units = AccelUnits::m_per_s2;
  opt.tz_offset_min = 120;
  const auto utc = parse_imu_log(canonical, opt);
  CHECK(utc.series.samples.front().t_ms == utc_ms({2020, 9, 21}, 10, 0, 0));
}

TEST_CASE("small reorder tolerated, large disorder is an error") {
  const std::string ok = logger_header() +
                         logger_row("09/21/2020", "09:00:00.00", 0, 0, 1000) +
                         logger_row("09/21/2020", "09:00:10.00", 0, 0, 1000) +
                         logger_row("09/21/2020", "09:00:05.00", 0, 0, 1000) +
                         logger_row("09/21/2020", "09:00:15.00", 0, 0, 1000);
  const auto res = parse(ok, AccelUnits::milli_g);
  REQUIRE(res.series.samples.size() == 4);
  for (std::size_t i = 1; i < 4; ++i)
    CHECK(res.series.samples[i].t_ms > res.series.samples[i - 1].t_ms);

  std::string bad = logger_header();
  for (int i = 0; i < 6; ++i) {
    char time[32];
    std::snprintf(time, sizeof(time), "09:%02d:00.00", 10 + i);
    bad += logger_row("09/21/2020", time, 0, 0, 1000);
  }
  bad += logger_row("09/21/2020", "09:00:00.00", 0, 0, 1000);
  std::istringstream in(bad);
  ImuParseOptions opt;
  CHECK_THROWS_AS(parse_imu_log(in, opt), OrderingError);
}

TEST_CASE("duplicate timestamps dropped as malformed") {
  const std::string text = logger_header() +
                           logger_row("09/21/2020", "09:00:00.00", 0, 0, 1000) +
                           logger_row("09/21/2020", "09:00:00.00", 0, 0, 900) +
                           logger_row("09/21/2020", "09:00:05.00", 0, 0, 1000);
  const auto res = parse(text, AccelUnits::milli_g);
  CHECK(res.series.samples.size() == 2);
  CHECK(res.skipped_rows == 1);
}

TEST_CASE("unit conversion is linear and invertible") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mg(-2000.0, 2000.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = mg(rng);
    CHECK(ms2_to_milli_g(milli_g_to_ms2(v)) == Catch::Approx(v).margin(1e-9));
  }
}

TEST_CASE("deterministic parse: identical bytes, identical series") {
  std::string text = logger_header();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mg(-1500.0, 1500.0);
  for (int i = 0; i < 200; ++i) {
    char time[32];
    std::snprintf(time, sizeof(time), "09:%02d:%02d.00", i / 12,
                  (i % 12) * 5);
    text += logger_row("09/21/2020", time, mg(rng), mg(rng), mg(rng));
  }
  const auto a = parse(text, AccelUnits::milli_g);
  const auto b = parse(text, AccelUnits::milli_g);
  REQUIRE(a.series.samples.size() == b.series.samples.size());
  for (std::size_t i = 0; i < a.series.samples.size(); ++i) {
    CHECK(a.series.samples[i].t_ms == b.series.samples[i].t_ms);
    CHECK(a.series.samples[i].ax == b.series.samples[i].ax);
    CHECK(a.series.samples[i].ay == b.series.samples[i].ay);
    CHECK(a.series.samples[i].az == b.series.samples[i].az);
  }
}

TEST_CASE("canonical CSV round trip through the parser") {
  SampleSeries s;
  s.cat_id = "rt";
  for (int i = 0; i < 50; ++i)
    s.samples.push_back(ImuSample{utc_ms({2020, 9, 21}, 9, 0, i * 5),
                                  0.123456, -1.5, 9.80665, std::nullopt});
  std::ostringstream out;
  write_canonical_csv(out, s);
  std::istringstream in(out.str());
  ImuParseOptions opt;
  opt.units = AccelUnits::m_per_s2;
  const auto back = parse_imu_log(in, opt);
  REQUIRE(back.series.samples.size() == 50);
  CHECK(back.series.samples.front().t_ms == s.samples.front().t_ms);
  CHECK(back.series.samples.front().ax == Catch::Approx(0.123456));
}

// --- labels ---------------------------------------------------------------

TEST_CASE("sleeping rasterizes to zeros, eating to ones") {
  const auto tax = default_taxonomy();
  const std::int64_t t0 = utc_ms({2020, 9, 21}, 9, 0, 0);
  {
    const LabelTrack track =
        rasterize_labels({{"sleeping", t0, t0 + 10 * kMsPerSecond}}, tax);
    REQUIRE(track.active.size() == 10);
    for (auto v : track.active) CHECK(v == 0);
  }
  {
    const LabelTrack track =
        rasterize_labels({{"eating", t0, t0 + 5 * kMsPerSecond}}, tax);
    REQUIRE(track.active.size() == 5);
    for (auto v : track.active) CHECK(v == 1);
  }
}

TEST_CASE("empty event list yields empty track") {
  const LabelTrack track = rasterize_labels({}, default_taxonomy());
  CHECK(track.active.empty());
}

TEST_CASE("unknown behavior and contradictory overlap") {
  const auto tax = default_taxonomy();
  const std::int64_t t0 = utc_ms({2020, 9, 21}, 9, 0, 0);
  CHECK_THROWS_AS(rasterize_labels({{"levitating", t0, t0 + 1000}}, tax),
                  TaxonomyError);
  CHECK_THROWS_AS(
      rasterize_labels({{"sleeping", t0, t0 + 10000},
                        {"walking", t0 + 5000, t0 + 8000}},
                       tax),
      ConflictError);
  // Agreeing overlap is fine.
  const LabelTrack ok = rasterize_labels({{"sleeping", t0, t0 + 10000},
                                          {"resting", t0 + 5000, t0 + 8000}},
                                         tax);
  CHECK(ok.active.size() == 10);
}

TEST_CASE("coverage gap between events is an error") {
  const auto tax = default_taxonomy();
  const std::int64_t t0 = utc_ms({2020, 9, 21}, 9, 0, 0);
  CHECK_THROWS_AS(rasterize_labels({{"sleeping", t0, t0 + 5000},
                                    {"walking", t0 + 8000, t0 + 12000}},
                                   tax),
                  CoverageError);
}

TEST_CASE("label CSV parser") {
  std::istringstream in(
      "behavior,start,end\n"
      "sleeping,2020-09-21T09:00:00Z,2020-09-21T09:00:10Z\n"
      "walking,2020-09-21T09:00:10Z,2020-09-21T09:00:20Z\n");
  const LabelTrack track = parse_label_log(in, default_taxonomy());
  REQUIRE(track.active.size() == 20);
  CHECK(track.active[0] == 0);
  CHECK(track.active[9] == 0);
  CHECK(track.active[10] == 1);
  CHECK(track.active[19] == 1);
}

// --- sessions ---------------------------------------------------------------

namespace {
SampleSeries series_with_gaps(const std::vector<std::int64_t>& times) {
  SampleSeries s;
  for (auto t : times)
    s.samples.push_back(ImuSample{t, 0.0, 0.0, 9.80665, std::nullopt});
  return s;
}
}  // namespace

TEST_CASE("uniform 5 s spacing forms one session") {
  std::vector<std::int64_t> t;
  for (int i = 0; i < 100; ++i) t.push_back(i * 5000);
  const auto sessions = assemble_sessions(series_with_gaps(t));
  REQUIRE(sessions.size() == 1);
  CHECK(sessions.front().size() == 100);
  CHECK(sessions.front().gap_before_s == 0.0);
}

TEST_CASE("a 2 hour gap splits into two sessions") {
  std::vector<std::int64_t> t;
  for (int i = 0; i < 10; ++i) t.push_back(i * 5000);
  const std::int64_t resume = t.back() + 7200 * 1000;
  for (int i = 0; i < 10; ++i) t.push_back(resume + i * 5000);
  const auto sessions = assemble_sessions(series_with_gaps(t));
  REQUIRE(sessions.size() == 2);
  CHECK(sessions[1].gap_before_s == Catch::Approx(7200.0));
}

TEST_CASE("sessions partition the series") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> gap(1, 40);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> t{0};
    for (int i = 0; i < 200; ++i) t.push_back(t.back() + gap(rng) * 1000);
    const auto series = series_with_gaps(t);
    const auto sessions = assemble_sessions(series, 15.0);
    std::size_t covered = 0;
    std::size_t expect_first = 0;
    for (const auto& ses : sessions) {
      CHECK(ses.first == expect_first);
      CHECK(ses.last >= ses.first);
      covered += ses.size();
      expect_first = ses.last + 1;
    }
    CHECK(covered == series.samples.size());
  }
}

TEST_CASE("empty series yields no sessions") {
  CHECK(assemble_sessions(series_with_gaps({})).empty());
}

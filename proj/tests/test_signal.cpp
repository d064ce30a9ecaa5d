#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "actocat/signal.hpp"
#include "actocat/synthkit.hpp"

using namespace actocat;

TEST_CASE("magnitude basics") {
  CHECK(accel_magnitude(0.0, 0.0, 9.80665) ==
        Catch::Approx(9.80665).margin(1e-12));
  CHECK(accel_magnitude(3.0, 4.0, 0.0) == Catch::Approx(5.0).margin(1e-12));
  CHECK(accel_magnitude(0.0, 0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(
      accel_magnitude(std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0),
      NumericError);
}

TEST_CASE("magnitude is rotation invariant") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307);
  for (int i = 0; i < 500; ++i) {
    const double x = g(rng) * 5, y = g(rng) * 5, z = g(rng) * 5;
    // random rotation: compose rotations about z then x
    const double a = angle(rng), b = angle(rng);
    const double x1 = x * std::cos(a) - y * std::sin(a);
    const double y1 = x * std::sin(a) + y * std::cos(a);
    const double z1 = z;
    const double y2 = y1 * std::cos(b) - z1 * std::sin(b);
    const double z2 = y1 * std::sin(b) + z1 * std::cos(b);
    CHECK(accel_magnitude(x1, y2, z2) ==
          Catch::Approx(accel_magnitude(x, y, z)).margin(1e-9));
  }
}

TEST_CASE("derivative formula and stamping") {
  const std::vector<std::int64_t> t{0, 5000};
  {
    const auto d = accel_derivative(t, std::vector<double>{10.0, 10.5});
    REQUIRE(d.da.size() == 1);
    CHECK(d.da[0] == Catch::Approx(0.1).margin(1e-12));
    CHECK(d.t_ms[0] == 5000);  // stamped at the later sample
  }
  {
    const auto d = accel_derivative(t, std::vector<double>{10.0, 9.0});
    CHECK(d.da[0] == Catch::Approx(0.2).margin(1e-12));  // absolute value
  }
  {
    const std::vector<std::int64_t> tc{0, 5000, 10000, 15000};
    const auto d =
        accel_derivative(tc, std::vector<double>{9.8, 9.8, 9.8, 9.8});
    for (double v : d.da) CHECK(v == 0.0);  // gravity cancels
  }
}

TEST_CASE("derivative edge cases") {
  CHECK(accel_derivative(std::vector<std::int64_t>{0},
                         std::vector<double>{1.0})
            .da.empty());
  CHECK_THROWS_AS(accel_derivative(std::vector<std::int64_t>{0, 0},
                                   std::vector<double>{1.0, 2.0}),
                  NumericError);
  // irregular spacing divides by the actual dt
  const auto d = accel_derivative(std::vector<std::int64_t>{0, 2000},
                                  std::vector<double>{10.0, 10.5});
  CHECK(d.da[0] == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("derivative never bridges session gaps") {
  SampleSeries s;
  for (int i = 0; i < 5; ++i)
    s.samples.push_back(ImuSample{i * 5000, 0, 0, 9.80665, std::nullopt});
  // recharge gap, then the collar comes back in a different pose
  const std::int64_t resume = 4 * 5000 + 3600 * 1000;
  for (int i = 0; i < 5; ++i)
    s.samples.push_back(
        ImuSample{resume + i * 5000, 9.80665, 0, 0, std::nullopt});
  const auto sessions = assemble_sessions(s, 15.0);
  REQUIRE(sessions.size() == 2);
  const auto deriv = derivative_over_sessions(s, sessions);
  CHECK(deriv.da.size() == 8);  // 4 per session, no cross-gap point
  for (double v : deriv.da) CHECK(v == 0.0);
}

TEST_CASE("classification threshold rule is strictly greater") {
  DerivativeSeries d;
  d.t_ms = {5000, 10000, 15000};
  d.da = {0.03, 0.025, 0.0};
  const auto levels = classify_activity(d, 0.025);
  REQUIRE(levels.level.size() == 3);
  CHECK(levels.level[0] == 1);  // exceeds
  CHECK(levels.level[1] == 0);  // boundary equality -> inactive
  CHECK(levels.level[2] == 0);
  CHECK_THROWS_AS(classify_activity(d, -0.1), ParamError);
}

TEST_CASE("gravity invariance for any orientation and threshold") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> thr(1e-9, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    double ox = g(rng), oy = g(rng), oz = g(rng);
    const double n = std::sqrt(ox * ox + oy * oy + oz * oz);
    ox /= n;
    oy /= n;
    oz /= n;
    SampleSeries s;
    for (int i = 0; i < 200; ++i)
      s.samples.push_back(ImuSample{i * 5000, ox * 9.80665, oy * 9.80665,
                                    oz * 9.80665, std::nullopt});
    const auto sessions = assemble_sessions(s);
    const auto deriv = derivative_over_sessions(s, sessions);
    const auto levels = classify_activity(deriv, thr(rng));
    for (auto v : levels.level) CHECK(v == 0);
  }
}

TEST_CASE("raising the threshold never adds active epochs") {
  std::mt19937_64 rng(31);
  std::exponential_distribution<double> mag(20.0);
  DerivativeSeries d;
  for (int i = 0; i < 500; ++i) {
    d.t_ms.push_back((i + 1) * 5000);
    d.da.push_back(mag(rng));
  }
  std::size_t prev = d.da.size() + 1;
  for (double thr : {0.0, 0.01, 0.02, 0.05, 0.1, 0.3}) {
    const auto levels = classify_activity(d, thr);
    std::size_t ones = 0;
    for (auto v : levels.level) ones += v;
    CHECK(ones <= prev);
    prev = ones;
  }
}

TEST_CASE("pipeline determinism") {
  ActivitySchedule sched;
  sched.span_start_ms = 0;
  sched.span_end_ms = 6 * kMsPerHour;
  sched.active = {{kMsPerHour, 2 * kMsPerHour}};
  NoiseModel noise;
  noise.seed = 99;
  const auto t1 = generate_trace(sched, noise);
  const auto t2 = generate_trace(sched, noise);
  const auto run = [](const SampleSeries& s) {
    const auto sessions = assemble_sessions(s);
    return classify_activity(derivative_over_sessions(s, sessions), 0.025);
  };
  const auto l1 = run(t1.series), l2 = run(t2.series);
  REQUIRE(l1.level.size() == l2.level.size());
  CHECK(l1.level == l2.level);
  CHECK(l1.t_ms == l2.t_ms);
}

TEST_CASE("expectation downsampling at the 20% rule") {
  LabelTrack track;
  track.start_ms = 0;
  SECTION("one active second out of five is enough") {
    track.active = {1, 0, 0, 0, 0};
    const auto e = expectation_downsample(track);
    REQUIRE(e.expected.size() == 1);
    CHECK(e.expected[0] == 1);
  }
  SECTION("all inactive stays inactive") {
    track.active = {0, 0, 0, 0, 0};
    CHECK(expectation_downsample(track).expected[0] == 0);
  }
  SECTION("all active stays active") {
    track.active = {1, 1, 1, 1, 1};
    CHECK(expectation_downsample(track).expected[0] == 1);
  }
  SECTION("trailing partial window dropped") {
    track.active = {1, 1, 1, 1, 1, 1, 1};
    CHECK(expectation_downsample(track).expected.size() == 1);
  }
  SECTION("bad parameters") {
    track.active = {1, 1, 1, 1, 1};
    CHECK_THROWS_AS(expectation_downsample(track, 0.0), ParamError);
    CHECK_THROWS_AS(expectation_downsample(track, 5.0, 0.0), ParamError);
  }
}

TEST_CASE("intensity counts per minute") {
  ActivityLevelSeries levels;
  levels.period_s = 5.0;
  SECTION("twelve ones give 12, twelve zeros give 0, alternating gives 6") {
    for (int i = 0; i < 36; ++i) {
      levels.t_ms.push_back(i * 5000);
      levels.level.push_back(i < 12 ? 1 : (i < 24 ? 0 : (i % 2 == 0 ? 1 : 0)));
    }
    const auto in = activity_intensity(levels);
    REQUIRE(in.count.size() == 3);
    CHECK(in.count[0] == 12);
    CHECK(in.count[1] == 0);
    CHECK(in.count[2] == 6);
  }
  SECTION("partial trailing minute dropped") {
    for (int i = 0; i < 18; ++i) {
      levels.t_ms.push_back(i * 5000);
      levels.level.push_back(1);
    }
    const auto in = activity_intensity(levels);
    REQUIRE(in.count.size() == 1);
    CHECK(in.count[0] == 12);
  }
}

TEST_CASE("intensity conservation over whole minutes") {
  std::mt19937_64 rng(37);
  std::bernoulli_distribution coin(0.3);
  ActivityLevelSeries levels;
  levels.period_s = 5.0;
  for (int i = 0; i < 240; ++i) {  // exactly 20 minutes
    levels.t_ms.push_back(i * 5000);
    levels.level.push_back(coin(rng) ? 1 : 0);
  }
  const auto in = activity_intensity(levels);
  int total = 0;
  for (int c : in.count) {
    CHECK(c >= 0);
    CHECK(c <= 12);
    total += c;
  }
  int ones = 0;
  for (auto v : levels.level) ones += v;
  CHECK(total == ones);
}

TEST_CASE("alignment on identical, shifted and disjoint grids") {
  std::vector<std::int64_t> est, exp;
  for (int i = 0; i < 100; ++i) est.push_back(i * 5000);
  SECTION("identical grids match fully") {
    const auto a = align_epochs(est, est, 1.0);
    CHECK(a.pairs.size() == 100);
    CHECK(a.unmatched_estimates == 0);
    CHECK(a.unmatched_expectations == 0);
  }
  SECTION("a half-second shift stays within tolerance") {
    for (auto t : est) exp.push_back(t + 500);
    const auto a = align_epochs(est, exp, 1.0);
    CHECK(a.pairs.size() == 100);
  }
  SECTION("disjoint series throw") {
    for (int i = 0; i < 100; ++i) exp.push_back(10'000'000 + i * 5000);
    CHECK_THROWS_AS(align_epochs(est, exp, 1.0), AlignmentError);
  }
}

TEST_CASE("stage dump matches pipeline stages") {
  SampleSeries s;
  s.cat_id = "dump";
  for (int i = 0; i < 4; ++i)
    s.samples.push_back(ImuSample{i * 5000, 0, 0, 9.80665, std::nullopt});
  s.samples[2].az = 11.0;
  const auto sessions = assemble_sessions(s);
  std::ostringstream out;
  write_stage_csv(out, s, sessions, 0.025);
  const std::string text = out.str();
  CHECK(text.find("t_iso,magnitude,derivative,level") == 0);
  CHECK(text.find(",1\n") != std::string::npos);   // the jump epoch
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);  // header + 4 rows
}

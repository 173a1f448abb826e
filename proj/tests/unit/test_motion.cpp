#include <doctest.h>

#include <cmath>

#include "radmon/errors.hpp"
#include "radmon/sim/motion.hpp"
#include "radmon/sim/simulator.hpp"

using namespace radmon::sim;
using radmon::Err;
using radmon::Error;

namespace {

DerivedParams full_params() { return derive_params(ChirpConfig{}); }

double mean_abs_speed(const Trajectory& tr, double dur) {
  double acc = 0;
  int n = 0;
  for (double t = 0; t <= dur; t += 5e-3, ++n) acc += std::abs(tr.v(t));
  return acc / n;
}

// Sign changes per second of the detrended limb trace; a pure tone at f
// crosses zero 2f times per second.
double crossing_rate(const Trajectory& limb, double dur) {
  int crossings = 0;
  double prev = limb.r(0.0) - limb.path.front().r_m;
  int samples = 0;
  for (double t = 1e-3; t <= dur; t += 1e-3, ++samples) {
    // subtract the piecewise-linear base to leave only the oscillation
    Trajectory base;
    base.path = limb.path;
    const double d = limb.r(t) - base.r(t);
    if ((d > 0) != (prev > 0)) ++crossings;
    prev = d;
  }
  return crossings / dur;
}

}  // namespace

TEST_SUITE("motion") {

TEST_CASE("activity names round-trip and unknown names are rejected") {
  for (int i = 0; i < kNumActivities; ++i) {
    const auto a = static_cast<Activity>(i);
    CHECK(activity_from_string(activity_name(a)) == a);
  }
  try {
    activity_from_string("Jogging");
    FAIL("expected UnknownActivity");
  } catch (const Error& e) {
    CHECK(e.code() == Err::UnknownActivity);
  }
}

TEST_CASE("analytic velocity matches a central difference of the range") {
  Trajectory tr;
  tr.path = {{0.0, 2.0}, {3.0, 3.1}, {5.0, 3.1}, {8.0, 1.9}};
  Oscillation gated;
  gated.amp_m = 0.12;
  gated.freq_hz = 1.3;
  gated.phase_rad = 0.7;
  gated.gate_period_s = 3.0;
  gated.gate_on_s = 1.6;
  gated.gate_ramp_s = 0.4;
  gated.gate_offset_s = 0.5;
  tr.osc.push_back(gated);
  Oscillation plain;
  plain.amp_m = 0.03;
  plain.freq_hz = 4.0;
  tr.osc.push_back(plain);

  const double h = 1e-6;
  for (double t = 0.05; t < 8.0; t += 0.0137) {
    // skip path-knot corners where the derivative jumps
    bool near_knot = false;
    for (const auto& k : tr.path) near_knot |= std::abs(t - k.t_s) < 2 * h;
    if (near_knot) continue;
    const double fd = (tr.r(t + h) - tr.r(t - h)) / (2 * h);
    CHECK(tr.v(t) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("scripts are deterministic in (activity, duration, seed)") {
  const auto dp = full_params();
  const auto a = make_script(Activity::Vacuuming, 8.0, 21, dp);
  const auto b = make_script(Activity::Vacuuming, 8.0, 21, dp);
  REQUIRE(a.scatterers.size() == b.scatterers.size());
  for (size_t i = 0; i < a.scatterers.size(); ++i) {
    CHECK(a.scatterers[i].azimuth_rad == b.scatterers[i].azimuth_rad);
    REQUIRE(a.scatterers[i].traj.osc.size() == b.scatterers[i].traj.osc.size());
    for (size_t j = 0; j < a.scatterers[i].traj.osc.size(); ++j) {
      CHECK(a.scatterers[i].traj.osc[j].amp_m == b.scatterers[i].traj.osc[j].amp_m);
      CHECK(a.scatterers[i].traj.osc[j].freq_hz == b.scatterers[i].traj.osc[j].freq_hz);
    }
  }
}

TEST_CASE("distinct walking seeds give distinct torso waypoint sequences") {
  const auto dp = full_params();
  const auto a = make_script(Activity::Walking, 10.0, 1, dp);
  const auto b = make_script(Activity::Walking, 10.0, 2, dp);
  const auto& pa = a.scatterers[0].traj.path;
  const auto& pb = b.scatterers[0].traj.path;
  bool differ = pa.size() != pb.size();
  for (size_t i = 0; !differ && i < pa.size(); ++i)
    differ = pa[i].t_s != pb[i].t_s || pa[i].r_m != pb[i].r_m;
  CHECK(differ);
}

TEST_CASE("walking torso speed and limb rates sit in the gait band") {
  const auto dp = full_params();
  const auto m = make_script(Activity::Walking, 10.0, 1, dp);
  REQUIRE(m.scatterers.size() >= 3);

  const double mean_v = mean_abs_speed(m.scatterers[0].traj, m.duration_s);
  CHECK(mean_v >= 0.8);
  CHECK(mean_v <= 1.6);

  const double f_stride = m.scatterers[0].traj.osc.at(0).freq_hz;
  for (size_t i = 1; i < m.scatterers.size(); ++i) {
    const auto& limb = m.scatterers[i].traj;
    REQUIRE(limb.osc.size() == 1);
    CHECK(limb.osc[0].freq_hz == doctest::Approx(2.0 * f_stride));
    // detrended trace really oscillates at that rate
    CHECK(crossing_rate(limb, m.duration_s) ==
          doctest::Approx(2.0 * limb.osc[0].freq_hz).epsilon(0.15));
  }
}

TEST_CASE("every non-empty script has a torso plus at least two limbs") {
  const auto dp = full_params();
  for (int cls = 1; cls < kNumActivities; ++cls) {
    for (uint64_t seed : {1, 2, 3, 4, 5}) {
      const auto m = make_script(static_cast<Activity>(cls), 12.0, seed, dp);
      CHECK(m.scatterers.size() >= 3);
      CHECK(m.duration_s == 12.0);
    }
  }
  CHECK(make_script(Activity::Empty, 12.0, 1, dp).scatterers.empty());
}

TEST_CASE("scripts respect range and velocity limits across seeds and classes") {
  const auto dp = full_params();
  for (int cls = 0; cls < kNumActivities; ++cls)
    for (uint64_t seed : {11, 12, 13})
      CHECK_NOTHROW(make_script(static_cast<Activity>(cls), 15.0, seed, dp)
                        .check_bounds(dp.max_range_m, dp.max_velocity_mps));
}

TEST_CASE("subject profiles perturb but stay near the template") {
  for (uint64_t id : {0, 1, 2, 7, 100}) {
    const auto p = SubjectProfile::from_id(id);
    CHECK(p.amp_factor == SubjectProfile::from_id(id).amp_factor);
    CHECK(p.amp_factor >= 0.85);
    CHECK(p.amp_factor <= 1.15);
    CHECK(p.freq_factor >= 0.85);
    CHECK(p.freq_factor <= 1.15);
  }
  CHECK(SubjectProfile::from_id(1).amp_factor != SubjectProfile::from_id(2).amp_factor);
}

TEST_CASE("five seconds of frames at the published frame period is 51 frames") {
  // same chirp/frame timing as the published config, downscaled sampling so
  // the cube stays small; frame count depends only on the time axis
  auto cfg = ChirpConfig{};
  cfg.num_channels = 1;
  cfg.fs_hz /= 3.0;
  cfg.samples_per_chirp = 102;
  cfg.noise_floor = 0.0;
  const auto dp = derive_params(cfg);
  const auto m = make_script(Activity::Walking, 5.0, 1, dp);
  const auto cube = simulate(cfg, m, 1);
  CHECK(cube.num_frames == 51);
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>
#include <cstring>

#include "radmon/errors.hpp"
#include "radmon/sim/simulator.hpp"
#include "support/oracles.hpp"

using namespace radmon::sim;
using radmon::Err;
using radmon::Error;

namespace {

// Exact-bandwidth variant: makes the DFT bin pitch coincide with the derived
// range resolution, so peak-bin predictions are integer-exact.
ChirpConfig exact_cfg() {
  ChirpConfig cfg;
  cfg.bandwidth_hz = cfg.slope_hz_per_s * cfg.samples_per_chirp / cfg.fs_hz;
  cfg.num_channels = 2;
  cfg.noise_floor = 0.01;
  return cfg;
}

MotionScript static_scene(double r, double amplitude = 1.0, double az = 0.0) {
  MotionScript m;
  m.activity = Activity::Sedentary;
  m.duration_s = 1.0;
  Scatterer s;
  s.amplitude = amplitude;
  s.azimuth_rad = az;
  s.traj.path = {{0.0, r}};
  m.scatterers.push_back(s);
  return m;
}

}  // namespace

TEST_SUITE("simulator") {

// The beat phasor rotates clockwise (e^-jwt), so a target at range bin q
// concentrates raw-chirp energy at DFT bin n-q; the range-profile stage undoes
// the mirroring. These tests pin the raw convention with a direct DFT oracle.
TEST_CASE("static scatterer lands on the predicted (mirrored) range bin") {
  const auto cfg = exact_cfg();
  const auto d = derive_params(cfg);
  const auto script = static_scene(2.0);

  const auto chirp = synthesize_chirp(cfg, script, 7, 0.0);
  const auto spec = oracle::dft(oracle::to_cd(chirp.data(), cfg.samples_per_chirp));
  const auto peak = oracle::argmax_mag(spec, spec.size());

  CHECK(std::lround(2.0 / d.range_resolution_m) == 52);
  CHECK(peak == cfg.samples_per_chirp - 52);
}

TEST_CASE("beat frequency scales with range") {
  const auto cfg = exact_cfg();
  const auto d = derive_params(cfg);
  for (double r : {1.0, 3.25, 5.0}) {
    const auto chirp = synthesize_chirp(cfg, static_scene(r), 7, 0.0);
    const auto spec = oracle::dft(oracle::to_cd(chirp.data(), cfg.samples_per_chirp));
    const auto peak = oracle::argmax_mag(spec, spec.size());
    CHECK(static_cast<long>(peak) ==
          cfg.samples_per_chirp - std::lround(r / d.range_resolution_m));
  }
}

TEST_CASE("constant velocity advances the slow-time phase at 4 pi v Tc / lambda") {
  auto cfg = exact_cfg();
  cfg.noise_floor = 0.0;
  cfg.phase_noise_sigma_rad = 0.0;
  const auto d = derive_params(cfg);
  const double v = 0.8;

  MotionScript m;
  m.duration_s = 1.0;
  Scatterer s;
  s.traj.path = {{0.0, 2.0}, {1.0, 2.0 + v}};
  m.scatterers.push_back(s);

  // compare sample 0 of consecutive chirps: expected inter-chirp phase step
  const auto c0 = synthesize_chirp(cfg, m, 3, 0.1);
  const auto c1 = synthesize_chirp(cfg, m, 3, 0.1 + cfg.chirp_period_s);
  const double got = std::arg(std::complex<double>(c1[0]) / std::complex<double>(c0[0]));
  // beat-frequency term at sample 0 is zero, so only the range phase moves
  double want = -4.0 * oracle::kPi * v * cfg.chirp_period_s / d.lambda_m;
  want = std::remainder(want, 2.0 * oracle::kPi);
  CHECK(got == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("two channels at boresight see the same signal when mismatch is off") {
  auto cfg = exact_cfg();
  cfg.noise_floor = 0.0;
  cfg.phase_noise_sigma_rad = 0.0;
  cfg.channel_phase_mismatch_rad = 0.0;
  const auto chirp = synthesize_chirp(cfg, static_scene(2.0, 1.0, 0.0), 11, 0.0);
  const int n = cfg.samples_per_chirp;
  for (int k = 0; k < n; ++k) {
    CHECK(chirp[k].real() == doctest::Approx(chirp[n + k].real()).epsilon(1e-7));
    CHECK(chirp[k].imag() == doctest::Approx(chirp[n + k].imag()).epsilon(1e-7));
  }
}

TEST_CASE("off-boresight target shows the half-wavelength ULA phase ramp") {
  auto cfg = exact_cfg();
  cfg.noise_floor = 0.0;
  cfg.phase_noise_sigma_rad = 0.0;
  cfg.channel_phase_mismatch_rad = 0.0;
  cfg.num_channels = 4;
  const double az = 0.3;
  const auto chirp = synthesize_chirp(cfg, static_scene(2.0, 1.0, az), 11, 0.0);
  const int n = cfg.samples_per_chirp;
  const double expect = -oracle::kPi * std::sin(az);
  for (int l = 1; l < 4; ++l) {
    const double got =
        std::arg(std::complex<double>(chirp[l * n]) / std::complex<double>(chirp[(l - 1) * n]));
    CHECK(got == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("simulation is bit-identical for a fixed seed") {
  auto cfg = exact_cfg();
  const auto d = derive_params(cfg);
  const auto script = make_script(Activity::Walking, 0.5, 42, d);
  const auto a = simulate(cfg, script, 99);
  const auto b = simulate(cfg, script, 99);
  REQUIRE(a.data.size() == b.data.size());
  CHECK(std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(cf32)) == 0);

  const auto c = simulate(cfg, script, 100);
  CHECK(std::memcmp(a.data.data(), c.data.data(), a.data.size() * sizeof(cf32)) != 0);
}

TEST_CASE("noise floor sets the sample variance of an empty scene") {
  auto cfg = exact_cfg();
  cfg.noise_floor = 0.25;
  MotionScript empty;
  empty.duration_s = 0.2;
  const auto cube = simulate(cfg, empty, 5);
  double acc = 0;
  for (const auto& z : cube.data) acc += std::norm(z);
  const double mean_power = acc / cube.data.size();
  CHECK(mean_power == doctest::Approx(cfg.noise_floor * cfg.noise_floor).epsilon(0.02));
}

TEST_CASE("out-of-range and ambiguous-velocity scenes are rejected") {
  const auto cfg = exact_cfg();
  const auto d = derive_params(cfg);

  SUBCASE("range beyond max") {
    auto bad = static_scene(d.max_range_m + 0.5);
    bad.duration_s = 0.2;
    CHECK_THROWS_WITH_AS(simulate(cfg, bad, 1), doctest::Contains("RangeOutOfBound"), Error);
  }
  SUBCASE("velocity beyond max") {
    MotionScript m;
    m.duration_s = 0.2;
    Scatterer s;
    s.traj.path = {{0.0, 1.0}, {0.2, 1.0 + 0.2 * (d.max_velocity_mps * 1.2)}};
    m.scatterers.push_back(s);
    try {
      simulate(cfg, m, 1);
      FAIL("expected VelocityAmbiguous");
    } catch (const Error& e) {
      CHECK(e.code() == Err::VelocityAmbiguous);
    }
  }
}

TEST_CASE("streamed frames equal the materialized cube") {
  auto cfg = exact_cfg();
  const auto d = derive_params(cfg);
  const auto script = make_script(Activity::Washing, 0.4, 5, d);
  const auto cube = simulate(cfg, script, 17);

  int seen = 0;
  stream_frames(cfg, script, 17, cube.num_frames, 0.0, [&](const FrameView& v) {
    CHECK(std::memcmp(v.data, cube.frame(v.frame_index), cube.frame_size() * sizeof(cf32)) == 0);
    ++seen;
    return true;
  });
  CHECK(seen == cube.num_frames);
}

}  // TEST_SUITE

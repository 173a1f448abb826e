#include "radmon/sim/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "radmon/errors.hpp"
#include "radmon/rng.hpp"

namespace radmon::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr uint64_t kAlphaStream = 0xA1u;
constexpr uint64_t kChirpStream = 0xC417u;

using cd = std::complex<double>;

// Per-run synthesis state: channel phase offsets alpha_l (fixed per run) and
// the per-scatterer ULA geometry terms exp(-j pi l sin(az)).
class Engine {
 public:
  Engine(const ChirpConfig& cfg, const MotionScript& script, uint64_t seed)
      : cfg_(cfg), script_(script), seed_(seed), dp_(derive_params(cfg)) {
    cfg_.validate();
    Rng a(derive_seed(seed_, kAlphaStream));
    std::uniform_real_distribution<double> ua(-cfg_.channel_phase_mismatch_rad,
                                               cfg_.channel_phase_mismatch_rad);
    alpha_.resize(cfg_.num_channels);
    for (auto& x : alpha_) x = cfg_.channel_phase_mismatch_rad > 0 ? ua(a) : 0.0;

    geom_.resize(script_.scatterers.size() * cfg_.num_channels);
    for (size_t s = 0; s < script_.scatterers.size(); ++s) {
      const double sin_az = std::sin(script_.scatterers[s].azimuth_rad);
      for (int l = 0; l < cfg_.num_channels; ++l)
        geom_[s * cfg_.num_channels + l] = std::polar(1.0, -kPi * l * sin_az);
    }
  }

  // out: [channel][sample] for the chirp with the given global index.
  void render_chirp(int64_t chirp_global, cf32* out) {
    const int L = cfg_.num_channels;
    const int n = cfg_.samples_per_chirp;
    const double t_s = static_cast<double>(chirp_global) * cfg_.chirp_period_s;

    std::fill(out, out + static_cast<size_t>(L) * n, cf32{0.f, 0.f});

    Rng g(derive_seed(seed_, kChirpStream, static_cast<uint64_t>(chirp_global)));
    std::normal_distribution<double> nrm(0.0, 1.0);

    // receiver phase noise, one draw per channel per chirp
    psi_.resize(L);
    for (int l = 0; l < L; ++l) psi_[l] = cfg_.phase_noise_sigma_rad * nrm(g);

    for (size_t s = 0; s < script_.scatterers.size(); ++s) {
      const Scatterer& sc = script_.scatterers[s];
      const double r = sc.traj.r(t_s);
      const double v = sc.traj.v(t_s);
      if (r <= 0.0 || r >= dp_.max_range_m)
        raise(Err::RangeOutOfBound, "scatterer " + std::to_string(s) + " at r=" +
                                        std::to_string(r) + " m, t=" + std::to_string(t_s));
      if (std::abs(v) >= dp_.max_velocity_mps)
        raise(Err::VelocityAmbiguous, "scatterer " + std::to_string(s) + " at v=" +
                                          std::to_string(v) + " m/s, t=" + std::to_string(t_s));

      const double f_b = 2.0 * cfg_.slope_hz_per_s * r / kSpeedOfLight;
      const cd step = std::polar(1.0, -kTwoPi * f_b / cfg_.fs_hz);
      // total range phase; reduces to 4*pi*v*t_s/lambda (+ const) for constant v
      const cd slow = std::polar(sc.amplitude, -2.0 * kTwoPi * r / dp_.lambda_m);

      for (int l = 0; l < L; ++l) {
        cd acc = slow * geom_[s * L + l] * std::polar(1.0, -(alpha_[l] + psi_[l]));
        cf32* dst = out + static_cast<size_t>(l) * n;
        for (int k = 0; k < n; ++k) {
          dst[k] += cf32(static_cast<float>(acc.real()), static_cast<float>(acc.imag()));
          acc *= step;
        }
      }
    }

    if (cfg_.noise_floor > 0) {
      const double sigma = cfg_.noise_floor / std::sqrt(2.0);
      cf32* dst = out;
      const size_t total = static_cast<size_t>(L) * n;
      for (size_t k = 0; k < total; ++k)
        dst[k] += cf32(static_cast<float>(sigma * nrm(g)), static_cast<float>(sigma * nrm(g)));
    }
  }

  const ChirpConfig& config() const { return cfg_; }

 private:
  ChirpConfig cfg_;
  MotionScript script_;
  uint64_t seed_;
  DerivedParams dp_;
  std::vector<double> alpha_;
  std::vector<double> psi_;
  std::vector<cd> geom_;
};

}  // namespace

void stream_frames(const ChirpConfig& cfg, const MotionScript& script, uint64_t seed,
                   int num_frames, double start_time_ms, const FrameSink& sink) {
  Engine eng(cfg, script, seed);
  const size_t chirp_floats = static_cast<size_t>(cfg.num_channels) * cfg.samples_per_chirp;
  std::vector<cf32> frame(static_cast<size_t>(cfg.chirps_per_frame) * chirp_floats);

  for (int f = 0; f < num_frames; ++f) {
    for (int i = 0; i < cfg.chirps_per_frame; ++i) {
      const int64_t chirp_global = static_cast<int64_t>(f) * cfg.chirps_per_frame + i;
      eng.render_chirp(chirp_global, frame.data() + chirp_floats * i);
    }
    FrameView view;
    view.frame_index = f;
    view.start_time_ms = start_time_ms + f * cfg.frame_period_s * 1000.0;
    view.data = frame.data();
    if (!sink(view)) return;
  }
}

RadarCube simulate(const ChirpConfig& cfg, const MotionScript& script, uint64_t seed,
                   double start_time_ms) {
  cfg.validate();
  const int num_frames = static_cast<int>(script.duration_s / cfg.frame_period_s + 1e-9);
  if (num_frames < 1) raise(Err::BadConfig, "script shorter than one frame");

  RadarCube cube;
  cube.config = cfg;
  cube.start_time_ms = start_time_ms;
  cube.num_frames = num_frames;
  const size_t total = cube.frame_size() * num_frames;
  if (total * sizeof(cf32) > (3ULL << 30))
    raise(Err::BadConfig, "cube would exceed 3 GiB; use stream_frames");
  cube.data.resize(total);

  stream_frames(cfg, script, seed, num_frames, start_time_ms, [&](const FrameView& v) {
    std::copy(v.data, v.data + cube.frame_size(), cube.frame(v.frame_index));
    return true;
  });
  return cube;
}

std::vector<cf32> synthesize_chirp(const ChirpConfig& cfg, const MotionScript& script,
                                   uint64_t seed, double t_s) {
  Engine eng(cfg, script, seed);
  const int64_t chirp_global = std::llround(t_s / cfg.chirp_period_s);
  std::vector<cf32> out(static_cast<size_t>(cfg.num_channels) * cfg.samples_per_chirp);
  eng.render_chirp(chirp_global, out.data());
  return out;
}

}  // namespace radmon::sim

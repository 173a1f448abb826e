#pragma once

#include <string>

namespace radmon::sim {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// FMCW chirp/frame timing. Up-chirps only; inter-chirp idle time is folded
// into chirp_period_s, so chirps_per_frame * chirp_period_s spans the frame.
struct ChirpConfig {
  double f0_hz = 77.0e9;              // ramp start frequency
  double slope_hz_per_s = 43.03e12;   // ramp slope S
  double bandwidth_hz = 3.87e9;       // swept bandwidth B
  double fs_hz = 3.4e6;               // complex baseband sample rate
  int samples_per_chirp = 306;
  int chirps_per_frame = 256;
  double chirp_period_s = 98.0e-3 / 256.0;
  double frame_period_s = 98.0e-3;
  int num_channels = 12;              // virtual receivers, half-wavelength ULA
  double noise_floor = 0.1;           // amplitude of additive complex noise
  double phase_noise_sigma_rad = 0.01;  // per chirp per channel
  double channel_phase_mismatch_rad = 0.05;  // fixed per-run alpha_l ~ U(-x, x)

  // Throws BadConfig. Checks positivity, B ~ S*samples/fs within 1%, and
  // that the chirp train fits in the frame period.
  void validate() const;

  bool compatible_with(const ChirpConfig& other) const;

  static ChirpConfig from_json_file(const std::string& path);
  static ChirpConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct DerivedParams {
  double range_resolution_m = 0;      // c / (2B)
  double max_range_m = 0;             // c * fs / (4S)
  double max_velocity_mps = 0;        // lambda / (4 Tc)
  double velocity_resolution_mps = 0; // 2 * v_max / N
  int doppler_bins = 0;               // = chirps_per_frame
  double lambda_m = 0;                // c / f0

  std::string to_json_text() const;
};

DerivedParams derive_params(const ChirpConfig& cfg);

}  // namespace radmon::sim

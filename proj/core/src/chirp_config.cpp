#include "radmon/sim/chirp_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "radmon/errors.hpp"

namespace radmon::sim {

using nlohmann::json;

void ChirpConfig::validate() const {
  auto need = [](bool ok, const char* msg) {
    if (!ok) raise(Err::BadConfig, msg);
  };
  need(f0_hz > 0, "f0_hz must be positive");
  need(slope_hz_per_s > 0, "slope_hz_per_s must be positive");
  need(bandwidth_hz > 0, "bandwidth_hz must be positive");
  need(fs_hz > 0, "fs_hz must be positive");
  need(samples_per_chirp >= 8, "samples_per_chirp too small");
  need(samples_per_chirp % 2 == 0, "samples_per_chirp must be even");
  need(chirps_per_frame >= 2, "chirps_per_frame must be >= 2");
  need(chirp_period_s > 0, "chirp_period_s must be positive");
  need(frame_period_s > 0, "frame_period_s must be positive");
  need(num_channels >= 1, "num_channels must be >= 1");
  need(noise_floor >= 0, "noise_floor must be >= 0");
  need(phase_noise_sigma_rad >= 0, "phase_noise_sigma_rad must be >= 0");
  need(channel_phase_mismatch_rad >= 0, "channel_phase_mismatch_rad must be >= 0");

  // The sampled window must actually sweep the stated bandwidth.
  const double b_eff = slope_hz_per_s * samples_per_chirp / fs_hz;
  if (std::abs(b_eff - bandwidth_hz) > 0.01 * bandwidth_hz)
    raise(Err::BadConfig, "bandwidth_hz inconsistent with slope * samples/fs (>1%)");

  const double sampling_window = samples_per_chirp / fs_hz;
  if (sampling_window > chirp_period_s)
    raise(Err::BadConfig, "sampling window longer than chirp_period_s");
  if (chirps_per_frame * chirp_period_s > frame_period_s * (1.0 + 1e-9))
    raise(Err::BadConfig, "chirp train does not fit in frame_period_s");
}

bool ChirpConfig::compatible_with(const ChirpConfig& o) const {
  return f0_hz == o.f0_hz && slope_hz_per_s == o.slope_hz_per_s &&
         bandwidth_hz == o.bandwidth_hz && fs_hz == o.fs_hz &&
         samples_per_chirp == o.samples_per_chirp && chirps_per_frame == o.chirps_per_frame &&
         chirp_period_s == o.chirp_period_s && frame_period_s == o.frame_period_s &&
         num_channels == o.num_channels;
}

namespace {

ChirpConfig parse_config(const json& j, const std::string& ctx) {
  ChirpConfig c;
  try {
    c.f0_hz = j.at("f0_hz").get<double>();
    c.slope_hz_per_s = j.at("slope_hz_per_s").get<double>();
    c.bandwidth_hz = j.at("bandwidth_hz").get<double>();
    c.fs_hz = j.at("fs_hz").get<double>();
    c.samples_per_chirp = j.at("samples_per_chirp").get<int>();
    c.chirps_per_frame = j.at("chirps_per_frame").get<int>();
    c.chirp_period_s = j.at("chirp_period_s").get<double>();
    c.frame_period_s = j.at("frame_period_s").get<double>();
    c.num_channels = j.at("num_channels").get<int>();
    c.noise_floor = j.value("noise_floor", c.noise_floor);
    c.phase_noise_sigma_rad = j.value("phase_noise_sigma_rad", c.phase_noise_sigma_rad);
    c.channel_phase_mismatch_rad = j.value("channel_phase_mismatch_rad", c.channel_phase_mismatch_rad);
  } catch (const json::exception& e) {
    raise(Err::BadConfig, ctx + ": " + e.what());
  }
  c.validate();
  return c;
}

json dump_config(const ChirpConfig& c) {
  return json{{"f0_hz", c.f0_hz},
              {"slope_hz_per_s", c.slope_hz_per_s},
              {"bandwidth_hz", c.bandwidth_hz},
              {"fs_hz", c.fs_hz},
              {"samples_per_chirp", c.samples_per_chirp},
              {"chirps_per_frame", c.chirps_per_frame},
              {"chirp_period_s", c.chirp_period_s},
              {"frame_period_s", c.frame_period_s},
              {"num_channels", c.num_channels},
              {"noise_floor", c.noise_floor},
              {"phase_noise_sigma_rad", c.phase_noise_sigma_rad},
              {"channel_phase_mismatch_rad", c.channel_phase_mismatch_rad}};
}

}  // namespace

ChirpConfig ChirpConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Err::BadFile, "cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(Err::BadConfig, path + ": " + e.what());
  }
  return parse_config(j, path);
}

ChirpConfig ChirpConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(Err::BadConfig, std::string("config text: ") + e.what());
  }
  return parse_config(j, "config text");
}

std::string ChirpConfig::to_json_text() const { return dump_config(*this).dump(2); }

DerivedParams derive_params(const ChirpConfig& cfg) {
  cfg.validate();
  DerivedParams d;
  d.range_resolution_m = kSpeedOfLight / (2.0 * cfg.bandwidth_hz);
  d.max_range_m = kSpeedOfLight * cfg.fs_hz / (4.0 * cfg.slope_hz_per_s);
  d.lambda_m = kSpeedOfLight / cfg.f0_hz;
  d.max_velocity_mps = d.lambda_m / (4.0 * cfg.chirp_period_s);
  d.velocity_resolution_mps = 2.0 * d.max_velocity_mps / cfg.chirps_per_frame;
  d.doppler_bins = cfg.chirps_per_frame;
  return d;
}

std::string DerivedParams::to_json_text() const {
  return json{{"range_resolution_m", range_resolution_m},
              {"max_range_m", max_range_m},
              {"max_velocity_mps", max_velocity_mps},
              {"velocity_resolution_mps", velocity_resolution_mps},
              {"doppler_bins", doppler_bins},
              {"lambda_m", lambda_m},
              {"format_version", 1}}
      .dump(2);
}

}  // namespace radmon::sim

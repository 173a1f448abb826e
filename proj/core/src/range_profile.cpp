#include "radmon/dsp/range_profile.hpp"

#include <cmath>

#include "internal/binfile.hpp"
#include "internal/fft.hpp"
#include "radmon/errors.hpp"

namespace radmon::dsp {

RangeProfile range_fft(const sim::RadarCube& cube) {
  cube.config.validate();
  const int n = cube.config.samples_per_chirp;
  const int half = n / 2;
  const int channels = cube.config.num_channels;
  const size_t expect = cube.frame_size() * cube.num_frames;
  if (cube.data.size() != expect)
    raise(Err::ShapeMismatch, "cube holds " + std::to_string(cube.data.size()) +
                                  " samples, config implies " + std::to_string(expect));

  RangeProfile out;
  out.config = cube.config;
  out.start_time_ms = cube.start_time_ms;
  out.num_chirps = cube.num_frames * cube.config.chirps_per_frame;
  out.data.resize(static_cast<size_t>(out.num_chirps) * channels * half);

  std::vector<cd> in(n), spec(n);
  const sim::cf32* src = cube.data.data();
  for (int chirp = 0; chirp < out.num_chirps; ++chirp) {
    for (int l = 0; l < channels; ++l) {
      for (int k = 0; k < n; ++k) in[k] = cd(src[k].real(), src[k].imag());
      src += n;
      fft_forward(n, in.data(), spec.data());
      cd* dst = out.at(chirp, l);
      // the beat tone rotates clockwise, so range bin i lives at FFT bin n-i
      dst[0] = spec[0];
      for (int i = 1; i < half; ++i) dst[i] = spec[n - i];
    }
  }
  return out;
}

CouplingCalibration calibration_from_profile(const RangeProfile& profile) {
  if (profile.num_chirps < 1) raise(Err::TooFewChirps, "empty profile");
  CouplingCalibration cal;
  cal.config = profile.config;
  const size_t per_chirp = profile.chirp_stride();
  cal.mean.assign(per_chirp, cd{});
  for (int c = 0; c < profile.num_chirps; ++c) {
    const cd* row = profile.data.data() + per_chirp * c;
    for (size_t i = 0; i < per_chirp; ++i) cal.mean[i] += row[i];
  }
  for (auto& m : cal.mean) m /= static_cast<double>(profile.num_chirps);
  return cal;
}

RangeProfile mutual_coupling_reduction(const RangeProfile& profile,
                                       const CouplingCalibration& cal) {
  if (!profile.config.compatible_with(cal.config))
    raise(Err::ConfigMismatch, "calibration was captured with a different chirp config");
  if (cal.mean.size() != profile.chirp_stride())
    raise(Err::ConfigMismatch, "calibration shape does not match profile");

  RangeProfile out = profile;
  const size_t per_chirp = profile.chirp_stride();
  for (int c = 0; c < out.num_chirps; ++c) {
    cd* row = out.data.data() + per_chirp * c;
    for (size_t i = 0; i < per_chirp; ++i) row[i] -= cal.mean[i];
  }
  return out;
}

RangeProfile clutter_removal(const RangeProfile& profile) {
  if (profile.num_chirps < 2) raise(Err::TooFewChirps, "need at least 2 chirps");
  RangeProfile out = profile;
  const size_t per_chirp = profile.chirp_stride();
  const int block = profile.config.chirps_per_frame;
  std::vector<cd> mean(per_chirp);

  for (int b0 = 0; b0 < out.num_chirps; b0 += block) {
    const int nb = std::min(block, out.num_chirps - b0);
    std::fill(mean.begin(), mean.end(), cd{});
    for (int c = b0; c < b0 + nb; ++c) {
      const cd* row = out.data.data() + per_chirp * c;
      for (size_t i = 0; i < per_chirp; ++i) mean[i] += row[i];
    }
    for (auto& m : mean) m /= static_cast<double>(nb);
    for (int c = b0; c < b0 + nb; ++c) {
      cd* row = out.data.data() + per_chirp * c;
      for (size_t i = 0; i < per_chirp; ++i) row[i] -= mean[i];
    }
  }
  return out;
}

void CouplingCalibration::save(const std::string& path) const {
  io::json header;
  header["format_version"] = io::kFormatVersion;
  header["kind"] = "coupling";
  header["config"] = io::json::parse(config.to_json_text());
  header["num_channels"] = config.num_channels;
  header["num_bins"] = config.samples_per_chirp / 2;

  std::vector<float> payload;
  payload.reserve(mean.size() * 2);
  for (const cd& m : mean) {
    payload.push_back(static_cast<float>(m.real()));
    payload.push_back(static_cast<float>(m.imag()));
  }
  io::write_chunk_file(path, "RCAL", header, payload.data(), payload.size());
}

CouplingCalibration CouplingCalibration::load(const std::string& path) {
  io::ChunkReader reader(path, "RCAL");
  const io::json& h = reader.header();
  io::check_format_version(h, path);
  if (io::header_get<std::string>(h, "kind", path) != "coupling")
    raise(Err::BadFile, path + ": not a coupling calibration");

  CouplingCalibration cal;
  cal.config = sim::ChirpConfig::from_json_text(h.at("config").dump());
  const size_t n =
      static_cast<size_t>(cal.config.num_channels) * (cal.config.samples_per_chirp / 2);
  const auto payload = reader.read_all();
  if (payload.size() != n * 2)
    raise(Err::LengthMismatch, path + ": payload does not match declared shape");
  cal.mean.resize(n);
  for (size_t i = 0; i < n; ++i) cal.mean[i] = cd(payload[2 * i], payload[2 * i + 1]);
  return cal;
}

}  // namespace radmon::dsp

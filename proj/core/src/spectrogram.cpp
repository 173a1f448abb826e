#include "radmon/dsp/spectrogram.hpp"

#include <cmath>

#include "internal/binfile.hpp"
#include "internal/fft.hpp"
#include "radmon/errors.hpp"

namespace radmon::dsp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// w(n) = 0.54 - 0.46 cos(2 pi n / (N-1)), the periodic-endpoint Hamming form.
const std::vector<double>& hamming128() {
  static const std::vector<double> w = [] {
    std::vector<double> v(kStftWindow);
    for (int n = 0; n < kStftWindow; ++n)
      v[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * n / (kStftWindow - 1));
    return v;
  }();
  return w;
}

}  // namespace

SlowTimeSeries coherent_accumulate(const RangeProfile& profile) {
  SlowTimeSeries s;
  s.cadence_s = profile.config.chirp_period_s;
  s.start_time_ms = profile.start_time_ms;
  s.v_max_mps = derive_params(profile.config).max_velocity_mps;
  s.samples.resize(profile.num_chirps);
  const size_t per_chirp = profile.chirp_stride();
  for (int c = 0; c < profile.num_chirps; ++c) {
    const cd* row = profile.data.data() + per_chirp * c;
    cd acc{};
    for (size_t i = 0; i < per_chirp; ++i) acc += row[i];
    s.samples[c] = acc;
  }
  return s;
}

JTFSpectrogram stft(const SlowTimeSeries& series) {
  const int len = static_cast<int>(series.samples.size());
  if (len < kStftWindow)
    raise(Err::TooShort, "series has " + std::to_string(len) + " samples, window needs " +
                             std::to_string(kStftWindow));

  JTFSpectrogram out;
  out.num_columns = (len - kStftWindow) / kStftHop + 1;
  out.column_period_ms = kStftHop * series.cadence_s * 1000.0;
  out.v_max_mps = series.v_max_mps;
  out.start_time_ms = series.start_time_ms;
  out.values.resize(static_cast<size_t>(out.num_columns) * kDopplerBins);

  const auto& w = hamming128();
  std::vector<cd> in(kDopplerBins), spec(kDopplerBins);
  for (int c = 0; c < out.num_columns; ++c) {
    const cd* src = series.samples.data() + static_cast<size_t>(c) * kStftHop;
    for (int n = 0; n < kStftWindow; ++n) in[n] = w[n] * src[n];
    std::fill(in.begin() + kStftWindow, in.end(), cd{});
    fft_forward(kDopplerBins, in.data(), spec.data());
    // bin i carries velocity (i - 128) * v_res; a receding target rotates
    // clockwise in slow time, i.e. lands at DFT bin 256 - q
    float* dst = out.column(c);
    for (int i = 0; i < kDopplerBins; ++i) {
      const int m = (384 - i) % kDopplerBins;
      dst[i] = static_cast<float>(std::norm(spec[m]));
    }
  }
  return out;
}

JTFSpectrogram compute_jtf(const RangeProfile& profile) {
  return stft(coherent_accumulate(clutter_removal(profile)));
}

std::vector<GruInputWindow> frame_windows(const JTFSpectrogram& spec, int stride) {
  if (stride < 1) raise(Err::BadConfig, "stride must be >= 1");
  std::vector<GruInputWindow> out;
  if (spec.num_columns < kWindowColumns) return out;
  const int count = (spec.num_columns - kWindowColumns) / stride + 1;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    GruInputWindow win;
    const int c0 = i * stride;
    win.values.assign(spec.column(c0), spec.column(c0) + size_t(kWindowColumns) * kDopplerBins);
    win.start_time_ms = spec.start_time_ms + c0 * spec.column_period_ms;
    if (spec.label) win.label = sim::activity_from_string(*spec.label);
    win.subject_id = spec.subject_id;
    win.session_id = spec.session_id;
    out.push_back(std::move(win));
  }
  return out;
}

void JTFSpectrogram::save(const std::string& path) const {
  io::json header;
  header["format_version"] = io::kFormatVersion;
  header["num_columns"] = num_columns;
  header["bins"] = kDopplerBins;
  header["column_period_ms"] = column_period_ms;
  header["v_max"] = v_max_mps;
  header["start_time_ms"] = start_time_ms;
  if (label) header["label"] = *label;
  if (subject_id >= 0) header["subject_id"] = subject_id;
  if (session_id >= 0) header["session_id"] = session_id;
  io::write_chunk_file(path, "JTF0", header, values.data(), values.size());
}

JTFSpectrogram JTFSpectrogram::load(const std::string& path) {
  io::ChunkReader reader(path, "JTF0");
  const io::json& h = reader.header();
  io::check_format_version(h, path);

  JTFSpectrogram s;
  s.num_columns = io::header_get<int>(h, "num_columns", path);
  if (io::header_get<int>(h, "bins", path) != kDopplerBins)
    raise(Err::BadFile, path + ": unexpected Doppler bin count");
  s.column_period_ms = io::header_get<double>(h, "column_period_ms", path);
  s.v_max_mps = io::header_get<double>(h, "v_max", path);
  s.start_time_ms = io::header_get<double>(h, "start_time_ms", path);
  if (h.contains("label")) s.label = h.at("label").get<std::string>();
  if (h.contains("subject_id")) s.subject_id = h.at("subject_id").get<int>();
  if (h.contains("session_id")) s.session_id = h.at("session_id").get<int>();

  s.values = reader.read_all();
  if (s.values.size() != static_cast<size_t>(s.num_columns) * kDopplerBins)
    raise(Err::LengthMismatch, path + ": payload does not match num_columns");
  return s;
}

}  // namespace radmon::dsp

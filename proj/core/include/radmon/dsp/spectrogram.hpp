#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radmon/dsp/range_profile.hpp"
#include "radmon/sim/motion.hpp"

namespace radmon::dsp {

inline constexpr int kDopplerBins = 256;
inline constexpr int kWindowColumns = 50;
inline constexpr int kStftWindow = 128;
inline constexpr int kStftHop = 64;

// Accumulated complex return per chirp (sum over channels and range bins).
struct SlowTimeSeries {
  std::vector<cd> samples;
  double cadence_s = 0;      // chirp period
  double start_time_ms = 0;  // capture time of samples[0]
  double v_max_mps = 0;
};

SlowTimeSeries coherent_accumulate(const RangeProfile& profile);

// Doppler-time energy map. Bin 0 is -v_max, bin 128 zero Doppler, bin 255
// just under +v_max. Column c covers slow-time samples [64c, 64c + 128).
struct JTFSpectrogram {
  int num_columns = 0;
  double column_period_ms = 0;
  double v_max_mps = 0;
  double start_time_ms = 0;
  std::optional<std::string> label;
  int subject_id = -1;
  int session_id = -1;
  std::vector<float> values;  // [column][bin]

  float* column(int c) { return values.data() + static_cast<size_t>(c) * kDopplerBins; }
  const float* column(int c) const {
    return values.data() + static_cast<size_t>(c) * kDopplerBins;
  }

  void save(const std::string& path) const;
  static JTFSpectrogram load(const std::string& path);
};

JTFSpectrogram stft(const SlowTimeSeries& series);

// clutter_removal -> coherent_accumulate -> stft. Input should already be
// coupling-corrected.
JTFSpectrogram compute_jtf(const RangeProfile& profile);

// 50-column slice of a spectrogram plus the labels the trainer needs.
struct GruInputWindow {
  std::vector<float> values;  // [kWindowColumns][kDopplerBins]
  double start_time_ms = 0;
  std::optional<sim::Activity> label;
  int subject_id = -1;
  int session_id = -1;

  const float* step(int t) const { return values.data() + static_cast<size_t>(t) * kDopplerBins; }
};

std::vector<GruInputWindow> frame_windows(const JTFSpectrogram& spec, int stride = 10);

}  // namespace radmon::dsp

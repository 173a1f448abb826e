#pragma once

#include <complex>
#include <string>
#include <vector>

#include "radmon/sim/radar_cube.hpp"

namespace radmon::dsp {

using cd = std::complex<double>;

// Positive-frequency half of the fast-time FFT, ordered so that bin i sits at
// physical range i * range_resolution. Values indexed [chirp][channel][bin].
struct RangeProfile {
  sim::ChirpConfig config;
  double start_time_ms = 0;
  int num_chirps = 0;
  std::vector<cd> data;

  int num_bins() const { return config.samples_per_chirp / 2; }
  size_t chirp_stride() const { return static_cast<size_t>(config.num_channels) * num_bins(); }
  cd* at(int chirp, int channel) {
    return data.data() + chirp_stride() * chirp + static_cast<size_t>(channel) * num_bins();
  }
  const cd* at(int chirp, int channel) const {
    return data.data() + chirp_stride() * chirp + static_cast<size_t>(channel) * num_bins();
  }
};

RangeProfile range_fft(const sim::RadarCube& cube);

// Chirp-averaged complex profile of an empty-room recording; subtracted to
// cancel the static transmit/receive leakage.
struct CouplingCalibration {
  sim::ChirpConfig config;
  std::vector<cd> mean;  // [channel][bin]

  void save(const std::string& path) const;
  static CouplingCalibration load(const std::string& path);
};

CouplingCalibration calibration_from_profile(const RangeProfile& profile);

RangeProfile mutual_coupling_reduction(const RangeProfile& profile,
                                       const CouplingCalibration& cal);

// Subtracts the per-(channel, bin) slow-time mean over frame-sized chirp
// blocks; a trailing partial block is averaged over what it has.
RangeProfile clutter_removal(const RangeProfile& profile);

}  // namespace radmon::dsp

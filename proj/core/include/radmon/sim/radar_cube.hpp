#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "radmon/sim/chirp_config.hpp"

namespace radmon::sim {

using cf32 = std::complex<float>;

// Raw IQ samples ordered [frame][chirp][channel][sample].
struct RadarCube {
  ChirpConfig config;
  double start_time_ms = 0;
  int num_frames = 0;
  std::vector<cf32> data;

  size_t frame_size() const {
    return static_cast<size_t>(config.chirps_per_frame) * config.num_channels *
           config.samples_per_chirp;
  }
  cf32* frame(int f) { return data.data() + frame_size() * f; }
  const cf32* frame(int f) const { return data.data() + frame_size() * f; }

  void save(const std::string& path) const;
  static RadarCube load(const std::string& path);
};

// Streamed writer so long captures never need a full in-memory cube.
class RcubWriter {
 public:
  RcubWriter(const std::string& path, const ChirpConfig& cfg, int num_frames,
             double start_time_ms);
  ~RcubWriter();
  void append_frame(const cf32* frame_data);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class RcubReader {
 public:
  explicit RcubReader(const std::string& path);
  ~RcubReader();
  const ChirpConfig& config() const;
  int num_frames() const;
  double start_time_ms() const;
  void read_frame(cf32* frame_data);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace radmon::sim

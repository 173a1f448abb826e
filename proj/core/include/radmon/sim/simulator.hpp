#pragma once

#include <functional>

#include "radmon/sim/motion.hpp"
#include "radmon/sim/radar_cube.hpp"

namespace radmon::sim {

// One synthesized frame, valid only during the callback.
struct FrameView {
  int frame_index = 0;
  double start_time_ms = 0;           // absolute capture time of the frame
  const cf32* data = nullptr;         // [chirp][channel][sample]
};

using FrameSink = std::function<bool(const FrameView&)>;  // return false to stop

// Streams frames without materializing the cube. Bit-identical for a given
// (config, script, seed) regardless of how the stream is consumed.
void stream_frames(const ChirpConfig& cfg, const MotionScript& script, uint64_t seed,
                   int num_frames, double start_time_ms, const FrameSink& sink);

// Convenience: whole cube in memory, frames = floor(duration / frame_period).
RadarCube simulate(const ChirpConfig& cfg, const MotionScript& script, uint64_t seed,
                   double start_time_ms = 0.0);

// Baseband samples of the chirp at slow time t_s (relative to script start),
// all channels, ordered [channel][sample]. Mostly a test/diagnostic hook; the
// chirp index is derived from t_s for noise stream selection.
std::vector<cf32> synthesize_chirp(const ChirpConfig& cfg, const MotionScript& script,
                                   uint64_t seed, double t_s);

}  // namespace radmon::sim

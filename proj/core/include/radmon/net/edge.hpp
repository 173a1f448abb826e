#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "radmon/dsp/range_profile.hpp"
#include "radmon/dsp/spectrogram.hpp"
#include "radmon/net/process_config.hpp"
#include "radmon/net/wire.hpp"
#include "radmon/pad/presence.hpp"
#include "radmon/sim/radar_cube.hpp"

namespace radmon::net {

// Delivery target for an edge node. send returns false on link failure;
// reconnect attempts to restore the link and reports success.
class MessageSink {
 public:
  virtual ~MessageSink() = default;
  virtual bool send(const WireMessage& msg) = 0;
  virtual bool reconnect() = 0;
};

// TCP sink that also drains the aggregator's status_result acknowledgements
// so neither side blocks on a full socket buffer.
class TcpSink : public MessageSink {
 public:
  explicit TcpSink(const std::string& address);
  ~TcpSink() override;

  bool send(const WireMessage& msg) override;
  bool reconnect() override;
  void close();

  bool connected() const { return fd_ >= 0; }
  uint64_t acks() const { return acks_; }

 private:
  void drain_acks();

  std::string host_;
  uint16_t port_ = 0;
  int fd_ = -1;
  uint64_t acks_ = 0;
  size_t ack_bytes_ = 0;
};

struct EdgeStats {
  uint64_t presence = 0;
  uint64_t jtf = 0;
  uint64_t heartbeats = 0;
  uint64_t delivered = 0;
  uint64_t dropped = 0;  // backlog overflow, oldest first
  uint64_t reconnect_attempts = 0;
};

// Per-room processing loop: each horizon of raw frames runs the range FFT,
// coupling reduction, clutter removal and the presence vote, then queues a
// presence message. A living-room node also folds the cleaned slow-time
// stream into spectrogram columns and emits one classifier window per
// `stride` new columns while the room is occupied.
class EdgeNode {
 public:
  EdgeNode(pad::Room room, const pad::PadCalibration& cal, const pad::ThresholdConfig& thresholds,
           MessageSink& sink, int stride = 10);

  // now() drives retry scheduling; tests substitute a virtual clock.
  void set_clock(std::function<double()> now_s) { now_s_ = std::move(now_s); }
  void set_heartbeat_every(int horizons) { heartbeat_every_ = horizons; }

  void push_horizon(const sim::RadarCube& horizon);
  bool drain();  // deliver the backlog if the link allows; true when empty

  const EdgeStats& stats() const { return stats_; }
  size_t backlog_size() const { return backlog_.size(); }
  double backoff_s() const { return backoff_s_; }

  static constexpr size_t kBacklogCap = 512;

 private:
  void enqueue(WireMessage msg);

  pad::Room room_;
  pad::ThresholdConfig thresholds_;
  pad::PresenceDetector detector_;
  dsp::CouplingCalibration coupling_;
  MessageSink& sink_;
  int stride_;
  int heartbeat_every_ = 60;
  int64_t horizons_seen_ = 0;

  std::function<double()> now_s_;
  std::deque<WireMessage> backlog_;
  bool link_up_ = true;
  double backoff_s_ = 1.0;
  double next_retry_s_ = 0.0;
  EdgeStats stats_;

  // Slow-time tail not yet consumed by complete spectrogram columns, plus the
  // pending columns of the current classifier window.
  std::vector<dsp::cd> slow_;
  double chirp_period_s_ = 0;
  double stream_start_ms_ = 0;
  bool stream_started_ = false;
  int64_t slow_consumed_ = 0;  // chirps dropped off the front of slow_
  std::deque<std::vector<float>> columns_;
  int64_t columns_total_ = 0;
  int64_t window_start_col_ = 0;
};

// Replay a cube file horizon by horizon against the configured aggregator.
// Returns after one pass unless loop_forever; delivery failures never abort.
// pace_ms > 0 throttles replay to one horizon per pace_ms of wall time so
// several rooms replayed in parallel stay on a shared scenario clock.
EdgeStats edge_run(const ProcessConfig& cfg, const std::string& cube_path,
                   bool loop_forever = false, int pace_ms = 0);

}  // namespace radmon::net

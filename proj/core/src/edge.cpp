#include "radmon/net/edge.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "radmon/errors.hpp"

namespace radmon::net {

namespace {

double steady_now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

int connect_to(const std::string& host, uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return -1;
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    return -1;
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    return -1;
  }
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return fd;
}

}  // namespace

TcpSink::TcpSink(const std::string& address) {
  const auto [host, port] = parse_address(address);
  host_ = host;
  port_ = port;
  fd_ = connect_to(host_, port_);
}

TcpSink::~TcpSink() { close(); }

void TcpSink::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void TcpSink::drain_acks() {
  // Opportunistic non-blocking reads; acknowledgements are counted, their
  // content is advisory. A read error here is the next send's problem.
  uint8_t buf[4096];
  while (fd_ >= 0) {
    const ssize_t n = ::recv(fd_, buf, sizeof(buf), MSG_DONTWAIT);
    if (n <= 0) break;
    ack_bytes_ += size_t(n);
    const size_t frame = kWireHeaderSize + 2;  // status_result frames only
    while (ack_bytes_ >= frame) {
      ack_bytes_ -= frame;
      ++acks_;
    }
  }
}

bool TcpSink::send(const WireMessage& msg) {
  if (fd_ < 0) return false;
  if (!write_frame(fd_, msg)) {
    close();
    return false;
  }
  drain_acks();
  return true;
}

bool TcpSink::reconnect() {
  close();
  fd_ = connect_to(host_, port_);
  return fd_ >= 0;
}

EdgeNode::EdgeNode(pad::Room room, const pad::PadCalibration& cal,
                   const pad::ThresholdConfig& thresholds, MessageSink& sink, int stride)
    : room_(room),
      thresholds_(thresholds),
      detector_(room, thresholds),
      coupling_(cal.coupling),
      sink_(sink),
      stride_(stride),
      now_s_(steady_now_s) {
  if (stride_ <= 0) raise(Err::BadConfig, "stride must be positive");
  detector_.set_calibration(cal);
}

void EdgeNode::enqueue(WireMessage msg) {
  backlog_.push_back(std::move(msg));
  if (backlog_.size() > kBacklogCap) {
    backlog_.pop_front();
    ++stats_.dropped;
  }
}

bool EdgeNode::drain() {
  const double now = now_s_();
  if (!link_up_) {
    if (now < next_retry_s_) return backlog_.empty();
    ++stats_.reconnect_attempts;
    if (!sink_.reconnect()) {
      backoff_s_ = std::min(backoff_s_ * 2.0, 60.0);
      next_retry_s_ = now + backoff_s_;
      return false;
    }
    link_up_ = true;
    backoff_s_ = 1.0;
  }
  while (!backlog_.empty()) {
    if (!sink_.send(backlog_.front())) {
      link_up_ = false;
      next_retry_s_ = now + backoff_s_;
      return false;
    }
    ++stats_.delivered;
    backlog_.pop_front();
  }
  return true;
}

void EdgeNode::push_horizon(const sim::RadarCube& horizon) {
  if (horizon.num_frames != thresholds_.horizon_frames)
    raise(Err::TooFewFrames, "horizon carries " + std::to_string(horizon.num_frames) +
                                 " frames, detector expects " +
                                 std::to_string(thresholds_.horizon_frames));

  const auto profile = dsp::range_fft(horizon);
  const auto corrected = dsp::mutual_coupling_reduction(profile, coupling_);
  const auto cleaned = dsp::clutter_removal(corrected);
  const auto decision = detector_.detect(cleaned);

  if (heartbeat_every_ > 0 && horizons_seen_ % heartbeat_every_ == 0) {
    enqueue(make_heartbeat(uint8_t(room_), uint64_t(decision.timestamp_ms)));
    ++stats_.heartbeats;
  }
  ++horizons_seen_;

  enqueue(make_presence(uint8_t(room_), uint64_t(decision.timestamp_ms), decision.occupied));
  ++stats_.presence;

  if (room_ == pad::Room::LivingRoom) {
    const auto series = dsp::coherent_accumulate(cleaned);
    if (!stream_started_) {
      stream_started_ = true;
      chirp_period_s_ = series.cadence_s;
      stream_start_ms_ = series.start_time_ms;
    }
    slow_.insert(slow_.end(), series.samples.begin(), series.samples.end());

    // Fold every complete STFT hop into a spectrogram column.
    const int64_t offset = 64 * columns_total_ - slow_consumed_;
    if (int64_t(slow_.size()) - offset >= dsp::kStftWindow) {
      dsp::SlowTimeSeries tail;
      tail.samples.assign(slow_.begin() + offset, slow_.end());
      tail.cadence_s = chirp_period_s_;
      tail.start_time_ms =
          stream_start_ms_ + double(slow_consumed_ + offset) * chirp_period_s_ * 1e3;
      tail.v_max_mps = series.v_max_mps;
      const auto spec = dsp::stft(tail);
      for (int c = 0; c < spec.num_columns; ++c) {
        columns_.emplace_back(spec.column(c), spec.column(c) + dsp::kDopplerBins);
        ++columns_total_;
      }
      const int64_t drop = std::min<int64_t>(64 * columns_total_ - slow_consumed_,
                                             int64_t(slow_.size()));
      slow_.erase(slow_.begin(), slow_.begin() + drop);
      slow_consumed_ += drop;
    }

    // One candidate window per stride; emission is gated on current presence.
    while (columns_total_ - window_start_col_ >= dsp::kWindowColumns) {
      if (decision.occupied) {
        std::vector<float> values(size_t(dsp::kWindowColumns) * dsp::kDopplerBins);
        const int64_t front_col = columns_total_ - int64_t(columns_.size());
        for (int t = 0; t < dsp::kWindowColumns; ++t) {
          const auto& col = columns_[size_t(window_start_col_ - front_col + t)];
          std::copy(col.begin(), col.end(), values.begin() + size_t(t) * dsp::kDopplerBins);
        }
        const double ts =
            stream_start_ms_ + double(64 * window_start_col_) * chirp_period_s_ * 1e3;
        enqueue(make_jtf(uint8_t(room_), uint64_t(std::llround(ts)), values.data(),
                         values.size()));
        ++stats_.jtf;
      }
      window_start_col_ += stride_;
    }
    // Trim columns no window can need any more.
    while (!columns_.empty() && columns_total_ - int64_t(columns_.size()) < window_start_col_)
      columns_.pop_front();
  }

  drain();
}

EdgeStats edge_run(const ProcessConfig& cfg, const std::string& cube_path, bool loop_forever,
                   int pace_ms) {
  const pad::PadCalibration cal = pad::PadCalibration::load(cfg.calibration_path);
  pad::ThresholdConfig thresholds;
  thresholds.kappa = cfg.kappa;
  thresholds.horizon_frames = cal.horizon_frames;

  TcpSink sink(cfg.connect_address);
  EdgeNode node(pad::room_from_string(cfg.room), cal, thresholds, sink, cfg.stride);

  const auto wall_start = std::chrono::steady_clock::now();
  int64_t horizons_done = 0;
  do {
    sim::RcubReader reader(cube_path);
    sim::RadarCube horizon;
    horizon.config = reader.config();
    const size_t frame_size = size_t(horizon.config.chirps_per_frame) *
                              horizon.config.num_channels * horizon.config.samples_per_chirp;
    horizon.num_frames = thresholds.horizon_frames;
    horizon.data.resize(frame_size * size_t(thresholds.horizon_frames));

    const double frame_period_ms = horizon.config.frame_period_s * 1e3;
    int frame = 0;
    while (frame + thresholds.horizon_frames <= reader.num_frames()) {
      horizon.start_time_ms = reader.start_time_ms() + frame * frame_period_ms;
      for (int f = 0; f < thresholds.horizon_frames; ++f)
        reader.read_frame(horizon.data.data() + frame_size * size_t(f));
      frame += thresholds.horizon_frames;
      try {
        node.push_horizon(horizon);
      } catch (const Error&) {
        // processing hiccups must not kill the loop; the horizon is skipped
      }
      ++horizons_done;
      if (pace_ms > 0)
        std::this_thread::sleep_until(wall_start +
                                      std::chrono::milliseconds(pace_ms) * horizons_done);
    }
  } while (loop_forever);

  // Final delivery attempts with real backoff, bounded so a dead aggregator
  // cannot wedge a finite replay.
  const double deadline = steady_now_s() + 120.0;
  while (!node.drain() && steady_now_s() < deadline)
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  return node.stats();
}

}  // namespace radmon::net

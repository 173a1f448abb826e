#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "radmon/gru/gru.hpp"
#include "radmon/net/wire.hpp"
#include "radmon/pad/presence.hpp"
#include "radmon/status/status.hpp"

namespace radmon::net {

struct ServiceConfig {
  std::string bind_address = "127.0.0.1:0";    // port 0 = pick one, see telemetry_port()
  std::string report_address = "127.0.0.1:0";
  std::string model_path;
  std::string store_path;
  int debounce_windows = 2;
};

struct ServiceStats {
  std::atomic<uint64_t> connections{0};
  std::atomic<uint64_t> frames{0};
  std::atomic<uint64_t> events_appended{0};
  std::atomic<uint64_t> events_dropped{0};  // out-of-order routing output
  std::atomic<uint64_t> closed_on_error{0};
  std::atomic<uint64_t> reports_served{0};
};

// Aggregator: binary telemetry frames in, durable events out, JSON report
// queries on a second port. One handler thread per connection; all state
// mutation is serialized, so the event log sees a single writer.
class TelemetryService {
 public:
  explicit TelemetryService(const ServiceConfig& cfg);
  ~TelemetryService();

  TelemetryService(const TelemetryService&) = delete;
  TelemetryService& operator=(const TelemetryService&) = delete;

  void start();
  void stop();
  void wait();  // blocks until stop() is called from elsewhere

  uint16_t telemetry_port() const { return telemetry_port_; }
  uint16_t report_port() const { return report_port_; }
  const ServiceStats& stats() const { return stats_; }

 private:
  void accept_loop(int listen_fd, bool report);
  void handle_connection(int fd);
  void handle_report_connection(int fd);
  WireMessage handle_message(const WireMessage& msg);
  void route_if_complete();
  std::string report_json(const std::string& date) const;

  ServiceConfig cfg_;
  gru::GruModel model_;
  std::unique_ptr<status::EventStore> store_;

  std::mutex state_mu_;
  std::optional<pad::PresenceDecision> bedroom_, living_, washroom_;
  std::optional<status::LivingLabel> living_label_;
  status::StatusDebouncer debouncer_;
  std::optional<status::RoomEvent> last_event_;

  std::atomic<bool> running_{false};
  int telemetry_fd_ = -1;
  int report_fd_ = -1;
  uint16_t telemetry_port_ = 0;
  uint16_t report_port_ = 0;
  std::thread telemetry_accept_, report_accept_;
  std::mutex conn_mu_;
  std::vector<int> conn_fds_;
  std::vector<std::thread> workers_;
  ServiceStats stats_;
};

// Start and block forever; the CLI's serve verb.
void serve(const ServiceConfig& cfg);

}  // namespace radmon::net

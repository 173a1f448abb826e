#include "radmon/net/service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>

#include <json.hpp>

#include "radmon/errors.hpp"
#include "radmon/sim/motion.hpp"

namespace radmon::net {

namespace {

int listen_on(const std::string& address, uint16_t* actual_port) {
  const auto [host, port] = parse_address(address);
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) raise(Err::BadConfig, "cannot create socket for " + address);
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    raise(Err::BadConfig, "bad bind host in " + address);
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(fd, 16) != 0) {
    ::close(fd);
    raise(Err::BadConfig, "cannot bind " + address);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  *actual_port = ntohs(bound.sin_port);
  return fd;
}

}  // namespace

TelemetryService::TelemetryService(const ServiceConfig& cfg)
    : cfg_(cfg),
      model_(gru::load_model(cfg.model_path)),  // model ready before any frame
      store_(std::make_unique<status::EventStore>(cfg.store_path)),
      debouncer_(cfg.debounce_windows) {
  const auto history = status::EventStore::read_all(cfg.store_path);
  if (!history.empty()) last_event_ = history.back();
}

TelemetryService::~TelemetryService() { stop(); }

void TelemetryService::start() {
  telemetry_fd_ = listen_on(cfg_.bind_address, &telemetry_port_);
  report_fd_ = listen_on(cfg_.report_address, &report_port_);
  running_ = true;
  telemetry_accept_ = std::thread([this] { accept_loop(telemetry_fd_, false); });
  report_accept_ = std::thread([this] { accept_loop(report_fd_, true); });
}

void TelemetryService::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(telemetry_fd_, SHUT_RDWR);
  ::shutdown(report_fd_, SHUT_RDWR);
  ::close(telemetry_fd_);
  ::close(report_fd_);
  {
    std::lock_guard<std::mutex> lk(conn_mu_);
    for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  if (telemetry_accept_.joinable()) telemetry_accept_.join();
  if (report_accept_.joinable()) report_accept_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lk(conn_mu_);
    workers.swap(workers_);
  }
  for (auto& w : workers) w.join();
}

void TelemetryService::wait() {
  if (telemetry_accept_.joinable()) telemetry_accept_.join();
  if (report_accept_.joinable()) report_accept_.join();
}

void TelemetryService::accept_loop(int listen_fd, bool report) {
  while (running_) {
    const int fd = ::accept(listen_fd, nullptr, nullptr);
    if (fd < 0) {
      if (!running_) break;
      continue;
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    ++stats_.connections;
    std::lock_guard<std::mutex> lk(conn_mu_);
    conn_fds_.push_back(fd);
    workers_.emplace_back([this, fd, report] {
      if (report)
        handle_report_connection(fd);
      else
        handle_connection(fd);
      std::lock_guard<std::mutex> lk2(conn_mu_);
      conn_fds_.erase(std::remove(conn_fds_.begin(), conn_fds_.end(), fd), conn_fds_.end());
    });
  }
}

void TelemetryService::handle_connection(int fd) {
  while (running_) {
    std::optional<WireMessage> msg;
    try {
      msg = read_frame(fd);
    } catch (const Error&) {
      ++stats_.closed_on_error;  // malformed frame: this connection only
      break;
    }
    if (!msg) break;  // clean EOF
    ++stats_.frames;
    WireMessage ack;
    try {
      ack = handle_message(*msg);
    } catch (const Error&) {
      ++stats_.closed_on_error;
      break;
    }
    if (!write_frame(fd, ack)) break;
  }
  ::close(fd);
}

WireMessage TelemetryService::handle_message(const WireMessage& msg) {
  std::lock_guard<std::mutex> lk(state_mu_);

  switch (msg.type) {
    case MsgType::Heartbeat:
    case MsgType::StatusResult:
      break;  // acknowledged, nothing to fold in
    case MsgType::Presence: {
      if (msg.room_id > 2) raise(Err::BadConfig, "presence from unknown room");
      pad::PresenceDecision d;
      d.room = pad::Room(msg.room_id);
      d.occupied = presence_occupied(msg);
      d.timestamp_ms = int64_t(msg.timestamp_ms);
      switch (d.room) {
        case pad::Room::Bedroom: bedroom_ = d; break;
        case pad::Room::LivingRoom: living_ = d; break;
        case pad::Room::Washroom: washroom_ = d; break;
      }
      route_if_complete();
      break;
    }
    case MsgType::JtfWindow: {
      // The model never sees a window from outside the living room.
      if (msg.room_id != uint8_t(pad::Room::LivingRoom)) break;
      const auto values = jtf_values(msg);
      const auto pred = gru::predict(model_, values.data(), values.size());
      status::LivingLabel label;
      label.cls = sim::activity_from_string(model_.class_names[size_t(pred.class_index)]);
      label.confidence = pred.confidence;
      living_label_ = label;
      route_if_complete();
      break;
    }
  }

  const status::Status now = last_event_ ? last_event_->status : status::Status::Unknown;
  const double conf = last_event_ ? last_event_->confidence : 0.0;
  return make_status_result(msg.room_id, msg.timestamp_ms, now, conf);
}

void TelemetryService::route_if_complete() {
  if (!bedroom_ || !living_ || !washroom_) return;
  std::optional<status::LivingLabel> label;
  if (living_->occupied && living_label_) label = living_label_;
  const auto candidate = status::route_rooms(bedroom_, living_, washroom_, label);
  const auto emitted = debouncer_.push(candidate);
  if (!emitted) return;
  try {
    store_->append(*emitted);  // fsync before any acknowledgement goes out
    last_event_ = emitted;
    ++stats_.events_appended;
  } catch (const Error&) {
    ++stats_.events_dropped;  // stale timestamp from a replaying edge
  }
}

std::string TelemetryService::report_json(const std::string& date) const {
  const auto events = status::EventStore::read_all(cfg_.store_path);
  const auto rep = status::accumulate_report(events, date);
  auto j = nlohmann::json::parse(rep.to_json());
  const int64_t day_end = status::day_start_ms_utc(date) + 86400000;
  bool any = false;
  for (const auto& e : events) any = any || e.ts_ms < day_end;
  j["no_data"] = !any;
  return j.dump();
}

void TelemetryService::handle_report_connection(int fd) {
  std::string buf;
  char chunk[512];
  while (running_) {
    const auto nl = buf.find('\n');
    if (nl == std::string::npos) {
      const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
      if (n <= 0) break;
      buf.append(chunk, size_t(n));
      continue;
    }
    const std::string line = buf.substr(0, nl);
    buf.erase(0, nl + 1);
    std::string response;
    try {
      const auto req = nlohmann::json::parse(line);
      if (req.at("op") != "report") raise(Err::BadConfig, "unknown op");
      response = report_json(req.at("date").get<std::string>());
      ++stats_.reports_served;
    } catch (const std::exception& e) {
      response = nlohmann::json{{"error", e.what()}}.dump();
    }
    response += "\n";
    if (::send(fd, response.data(), response.size(), MSG_NOSIGNAL) < 0) break;
  }
  ::close(fd);
}

void serve(const ServiceConfig& cfg) {
  TelemetryService service(cfg);
  service.start();
  service.wait();
}

}  // namespace radmon::net

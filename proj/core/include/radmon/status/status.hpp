#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radmon/pad/presence.hpp"
#include "radmon/sim/motion.hpp"

namespace radmon::status {

// Wire-stable codes; do not reorder.
enum class Status : uint8_t {
  InBed = 0,
  InWashroom = 1,
  OutOfHome = 2,
  Empty = 3,
  Sedentary = 4,
  Washing = 5,
  Vacuuming = 6,
  InPlaceMovement = 7,
  Walking = 8,
  Unknown = 9,
};

const char* status_name(Status s);
Status status_from_string(const std::string& s);

enum class RoomId : uint8_t { Bedroom = 0, LivingRoom = 1, Washroom = 2, None = 3 };

const char* room_id_name(RoomId r);
RoomId room_id_from_string(const std::string& s);
RoomId room_id_from(pad::Room r);

// Placeholder gait record attached to the event that closes a walking run;
// gait parameter extraction itself is out of scope.
struct GaitStub {
  int64_t start_ms = 0;
  int64_t stop_ms = 0;
  int windows = 0;
};

struct RoomEvent {
  int64_t ts_ms = 0;
  RoomId room = RoomId::None;
  Status status = Status::OutOfHome;
  double confidence = 1.0;
  std::optional<GaitStub> gait;

  std::string to_json_line() const;  // single JSONL record, versioned
  static RoomEvent from_json_line(const std::string& line);
};

// Living-room classifier output fed into routing.
struct LivingLabel {
  sim::Activity cls = sim::Activity::Empty;
  double confidence = 0;
};

Status map_class_to_status(sim::Activity a);
sim::Activity class_from_status(Status s);  // inverse on the six activity statuses

// One decision per room at the same horizon. Multi-occupancy resolves
// washroom > bedroom > living room; `conflict` (when given) reports it.
RoomEvent route_rooms(const std::optional<pad::PresenceDecision>& bedroom,
                      const std::optional<pad::PresenceDecision>& livingroom,
                      const std::optional<pad::PresenceDecision>& washroom,
                      const std::optional<LivingLabel>& living_label, bool* conflict = nullptr);

// Suppresses single-window classifier flicker: a living-room status change
// must persist `persist` consecutive windows before its event is emitted;
// room-level changes pass immediately. Emits only on change.
class StatusDebouncer {
 public:
  explicit StatusDebouncer(int persist = 2);

  std::optional<RoomEvent> push(const RoomEvent& candidate);
  void reset();

 private:
  int persist_;
  bool has_emitted_ = false;
  Status emitted_ = Status::Unknown;
  Status pending_ = Status::Unknown;
  int pending_count_ = 0;
  // walking-run bookkeeping for the gait stub
  int64_t walk_start_ms_ = 0;
  int walk_windows_ = 0;
};

struct DailyReport {
  std::string date;  // YYYY-MM-DD, UTC day
  double sleep_minutes = 0;
  int washroom_visits = 0;
  double washroom_minutes = 0;
  double out_of_home_minutes = 0;
  double sedentary_minutes = 0;
  double active_minutes = 0;  // washing + vacuuming + in-place movement
  double walking_minutes = 0;
  double unknown_minutes = 0;  // gaps beyond 5x the event cadence
  std::map<std::string, double> per_status_minutes;
  Status current_status = Status::Unknown;

  std::string to_json() const;
};

int64_t day_start_ms_utc(const std::string& yyyy_mm_dd);

// Aggregates a sorted event stream over one UTC day. Every event's status
// runs until the next event (or day end); spans longer than 5x the median
// event spacing land in unknown_minutes instead of a status bucket.
DailyReport accumulate_report(const std::vector<RoomEvent>& events, const std::string& date);

// Last event's status and its age relative to now_ms; Unknown on empty input.
std::pair<Status, int64_t> current_status(const std::vector<RoomEvent>& events, int64_t now_ms);

// Append-only JSONL event log. Single writer; appends are flushed to disk
// before returning. A torn trailing line (crash mid-write) is dropped on
// read; corruption elsewhere is an error.
class EventStore {
 public:
  explicit EventStore(const std::string& path);
  ~EventStore();

  EventStore(const EventStore&) = delete;
  EventStore& operator=(const EventStore&) = delete;

  void append(const RoomEvent& e);  // UnsortedEvents when ts_ms precedes the tail
  int64_t last_ts() const { return last_ts_; }
  const std::string& path() const { return path_; }

  static std::vector<RoomEvent> read_all(const std::string& path);

 private:
  std::string path_;
  int fd_ = -1;
  int64_t last_ts_ = -1;
};

}  // namespace radmon::status

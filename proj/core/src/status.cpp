#include "radmon/status/status.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "radmon/errors.hpp"

namespace radmon::status {

namespace {

constexpr int64_t kDayMs = 86400000;

constexpr Status kAllStatuses[] = {Status::InBed,     Status::InWashroom, Status::OutOfHome,
                                   Status::Empty,     Status::Sedentary,  Status::Washing,
                                   Status::Vacuuming, Status::InPlaceMovement, Status::Walking,
                                   Status::Unknown};

bool is_living_status(Status s) {
  return s >= Status::Empty && s <= Status::Walking;
}

}  // namespace

const char* status_name(Status s) {
  switch (s) {
    case Status::InBed: return "in_bed";
    case Status::InWashroom: return "in_washroom";
    case Status::OutOfHome: return "out_of_home";
    case Status::Empty: return "empty";
    case Status::Sedentary: return "sedentary";
    case Status::Washing: return "washing";
    case Status::Vacuuming: return "vacuuming";
    case Status::InPlaceMovement: return "in_place_movement";
    case Status::Walking: return "walking";
    case Status::Unknown: return "unknown";
  }
  return "?";
}

Status status_from_string(const std::string& s) {
  for (Status st : kAllStatuses)
    if (s == status_name(st)) return st;
  raise(Err::BadConfig, "unknown status '" + s + "'");
}

const char* room_id_name(RoomId r) {
  switch (r) {
    case RoomId::Bedroom: return "bedroom";
    case RoomId::LivingRoom: return "livingroom";
    case RoomId::Washroom: return "washroom";
    case RoomId::None: return "none";
  }
  return "?";
}

RoomId room_id_from_string(const std::string& s) {
  for (RoomId r : {RoomId::Bedroom, RoomId::LivingRoom, RoomId::Washroom, RoomId::None})
    if (s == room_id_name(r)) return r;
  raise(Err::BadConfig, "unknown room '" + s + "'");
}

RoomId room_id_from(pad::Room r) {
  switch (r) {
    case pad::Room::Bedroom: return RoomId::Bedroom;
    case pad::Room::LivingRoom: return RoomId::LivingRoom;
    case pad::Room::Washroom: return RoomId::Washroom;
  }
  return RoomId::None;
}

Status map_class_to_status(sim::Activity a) {
  switch (a) {
    case sim::Activity::Empty: return Status::Empty;
    case sim::Activity::Sedentary: return Status::Sedentary;
    case sim::Activity::Washing: return Status::Washing;
    case sim::Activity::Vacuuming: return Status::Vacuuming;
    case sim::Activity::InPlaceMovement: return Status::InPlaceMovement;
    case sim::Activity::Walking: return Status::Walking;
  }
  raise(Err::UnknownActivity, "activity code " + std::to_string(static_cast<int>(a)));
}

sim::Activity class_from_status(Status s) {
  switch (s) {
    case Status::Empty: return sim::Activity::Empty;
    case Status::Sedentary: return sim::Activity::Sedentary;
    case Status::Washing: return sim::Activity::Washing;
    case Status::Vacuuming: return sim::Activity::Vacuuming;
    case Status::InPlaceMovement: return sim::Activity::InPlaceMovement;
    case Status::Walking: return sim::Activity::Walking;
    default:
      raise(Err::UnknownActivity, std::string(status_name(s)) + " is not an activity status");
  }
}

RoomEvent route_rooms(const std::optional<pad::PresenceDecision>& bedroom,
                      const std::optional<pad::PresenceDecision>& livingroom,
                      const std::optional<pad::PresenceDecision>& washroom,
                      const std::optional<LivingLabel>& living_label, bool* conflict) {
  if (!bedroom || !livingroom || !washroom)
    raise(Err::MissingDecision, "routing needs a decision for every room");

  const int occupied_rooms = int(bedroom->occupied) + int(livingroom->occupied) +
                             int(washroom->occupied);
  if (conflict) *conflict = occupied_rooms > 1;

  RoomEvent e;
  e.ts_ms = std::max({bedroom->timestamp_ms, livingroom->timestamp_ms, washroom->timestamp_ms});
  if (washroom->occupied) {
    e.room = RoomId::Washroom;
    e.status = Status::InWashroom;
  } else if (bedroom->occupied) {
    e.room = RoomId::Bedroom;
    e.status = Status::InBed;
  } else if (livingroom->occupied) {
    e.room = RoomId::LivingRoom;
    if (living_label) {
      e.status = map_class_to_status(living_label->cls);
      e.confidence = living_label->confidence;
    } else {
      // presence says someone is there but no window has been classified yet
      e.status = Status::Sedentary;
      e.confidence = 0.0;
    }
  } else {
    e.room = RoomId::None;
    e.status = Status::OutOfHome;
  }
  return e;
}

StatusDebouncer::StatusDebouncer(int persist) : persist_(persist) {
  if (persist < 1) raise(Err::BadConfig, "debounce persistence must be >= 1");
}

void StatusDebouncer::reset() {
  has_emitted_ = false;
  emitted_ = Status::Unknown;
  pending_ = Status::Unknown;
  pending_count_ = 0;
  walk_windows_ = 0;
}

std::optional<RoomEvent> StatusDebouncer::push(const RoomEvent& candidate) {
  if (has_emitted_ && emitted_ == Status::Walking && candidate.status == Status::Walking)
    ++walk_windows_;

  if (has_emitted_ && candidate.status == emitted_) {
    pending_count_ = 0;
    return std::nullopt;
  }

  if (is_living_status(candidate.status)) {
    if (candidate.status == pending_) {
      ++pending_count_;
    } else {
      pending_ = candidate.status;
      pending_count_ = 1;
    }
    if (pending_count_ < persist_) return std::nullopt;
  }

  RoomEvent out = candidate;
  if (has_emitted_ && emitted_ == Status::Walking) {
    GaitStub g;
    g.start_ms = walk_start_ms_;
    g.stop_ms = candidate.ts_ms;
    g.windows = walk_windows_;
    out.gait = g;
  }
  if (candidate.status == Status::Walking) {
    walk_start_ms_ = candidate.ts_ms;
    walk_windows_ = persist_;  // the windows that established the run
  }
  has_emitted_ = true;
  emitted_ = candidate.status;
  pending_ = Status::Unknown;
  pending_count_ = 0;
  return out;
}

std::string RoomEvent::to_json_line() const {
  nlohmann::json j;
  j["v"] = 1;
  j["ts_ms"] = ts_ms;
  j["room"] = room_id_name(room);
  j["status"] = status_name(status);
  j["confidence"] = confidence;
  if (gait) {
    j["gait"] = {{"start_ms", gait->start_ms}, {"stop_ms", gait->stop_ms},
                 {"windows", gait->windows}};
  }
  return j.dump();
}

RoomEvent RoomEvent::from_json_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    if (j.at("v").get<int>() != 1) raise(Err::UnsupportedVersion, "event record version");
    RoomEvent e;
    e.ts_ms = j.at("ts_ms").get<int64_t>();
    e.room = room_id_from_string(j.at("room").get<std::string>());
    e.status = status_from_string(j.at("status").get<std::string>());
    e.confidence = j.at("confidence").get<double>();
    if (j.contains("gait")) {
      GaitStub g;
      g.start_ms = j["gait"].at("start_ms").get<int64_t>();
      g.stop_ms = j["gait"].at("stop_ms").get<int64_t>();
      g.windows = j["gait"].at("windows").get<int>();
      e.gait = g;
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    raise(Err::BadFile, std::string("bad event record: ") + ex.what());
  }
}

int64_t day_start_ms_utc(const std::string& yyyy_mm_dd) {
  int y = 0, m = 0, d = 0;
  if (std::sscanf(yyyy_mm_dd.c_str(), "%d-%d-%d", &y, &m, &d) != 3)
    raise(Err::BadConfig, "date must be YYYY-MM-DD, got '" + yyyy_mm_dd + "'");
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) raise(Err::BadConfig, "invalid calendar date '" + yyyy_mm_dd + "'");
  const std::chrono::sys_days days{ymd};
  return std::chrono::duration_cast<std::chrono::milliseconds>(days.time_since_epoch()).count();
}

namespace {

// median spacing between consecutive events; 0 when undefined
double event_cadence_ms(const std::vector<RoomEvent>& events) {
  if (events.size() < 2) return 0;
  std::vector<double> deltas;
  deltas.reserve(events.size() - 1);
  for (size_t i = 1; i < events.size(); ++i)
    deltas.push_back(double(events[i].ts_ms - events[i - 1].ts_ms));
  std::sort(deltas.begin(), deltas.end());
  const size_t n = deltas.size();
  return n % 2 ? deltas[n / 2] : 0.5 * (deltas[n / 2 - 1] + deltas[n / 2]);
}

}  // namespace

DailyReport accumulate_report(const std::vector<RoomEvent>& events, const std::string& date) {
  for (size_t i = 1; i < events.size(); ++i)
    if (events[i].ts_ms < events[i - 1].ts_ms)
      raise(Err::UnsortedEvents, "event stream goes backwards at index " + std::to_string(i));

  DailyReport rep;
  rep.date = date;
  const int64_t day_start = day_start_ms_utc(date);
  const int64_t day_end = day_start + kDayMs;

  const double cadence = event_cadence_ms(events);
  const double gap_limit = 5.0 * cadence;  // 0 disables the rule below

  std::map<Status, double> bucket_ms;
  double unknown_ms = 0;

  for (size_t i = 0; i < events.size(); ++i) {
    const int64_t seg_begin = events[i].ts_ms;
    const int64_t seg_end = (i + 1 < events.size()) ? events[i + 1].ts_ms : day_end;
    const int64_t a = std::max(seg_begin, day_start);
    const int64_t b = std::min(seg_end, day_end);
    if (b <= a) continue;
    const double span = double(b - a);
    const bool too_long = cadence > 0 && double(seg_end - seg_begin) > gap_limit;
    if (too_long)
      unknown_ms += span;
    else
      bucket_ms[events[i].status] += span;
  }

  for (size_t i = 0; i < events.size(); ++i) {
    if (events[i].ts_ms < day_start || events[i].ts_ms >= day_end) continue;
    if (events[i].status != Status::InWashroom) continue;
    if (i == 0 || events[i - 1].status != Status::InWashroom) ++rep.washroom_visits;
  }

  auto minutes = [&](Status s) { return bucket_ms.count(s) ? bucket_ms[s] / 60000.0 : 0.0; };
  rep.sleep_minutes = minutes(Status::InBed);
  rep.washroom_minutes = minutes(Status::InWashroom);
  rep.out_of_home_minutes = minutes(Status::OutOfHome);
  rep.sedentary_minutes = minutes(Status::Sedentary);
  rep.active_minutes =
      minutes(Status::Washing) + minutes(Status::Vacuuming) + minutes(Status::InPlaceMovement);
  rep.walking_minutes = minutes(Status::Walking);
  rep.unknown_minutes = unknown_ms / 60000.0;
  for (const auto& [s, ms] : bucket_ms) rep.per_status_minutes[status_name(s)] = ms / 60000.0;
  rep.current_status = events.empty() ? Status::Unknown : events.back().status;
  return rep;
}

std::string DailyReport::to_json() const {
  nlohmann::json j;
  j["v"] = 1;
  j["date"] = date;
  j["sleep_minutes"] = sleep_minutes;
  j["washroom_visits"] = washroom_visits;
  j["washroom_minutes"] = washroom_minutes;
  j["out_of_home_minutes"] = out_of_home_minutes;
  j["sedentary_minutes"] = sedentary_minutes;
  j["active_minutes"] = active_minutes;
  j["walking_minutes"] = walking_minutes;
  j["unknown_minutes"] = unknown_minutes;
  j["per_status_minutes"] = per_status_minutes;
  j["current_status"] = status_name(current_status);
  return j.dump();
}

std::pair<Status, int64_t> current_status(const std::vector<RoomEvent>& events, int64_t now_ms) {
  if (events.empty()) return {Status::Unknown, 0};
  return {events.back().status, now_ms - events.back().ts_ms};
}

EventStore::EventStore(const std::string& path) : path_(path) {
  for (const auto& e : read_all(path)) last_ts_ = e.ts_ms;  // tolerates a torn tail

  // Seal a crash-torn tail before appending, or the next record would merge
  // with the partial line and be lost to the torn-tail rule on later reads.
  std::error_code ec;
  if (std::filesystem::exists(path, ec) && !ec) {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!bytes.empty() && bytes.back() != '\n') {
      const auto nl = bytes.find_last_of('\n');
      std::filesystem::resize_file(path, nl == std::string::npos ? 0 : nl + 1);
    }
  }

  fd_ = ::open(path.c_str(), O_CREAT | O_WRONLY | O_APPEND, 0644);
  if (fd_ < 0) raise(Err::BadFile, "cannot open event log " + path);
}

EventStore::~EventStore() {
  if (fd_ >= 0) ::close(fd_);
}

void EventStore::append(const RoomEvent& e) {
  if (e.ts_ms < last_ts_)
    raise(Err::UnsortedEvents, "append at " + std::to_string(e.ts_ms) + " behind log tail " +
                                   std::to_string(last_ts_));
  const std::string line = e.to_json_line() + "\n";
  size_t off = 0;
  while (off < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + off, line.size() - off);
    if (n < 0) raise(Err::BadFile, "write failed on event log " + path_);
    off += size_t(n);
  }
  if (::fsync(fd_) != 0) raise(Err::BadFile, "fsync failed on event log " + path_);
  last_ts_ = e.ts_ms;
}

std::vector<RoomEvent> EventStore::read_all(const std::string& path) {
  std::vector<RoomEvent> events;
  std::ifstream in(path);
  if (!in) return events;  // absent log = empty history
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  for (size_t i = 0; i < lines.size(); ++i) {
    try {
      events.push_back(RoomEvent::from_json_line(lines[i]));
    } catch (const Error&) {
      if (i + 1 == lines.size()) break;  // torn final record from a crash mid-write
      throw;
    }
  }
  return events;
}

}  // namespace radmon::status

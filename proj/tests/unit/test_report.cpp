#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "radmon/errors.hpp"
#include "radmon/status/status.hpp"

using namespace radmon;
using namespace radmon::status;

namespace {

constexpr int64_t kDayMs = 86400000;

RoomEvent at(int64_t ts_ms, Status s) {
  RoomEvent e;
  e.ts_ms = ts_ms;
  e.room = RoomId::LivingRoom;
  e.status = s;
  e.confidence = 1.0;
  return e;
}

int64_t hm(int64_t day_start, int h, int m) { return day_start + (h * 60 + m) * 60000LL; }

// Re-derivation of the day summary by sweeping every second of the day and
// attributing it to the event segment that contains it. Only valid when all
// event timestamps fall on whole seconds, which keeps the comparison exact.
struct SweepSummary {
  std::map<Status, double> minutes;
  double unknown_minutes = 0;
  int washroom_visits = 0;
};

SweepSummary sweep_oracle(const std::vector<RoomEvent>& ev, int64_t day_start) {
  SweepSummary out;

  double cadence = 0;
  if (ev.size() >= 2) {
    std::vector<double> deltas;
    for (size_t i = 1; i < ev.size(); ++i) deltas.push_back(double(ev[i].ts_ms - ev[i - 1].ts_ms));
    std::sort(deltas.begin(), deltas.end());
    const size_t n = deltas.size();
    cadence = n % 2 ? deltas[n / 2] : 0.5 * (deltas[n / 2 - 1] + deltas[n / 2]);
  }

  const int64_t day_end = day_start + kDayMs;
  size_t idx = 0;  // first event strictly after the probe second
  for (int64_t sec = 0; sec < 86400; ++sec) {
    const int64_t t = day_start + sec * 1000;
    while (idx < ev.size() && ev[idx].ts_ms <= t) ++idx;
    if (idx == 0) continue;  // before the first event: uncovered
    const RoomEvent& owner = ev[idx - 1];
    const int64_t seg_end = idx < ev.size() ? ev[idx].ts_ms : day_end;
    if (cadence > 0 && double(seg_end - owner.ts_ms) > 5.0 * cadence)
      out.unknown_minutes += 1.0 / 60.0;
    else
      out.minutes[owner.status] += 1.0 / 60.0;
  }

  for (size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].ts_ms < day_start || ev[i].ts_ms >= day_end) continue;
    if (ev[i].status != Status::InWashroom) continue;
    if (i == 0 || ev[i - 1].status != Status::InWashroom) ++out.washroom_visits;
  }
  return out;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("day start resolves calendar dates to epoch milliseconds") {
  CHECK(day_start_ms_utc("1970-01-01") == 0);
  CHECK(day_start_ms_utc("1970-01-02") == kDayMs);
  CHECK(day_start_ms_utc("2026-08-14") == 1786665600000LL);  // 20679 days since the epoch
  CHECK_THROWS_WITH_AS(day_start_ms_utc("2026-13-01"), doctest::Contains("BadConfig"), Error);
  CHECK_THROWS_WITH_AS(day_start_ms_utc("2026-02-30"), doctest::Contains("BadConfig"), Error);
  CHECK_THROWS_WITH_AS(day_start_ms_utc("today"), doctest::Contains("BadConfig"), Error);
}

TEST_CASE("in_bed until 08:00 yields 480 sleep minutes") {
  const int64_t day = day_start_ms_utc("2026-08-14");
  const std::vector<RoomEvent> ev = {at(hm(day, 0, 0), Status::InBed),
                                     at(hm(day, 8, 0), Status::Sedentary)};
  const auto rep = accumulate_report(ev, "2026-08-14");
  CHECK(rep.sleep_minutes == doctest::Approx(480.0));
  CHECK(rep.sedentary_minutes == doctest::Approx(960.0));
  CHECK(rep.unknown_minutes == doctest::Approx(0.0));
  CHECK(rep.current_status == Status::Sedentary);
}

TEST_CASE("washroom visits count entries, not duration") {
  const int64_t day = day_start_ms_utc("2026-08-14");
  const std::vector<RoomEvent> ev = {
      at(hm(day, 10, 0), Status::InWashroom), at(hm(day, 10, 5), Status::Sedentary),
      at(hm(day, 10, 20), Status::InWashroom), at(hm(day, 10, 24), Status::Sedentary)};
  const auto rep = accumulate_report(ev, "2026-08-14");
  CHECK(rep.washroom_visits == 2);
  CHECK(rep.washroom_minutes == doctest::Approx(9.0));
  // deltas 5/15/4 min -> median 5 min, so the 13h36m tail falls to unknown
  CHECK(rep.sedentary_minutes == doctest::Approx(15.0));
  CHECK(rep.unknown_minutes == doctest::Approx(816.0));
}

TEST_CASE("an empty stream reports zeros and an unknown status") {
  const auto rep = accumulate_report({}, "2026-08-14");
  CHECK(rep.sleep_minutes == 0.0);
  CHECK(rep.washroom_visits == 0);
  CHECK(rep.washroom_minutes == 0.0);
  CHECK(rep.out_of_home_minutes == 0.0);
  CHECK(rep.sedentary_minutes == 0.0);
  CHECK(rep.active_minutes == 0.0);
  CHECK(rep.walking_minutes == 0.0);
  CHECK(rep.unknown_minutes == 0.0);
  CHECK(rep.per_status_minutes.empty());
  CHECK(rep.current_status == Status::Unknown);
}

TEST_CASE("backwards timestamps are rejected") {
  const int64_t day = day_start_ms_utc("2026-08-14");
  const std::vector<RoomEvent> ev = {at(hm(day, 2, 0), Status::Sedentary),
                                     at(hm(day, 1, 0), Status::Walking)};
  CHECK_THROWS_WITH_AS(accumulate_report(ev, "2026-08-14"), doctest::Contains("UnsortedEvents"),
                       Error);
}

TEST_CASE("gaps beyond five cadences fall into the unknown bucket") {
  const int64_t day = day_start_ms_utc("2026-08-14");
  std::vector<RoomEvent> ev;
  for (int m = 0; m <= 9; ++m) ev.push_back(at(hm(day, 0, m), Status::Sedentary));
  ev.push_back(at(hm(day, 0, 20), Status::Walking));  // 11 min gap, limit is 5 min
  for (int m = 21; m <= 29; ++m) ev.push_back(at(hm(day, 0, m), Status::Sedentary));
  const auto rep = accumulate_report(ev, "2026-08-14");
  CHECK(rep.walking_minutes == doctest::Approx(1.0));
  CHECK(rep.sedentary_minutes == doctest::Approx(17.0));
  CHECK(rep.unknown_minutes == doctest::Approx(11.0 + (24 * 60 - 29)));  // gap plus the tail
  CHECK(rep.sleep_minutes == 0.0);
}

TEST_CASE("a single event with no cadence covers the rest of the day") {
  const auto rep = accumulate_report({at(day_start_ms_utc("2026-08-14"), Status::InBed)},
                                     "2026-08-14");
  CHECK(rep.sleep_minutes == doctest::Approx(1440.0));
  CHECK(rep.unknown_minutes == 0.0);
}

TEST_CASE("segments are clipped to the requested day") {
  const int64_t day = day_start_ms_utc("2026-08-14");
  const std::vector<RoomEvent> ev = {at(hm(day, -1, 0), Status::InBed),  // 23:00 previous day
                                     at(hm(day, 7, 0), Status::Sedentary)};
  const auto rep = accumulate_report(ev, "2026-08-14");
  CHECK(rep.sleep_minutes == doctest::Approx(420.0));
  CHECK(rep.sedentary_minutes == doctest::Approx(1020.0));

  // same stream against the previous day only sees the in_bed hour
  const auto prev = accumulate_report(ev, "2026-08-13");
  CHECK(prev.sleep_minutes == doctest::Approx(60.0));
  CHECK(prev.sedentary_minutes == 0.0);
}

TEST_CASE("accumulation is idempotent") {
  const int64_t day = day_start_ms_utc("2026-08-14");
  const std::vector<RoomEvent> ev = {at(hm(day, 0, 0), Status::InBed),
                                     at(hm(day, 8, 0), Status::Walking),
                                     at(hm(day, 8, 30), Status::Sedentary)};
  const auto a = accumulate_report(ev, "2026-08-14");
  const auto b = accumulate_report(ev, "2026-08-14");
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("random streams agree with the per-second sweep oracle") {
  const int64_t day = day_start_ms_utc("2026-08-14");
  const int64_t day_sec = day / 1000;
  std::mt19937_64 rng(20260814);
  std::uniform_int_distribution<int> status_pick(0, 9);
  std::uniform_int_distribution<int> count_pick(0, 40);
  std::uniform_int_distribution<int64_t> sec_pick(day_sec - 7200, day_sec + 26 * 3600);
  std::uniform_int_distribution<int> burst_pick(1, 30);

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RoomEvent> ev;
    const int shape = trial % 3;
    if (shape == 0) {
      // scattered: uniform random seconds across the day and its margins
      const int n = count_pick(rng);
      std::vector<int64_t> secs(n);
      for (auto& s : secs) s = sec_pick(rng);
      std::sort(secs.begin(), secs.end());
      for (int64_t s : secs) ev.push_back(at(s * 1000, static_cast<Status>(status_pick(rng))));
    } else if (shape == 1) {
      // bursts of tight cadence separated by long gaps, stressing the gap rule
      int64_t s = day_sec + 600;
      for (int burst = 0; burst < 4; ++burst) {
        for (int k = 0; k < 8; ++k) {
          ev.push_back(at(s * 1000, static_cast<Status>(status_pick(rng))));
          s += burst_pick(rng);
        }
        s += 3600 * (1 + burst);
      }
    } else {
      // tiny streams, including repeats on the same second
      const int n = count_pick(rng) % 4;
      std::vector<int64_t> secs(n, day_sec + 100);
      for (auto& s : secs) s += sec_pick(rng) % 50;
      std::sort(secs.begin(), secs.end());
      for (int64_t s : secs) ev.push_back(at(s * 1000, static_cast<Status>(status_pick(rng))));
    }

    const auto rep = accumulate_report(ev, "2026-08-14");
    const auto want = sweep_oracle(ev, day);

    auto want_min = [&](Status s) {
      auto it = want.minutes.find(s);
      return it == want.minutes.end() ? 0.0 : it->second;
    };
    CHECK(rep.sleep_minutes == doctest::Approx(want_min(Status::InBed)).epsilon(1e-12));
    CHECK(rep.washroom_minutes == doctest::Approx(want_min(Status::InWashroom)).epsilon(1e-12));
    CHECK(rep.out_of_home_minutes == doctest::Approx(want_min(Status::OutOfHome)).epsilon(1e-12));
    CHECK(rep.sedentary_minutes == doctest::Approx(want_min(Status::Sedentary)).epsilon(1e-12));
    CHECK(rep.active_minutes ==
          doctest::Approx(want_min(Status::Washing) + want_min(Status::Vacuuming) +
                          want_min(Status::InPlaceMovement))
              .epsilon(1e-12));
    CHECK(rep.walking_minutes == doctest::Approx(want_min(Status::Walking)).epsilon(1e-12));
    CHECK(rep.unknown_minutes == doctest::Approx(want.unknown_minutes).epsilon(1e-12));
    CHECK(rep.washroom_visits == want.washroom_visits);

    // conservation: bucketed plus unknown equals the covered part of the day
    double bucketed = rep.unknown_minutes;
    for (const auto& [name, mins] : rep.per_status_minutes) bucketed += mins;
    double covered = 0;
    if (!ev.empty()) {
      const int64_t first = std::max(ev.front().ts_ms, day);
      if (first < day + kDayMs) covered = double(day + kDayMs - first) / 60000.0;
    }
    CHECK(bucketed == doctest::Approx(covered).epsilon(1e-12));
  }
}

TEST_CASE("report serializes every field") {
  const int64_t day = day_start_ms_utc("2026-08-14");
  const std::vector<RoomEvent> ev = {at(hm(day, 0, 0), Status::InBed),
                                     at(hm(day, 9, 0), Status::Walking)};
  const auto rep = accumulate_report(ev, "2026-08-14");
  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j.at("v") == 1);
  CHECK(j.at("date") == "2026-08-14");
  CHECK(j.at("sleep_minutes").get<double>() == doctest::Approx(540.0));
  CHECK(j.at("walking_minutes").get<double>() == doctest::Approx(900.0));
  CHECK(j.at("washroom_visits") == 0);
  CHECK(j.at("current_status") == "walking");
  CHECK(j.at("per_status_minutes").at("in_bed").get<double>() == doctest::Approx(540.0));
}

}  // TEST_SUITE

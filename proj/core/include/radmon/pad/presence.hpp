#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "radmon/dsp/range_profile.hpp"

namespace radmon::pad {

enum class Room { Bedroom = 0, LivingRoom, Washroom };

const char* room_name(Room r);
Room room_from_string(const std::string& s);

struct ThresholdConfig {
  double kappa = 3.0;       // occupied when energy > kappa * calibrated empty mean
  int horizon_frames = 10;  // frames folded into one decision (~1 s)
  int vote_window = 5;
  int vote_needed = 3;
};

struct PresenceDecision {
  Room room = Room::LivingRoom;
  bool occupied = false;
  double energy = 0;  // residual energy of the horizon that produced this decision
  int64_t timestamp_ms = 0;
};

// Empty-room energy statistics plus the chirp-averaged complex profile that
// the coupling-reduction stage subtracts.
struct PadCalibration {
  Room room = Room::LivingRoom;
  double baseline_mean = 0;  // per-horizon residual energy of the empty room
  double baseline_std = 0;
  double kappa = 3.0;
  int horizon_frames = 10;
  dsp::CouplingCalibration coupling;

  // JSON descriptor plus a binary sidecar holding the coupling profile; the
  // descriptor records the sidecar's filename, resolved next to the JSON.
  void save(const std::string& json_path, const std::string& coupling_path) const;
  static PadCalibration load(const std::string& json_path);
};

// Total residual energy of a profile, summed over chirps, channels and bins.
double horizon_energy(const dsp::RangeProfile& profile);

// Raw per-horizon decision before vote smoothing; pure in its arguments.
PresenceDecision threshold_decision(const dsp::RangeProfile& horizon, const ThresholdConfig& cfg,
                                    const PadCalibration& cal);

// Empty-room calibration from raw (not clutter-removed) range profiles. The
// frames of all profiles form one stream; complete horizons of
// cfg.horizon_frames frames yield the energy statistics.
PadCalibration calibrate_empty(Room room, const std::vector<dsp::RangeProfile>& profiles,
                               const ThresholdConfig& cfg);

// Per-room detector. Feed clutter-removed horizons in arrival order; each
// call returns the vote-smoothed decision (occupied needs vote_needed of the
// last vote_window raw decisions, missing history counting as vacant).
class PresenceDetector {
 public:
  PresenceDetector(Room room, const ThresholdConfig& cfg) : room_(room), cfg_(cfg) {}

  void set_calibration(const PadCalibration& cal) { cal_ = cal; }
  bool calibrated() const { return cal_.has_value(); }
  const ThresholdConfig& config() const { return cfg_; }

  PresenceDecision detect(const dsp::RangeProfile& horizon);
  void reset() { votes_.clear(); }

 private:
  Room room_;
  ThresholdConfig cfg_;
  std::optional<PadCalibration> cal_;
  std::deque<bool> votes_;
};

}  // namespace radmon::pad

#include "radmon/pad/presence.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "radmon/errors.hpp"

namespace radmon::pad {

const char* room_name(Room r) {
  switch (r) {
    case Room::Bedroom: return "bedroom";
    case Room::LivingRoom: return "livingroom";
    case Room::Washroom: return "washroom";
  }
  return "?";
}

Room room_from_string(const std::string& s) {
  for (Room r : {Room::Bedroom, Room::LivingRoom, Room::Washroom})
    if (s == room_name(r)) return r;
  raise(Err::BadConfig, "unknown room '" + s + "'");
}

double horizon_energy(const dsp::RangeProfile& profile) {
  double e = 0;
  for (const auto& v : profile.data) e += std::norm(v);
  return e;
}

PresenceDecision threshold_decision(const dsp::RangeProfile& horizon, const ThresholdConfig& cfg,
                                    const PadCalibration& cal) {
  if (horizon.num_chirps < horizon.config.chirps_per_frame)
    raise(Err::TooFewFrames, "decision horizon holds less than one frame");
  PresenceDecision d;
  d.room = cal.room;
  d.energy = horizon_energy(horizon);
  d.occupied = d.energy > cfg.kappa * cal.baseline_mean;
  d.timestamp_ms = static_cast<int64_t>(std::llround(horizon.start_time_ms));
  return d;
}

PadCalibration calibrate_empty(Room room, const std::vector<dsp::RangeProfile>& profiles,
                               const ThresholdConfig& cfg) {
  if (profiles.empty()) raise(Err::TooFewFrames, "no empty-room profiles given");
  const auto& cfg0 = profiles.front().config;
  const int cpf = cfg0.chirps_per_frame;
  int64_t total_frames = 0;
  int64_t total_chirps = 0;
  for (const auto& p : profiles) {
    if (!p.config.compatible_with(cfg0))
      raise(Err::ConfigMismatch, "calibration profiles disagree on chirp configuration");
    total_frames += p.num_chirps / cpf;
    total_chirps += p.num_chirps;
  }
  if (total_frames < 10)
    raise(Err::TooFewFrames, "empty-room calibration needs at least 10 frames, got " +
                                 std::to_string(total_frames));

  PadCalibration cal;
  cal.room = room;
  cal.kappa = cfg.kappa;
  cal.horizon_frames = cfg.horizon_frames;

  // coupling profile: chirp-averaged complex mean across every profile
  const size_t stride = profiles.front().chirp_stride();
  cal.coupling.config = cfg0;
  cal.coupling.mean.assign(stride, dsp::cd(0, 0));
  for (const auto& p : profiles)
    for (int c = 0; c < p.num_chirps; ++c)
      for (size_t i = 0; i < stride; ++i)
        cal.coupling.mean[i] += p.data[c * stride + i];
  for (auto& v : cal.coupling.mean) v /= static_cast<double>(total_chirps);

  // per-frame residual energies, concatenated across profiles in order
  std::vector<double> frame_energy;
  frame_energy.reserve(static_cast<size_t>(total_frames));
  for (const auto& p : profiles) {
    const dsp::RangeProfile r = clutter_removal(mutual_coupling_reduction(p, cal.coupling));
    const int frames = r.num_chirps / cpf;
    for (int f = 0; f < frames; ++f) {
      double e = 0;
      const dsp::cd* base = r.data.data() + static_cast<size_t>(f) * cpf * stride;
      for (size_t i = 0; i < static_cast<size_t>(cpf) * stride; ++i) e += std::norm(base[i]);
      frame_energy.push_back(e);
    }
  }

  // group into complete horizons; leftover frames are dropped
  const int h = cfg.horizon_frames;
  const size_t horizons = frame_energy.size() / h;
  if (horizons == 0)
    raise(Err::TooFewFrames, "not enough frames for one decision horizon of " +
                                 std::to_string(h) + " frames");
  double sum = 0, sumsq = 0;
  for (size_t k = 0; k < horizons; ++k) {
    double e = 0;
    for (int f = 0; f < h; ++f) e += frame_energy[k * h + f];
    sum += e;
    sumsq += e * e;
  }
  cal.baseline_mean = sum / horizons;
  cal.baseline_std = std::sqrt(std::max(0.0, sumsq / horizons - cal.baseline_mean * cal.baseline_mean));
  return cal;
}

PresenceDecision PresenceDetector::detect(const dsp::RangeProfile& horizon) {
  if (!cal_) raise(Err::NotCalibrated, std::string("no empty-room baseline for ") + room_name(room_));
  PresenceDecision d = threshold_decision(horizon, cfg_, *cal_);
  d.room = room_;
  votes_.push_back(d.occupied);
  while (static_cast<int>(votes_.size()) > cfg_.vote_window) votes_.pop_front();
  const int yes = static_cast<int>(std::count(votes_.begin(), votes_.end(), true));
  d.occupied = yes >= cfg_.vote_needed;
  return d;
}

void PadCalibration::save(const std::string& json_path, const std::string& coupling_path) const {
  coupling.save(coupling_path);
  nlohmann::json j;
  j["room"] = room_name(room);
  j["baseline_mean"] = baseline_mean;
  j["baseline_std"] = baseline_std;
  j["kappa"] = kappa;
  j["horizon_frames"] = horizon_frames;
  j["coupling_file"] = std::filesystem::path(coupling_path).filename().string();
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) raise(Err::BadFile, "cannot write " + json_path);
  out << j.dump(2) << "\n";
  if (!out.good()) raise(Err::BadFile, "write failed for " + json_path);
}

PadCalibration PadCalibration::load(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) raise(Err::BadFile, "cannot open " + json_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(Err::BadFile, json_path + ": " + e.what());
  }
  PadCalibration cal;
  try {
    cal.room = room_from_string(j.at("room").get<std::string>());
    cal.baseline_mean = j.at("baseline_mean").get<double>();
    cal.baseline_std = j.at("baseline_std").get<double>();
    cal.kappa = j.at("kappa").get<double>();
    cal.horizon_frames = j.at("horizon_frames").get<int>();
    const auto sidecar = std::filesystem::path(json_path).parent_path() /
                         j.at("coupling_file").get<std::string>();
    cal.coupling = dsp::CouplingCalibration::load(sidecar.string());
  } catch (const nlohmann::json::exception& e) {
    raise(Err::BadFile, json_path + ": " + e.what());
  }
  if (cal.baseline_mean < 0 || cal.baseline_std < 0 || cal.horizon_frames < 1)
    raise(Err::BadFile, json_path + ": invalid calibration values");
  return cal;
}

}  // namespace radmon::pad

#include "radmon/sim/motion.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "radmon/errors.hpp"
#include "radmon/rng.hpp"

namespace radmon::sim {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Raised-cosine on/off gate. Returns envelope value and derivative.
struct Gate {
  double value = 1.0;
  double deriv = 0.0;
};

Gate eval_gate(const Oscillation& o, double t) {
  if (o.gate_period_s <= 0) return {};
  double u = std::fmod(t + o.gate_offset_s, o.gate_period_s);
  if (u < 0) u += o.gate_period_s;
  const double w = std::min(o.gate_on_s, o.gate_period_s);
  const double ramp = std::min(o.gate_ramp_s, w * 0.5);
  if (u >= w) return {0.0, 0.0};
  if (ramp <= 0) return {};
  if (u < ramp) {
    const double x = u / ramp;
    return {0.5 * (1.0 - std::cos(kPi * x)), 0.5 * kPi / ramp * std::sin(kPi * x)};
  }
  if (u > w - ramp) {
    const double x = (u - (w - ramp)) / ramp;
    return {0.5 * (1.0 + std::cos(kPi * x)), -0.5 * kPi / ramp * std::sin(kPi * x)};
  }
  return {};
}

}  // namespace

double Trajectory::r(double t) const {
  double out = 0.0;
  if (!path.empty()) {
    if (t <= path.front().t_s || path.size() == 1) {
      out = path.front().r_m;
    } else if (t >= path.back().t_s) {
      out = path.back().r_m;
    } else {
      auto it = std::upper_bound(path.begin(), path.end(), t,
                                 [](double a, const PathKnot& k) { return a < k.t_s; });
      const PathKnot& hi = *it;
      const PathKnot& lo = *(it - 1);
      const double f = (t - lo.t_s) / (hi.t_s - lo.t_s);
      out = lo.r_m + f * (hi.r_m - lo.r_m);
    }
  }
  for (const auto& o : osc) {
    const Gate g = eval_gate(o, t);
    if (g.value == 0.0 && g.deriv == 0.0 && o.gate_period_s > 0) continue;
    out += o.amp_m * g.value * std::sin(kTwoPi * o.freq_hz * t + o.phase_rad);
  }
  return out;
}

double Trajectory::v(double t) const {
  double out = 0.0;
  if (path.size() >= 2 && t > path.front().t_s && t < path.back().t_s) {
    auto it = std::upper_bound(path.begin(), path.end(), t,
                               [](double a, const PathKnot& k) { return a < k.t_s; });
    const PathKnot& hi = *it;
    const PathKnot& lo = *(it - 1);
    out = (hi.r_m - lo.r_m) / (hi.t_s - lo.t_s);
  }
  for (const auto& o : osc) {
    const Gate g = eval_gate(o, t);
    const double arg = kTwoPi * o.freq_hz * t + o.phase_rad;
    out += o.amp_m * (g.deriv * std::sin(arg) + g.value * kTwoPi * o.freq_hz * std::cos(arg));
  }
  return out;
}

void MotionScript::check_bounds(double r_max_m, double v_max_mps) const {
  const double dt = 2.0e-3;
  for (size_t i = 0; i < scatterers.size(); ++i) {
    const Trajectory& tr = scatterers[i].traj;
    for (double t = 0; t <= duration_s; t += dt) {
      const double r = tr.r(t);
      if (r <= 0.0 || r >= r_max_m)
        raise(Err::RangeOutOfBound, "scatterer " + std::to_string(i) + " at r=" +
                                        std::to_string(r) + " m, t=" + std::to_string(t));
      const double v = tr.v(t);
      if (std::abs(v) >= v_max_mps)
        raise(Err::VelocityAmbiguous, "scatterer " + std::to_string(i) + " at v=" +
                                          std::to_string(v) + " m/s, t=" + std::to_string(t));
    }
  }
}

const char* activity_name(Activity a) {
  switch (a) {
    case Activity::Empty: return "Empty";
    case Activity::Sedentary: return "Sedentary";
    case Activity::Washing: return "Washing";
    case Activity::Vacuuming: return "Vacuuming";
    case Activity::InPlaceMovement: return "InPlaceMovement";
    case Activity::Walking: return "Walking";
  }
  return "?";
}

Activity activity_from_string(const std::string& s) {
  for (int i = 0; i < kNumActivities; ++i) {
    const auto a = static_cast<Activity>(i);
    if (s == activity_name(a)) return a;
  }
  raise(Err::UnknownActivity, s);
}

SubjectProfile SubjectProfile::from_id(uint64_t subject_id) {
  SubjectProfile p;
  p.amp_factor = 1.0 + 0.15 * signed_unit(0x5AB1ECF5u, subject_id);
  p.freq_factor = 1.0 + 0.15 * signed_unit(0xF4E05EEDu, subject_id);
  return p;
}

namespace {

double uni(Rng& g, double lo, double hi) {
  if (hi <= lo) return 0.5 * (lo + hi);
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

// Peak |v| over a fine grid; used to shrink a drawn scene back inside the
// unambiguous velocity region.
double peak_speed(const MotionScript& m) {
  double peak = 0.0;
  for (const auto& s : m.scatterers)
    for (double t = 0; t <= m.duration_s; t += 2.0e-3)
      peak = std::max(peak, std::abs(s.traj.v(t)));
  return peak;
}

void cap_speeds(MotionScript& m, double v_cap) {
  const double peak = peak_speed(m);
  if (peak <= v_cap || peak <= 0) return;
  const double k = v_cap / peak;
  for (auto& s : m.scatterers)
    for (auto& o : s.traj.osc) o.amp_m *= k;
}

// Breathing term shared by the stationary activities.
Oscillation breathing(Rng& g, const SubjectProfile& sp) {
  Oscillation o;
  o.amp_m = 0.006 * sp.amp_factor;
  o.freq_hz = uni(g, 0.2, 0.4) * sp.freq_factor;
  o.phase_rad = uni(g, 0, kTwoPi);
  return o;
}

struct SceneBox {
  double r_lo, r_hi;  // usable radial extent for this config
};

SceneBox scene_box(const DerivedParams& dp) {
  SceneBox b;
  b.r_lo = std::max(0.35, 0.12 * dp.max_range_m);
  b.r_hi = 0.88 * dp.max_range_m;
  return b;
}

MotionScript empty_script(double duration_s) {
  MotionScript m;
  m.activity = Activity::Empty;
  m.duration_s = duration_s;
  return m;
}

MotionScript sedentary_script(double dur, Rng& g, const SceneBox& box, const SubjectProfile& sp) {
  MotionScript m;
  m.activity = Activity::Sedentary;
  m.duration_s = dur;
  const double r0 = uni(g, box.r_lo + 0.2, std::max(box.r_lo + 0.4, box.r_hi * 0.7));

  Scatterer torso;
  torso.amplitude = 1.0;
  torso.azimuth_rad = uni(g, -0.4, 0.4);
  torso.traj.path = {{0.0, r0}};
  torso.traj.osc.push_back(breathing(g, sp));
  m.scatterers.push_back(torso);

  for (int i = 0; i < 2; ++i) {
    Scatterer limb;
    limb.amplitude = 0.35;
    limb.azimuth_rad = torso.azimuth_rad + uni(g, -0.12, 0.12);
    limb.traj.path = {{0.0, r0 + uni(g, -0.25, 0.25)}};
    Oscillation o;
    o.amp_m = uni(g, 0.010, 0.020) * sp.amp_factor;
    o.freq_hz = uni(g, 0.15, 0.35) * sp.freq_factor;
    o.phase_rad = uni(g, 0, kTwoPi);
    o.gate_period_s = uni(g, 6.0, 12.0);
    o.gate_on_s = o.gate_period_s * uni(g, 0.25, 0.4);
    o.gate_ramp_s = 0.5;
    o.gate_offset_s = uni(g, 0, o.gate_period_s);
    limb.traj.osc.push_back(o);
    m.scatterers.push_back(limb);
  }
  return m;
}

MotionScript washing_script(double dur, Rng& g, const SceneBox& box, const SubjectProfile& sp) {
  MotionScript m;
  m.activity = Activity::Washing;
  m.duration_s = dur;
  const double r0 = uni(g, box.r_lo + 0.15, std::max(box.r_lo + 0.35, box.r_hi * 0.6));

  Scatterer torso;
  torso.amplitude = 1.0;
  torso.azimuth_rad = uni(g, -0.4, 0.4);
  torso.traj.path = {{0.0, r0}};
  torso.traj.osc.push_back(breathing(g, sp));
  m.scatterers.push_back(torso);

  const double f_scrub = uni(g, 0.7, 1.4) * sp.freq_factor;
  for (int i = 0; i < 2; ++i) {
    Scatterer arm;
    arm.amplitude = 0.55;
    arm.azimuth_rad = torso.azimuth_rad + uni(g, -0.15, 0.15);
    arm.traj.path = {{0.0, r0 + (i == 0 ? -0.15 : 0.12)}};
    Oscillation o;
    o.amp_m = uni(g, 0.15, 0.22) * sp.amp_factor;
    o.freq_hz = (i == 0 ? f_scrub : f_scrub * uni(g, 0.75, 0.95));
    o.phase_rad = uni(g, 0, kTwoPi);
    arm.traj.osc.push_back(o);
    m.scatterers.push_back(arm);
  }
  return m;
}

MotionScript vacuuming_script(double dur, Rng& g, const SceneBox& box, const SubjectProfile& sp) {
  MotionScript m;
  m.activity = Activity::Vacuuming;
  m.duration_s = dur;
  const double span = box.r_hi - box.r_lo;
  const double drift_amp = std::min(1.0, 0.35 * span) * sp.amp_factor;
  const double r0 = uni(g, box.r_lo + drift_amp + 0.1, box.r_hi - drift_amp - 0.1);

  // Slow back-and-forth sweep; peak drift speed capped at ~0.6 m/s.
  const double f_drift = uni(g, 0.05, std::min(0.09, 0.6 / (kTwoPi * drift_amp)));
  Oscillation drift;
  drift.amp_m = drift_amp;
  drift.freq_hz = f_drift;
  drift.phase_rad = uni(g, 0, kTwoPi);

  Scatterer torso;
  torso.amplitude = 1.0;
  torso.azimuth_rad = uni(g, -0.35, 0.35);
  torso.traj.path = {{0.0, r0}};
  torso.traj.osc.push_back(drift);
  m.scatterers.push_back(torso);

  Scatterer arm;  // stroke arm, ~0.4 m strokes around the torso position
  arm.amplitude = 0.55;
  arm.azimuth_rad = torso.azimuth_rad + uni(g, -0.1, 0.1);
  arm.traj.path = {{0.0, r0 + 0.3}};
  arm.traj.osc.push_back(drift);
  Oscillation stroke;
  stroke.amp_m = 0.2 * sp.amp_factor;
  stroke.freq_hz = uni(g, 0.9, 1.1) * sp.freq_factor;
  stroke.phase_rad = uni(g, 0, kTwoPi);
  arm.traj.osc.push_back(stroke);
  m.scatterers.push_back(arm);

  Scatterer hand;  // passive second limb, small jitter
  hand.amplitude = 0.3;
  hand.azimuth_rad = torso.azimuth_rad + uni(g, -0.1, 0.1);
  hand.traj.path = {{0.0, r0 - 0.2}};
  hand.traj.osc.push_back(drift);
  Oscillation jitter;
  jitter.amp_m = 0.05 * sp.amp_factor;
  jitter.freq_hz = uni(g, 0.4, 0.6) * sp.freq_factor;
  jitter.phase_rad = uni(g, 0, kTwoPi);
  hand.traj.osc.push_back(jitter);
  m.scatterers.push_back(hand);
  return m;
}

MotionScript in_place_script(double dur, Rng& g, const SceneBox& box, const SubjectProfile& sp) {
  MotionScript m;
  m.activity = Activity::InPlaceMovement;
  m.duration_s = dur;
  const double r0 = uni(g, box.r_lo + 0.3, std::max(box.r_lo + 0.5, box.r_hi * 0.75));

  const double gate_period = uni(g, 4.0, 7.0);
  const double gate_on = gate_period * uni(g, 0.45, 0.65);
  const double gate_offset = uni(g, 0, gate_period);
  const double f0 = uni(g, 0.5, 0.8) * sp.freq_factor;

  Scatterer torso;  // squat / bend-and-pick-up excursions in bursts
  torso.amplitude = 1.0;
  torso.azimuth_rad = uni(g, -0.35, 0.35);
  torso.traj.path = {{0.0, r0}};
  Oscillation ex;
  ex.amp_m = 0.15 * sp.amp_factor;
  ex.freq_hz = f0;
  ex.phase_rad = uni(g, 0, kTwoPi);
  ex.gate_period_s = gate_period;
  ex.gate_on_s = gate_on;
  ex.gate_ramp_s = 0.5;
  ex.gate_offset_s = gate_offset;
  torso.traj.osc.push_back(ex);
  m.scatterers.push_back(torso);

  for (int i = 0; i < 2; ++i) {
    Scatterer limb;
    limb.amplitude = 0.4;
    limb.azimuth_rad = torso.azimuth_rad + uni(g, -0.12, 0.12);
    limb.traj.path = {{0.0, r0 + uni(g, -0.2, 0.2)}};
    Oscillation o;
    o.amp_m = 0.08 * sp.amp_factor;
    o.freq_hz = uni(g, 1.0, 1.4) * sp.freq_factor;
    o.phase_rad = uni(g, 0, kTwoPi);
    o.gate_period_s = gate_period;
    o.gate_on_s = gate_on;
    o.gate_ramp_s = 0.4;
    o.gate_offset_s = gate_offset;
    limb.traj.osc.push_back(o);
    m.scatterers.push_back(limb);
  }
  return m;
}

MotionScript walking_script(double dur, Rng& g, const SceneBox& box, const SubjectProfile& sp,
                            double v_cap) {
  MotionScript m;
  m.activity = Activity::Walking;
  m.duration_s = dur;

  double u = uni(g, 1.0, 1.3) * sp.amp_factor;  // base gait speed
  const double f_stride = uni(g, 0.9, 1.1) * sp.freq_factor;
  const double seg_speed_jitter = 0.1;
  const double stride_mod = 0.15;
  const std::array<double, 4> limb_coeff = {0.9, 0.75, 0.5, 0.35};

  // Worst-case radial speed if the draw were used as-is; shrink the whole
  // gait uniformly so the scene can never reach the ambiguous region.
  const double peak = u * (1.0 + seg_speed_jitter) * (1.0 + stride_mod) + u * limb_coeff[0];
  if (peak > v_cap) u *= v_cap / peak;

  // Mostly-radial shuttle path between corridor ends with occasional pauses.
  std::vector<PathKnot> path;
  double t = 0.0, r = uni(g, box.r_lo + 0.3 * (box.r_hi - box.r_lo), box.r_hi - 0.1);
  int dir = (uni(g, 0, 1) < 0.5) ? -1 : 1;
  path.push_back({0.0, r});
  while (t < dur + 2.0) {
    const double lo = box.r_lo + 0.05 * (box.r_hi - box.r_lo);
    const double hi = box.r_hi - 0.05 * (box.r_hi - box.r_lo);
    double avail = (dir > 0) ? hi - r : r - lo;
    if (avail < 0.3) {
      dir = -dir;
      avail = (dir > 0) ? hi - r : r - lo;
    }
    const double d = avail * uni(g, 0.5, 0.98);
    const double seg_u = u * (1.0 + uni(g, -seg_speed_jitter, seg_speed_jitter));
    const double seg_t = d / seg_u;
    t += seg_t;
    r += dir * d;
    path.push_back({t, r});
    if (uni(g, 0, 1) < 0.35) {  // brief pause at the turn
      t += uni(g, 0.3, 0.9);
      path.push_back({t, r});
    }
    dir = -dir;
  }

  Scatterer torso;
  torso.amplitude = 1.0;
  torso.azimuth_rad = uni(g, -0.3, 0.3);
  torso.traj.path = path;
  Oscillation bob;  // stride-rate speed modulation as a small displacement term
  bob.amp_m = stride_mod * u / (kTwoPi * f_stride);
  bob.freq_hz = f_stride;
  bob.phase_rad = uni(g, 0, kTwoPi);
  torso.traj.osc.push_back(bob);
  m.scatterers.push_back(torso);

  const std::array<double, 4> limb_amp = {0.5, 0.5, 0.35, 0.35};
  const std::array<double, 4> limb_phase = {0.0, kPi, kPi / 2, 3 * kPi / 2};
  for (int i = 0; i < 4; ++i) {
    Scatterer limb;
    limb.amplitude = limb_amp[i];
    limb.azimuth_rad = torso.azimuth_rad + uni(g, -0.08, 0.08);
    limb.traj.path = path;
    Oscillation swing;  // legs/arms at twice the stride rate
    swing.amp_m = limb_coeff[i] * u / (kTwoPi * 2.0 * f_stride);
    swing.freq_hz = 2.0 * f_stride;
    swing.phase_rad = limb_phase[i] + uni(g, -0.3, 0.3);
    limb.traj.osc.push_back(swing);
    m.scatterers.push_back(limb);
  }
  return m;
}

}  // namespace

MotionScript make_script(Activity a, double duration_s, uint64_t seed, const DerivedParams& dp,
                         const SubjectProfile& subject) {
  if (duration_s <= 0) raise(Err::BadConfig, "script duration must be positive");
  Rng g(derive_seed(seed, 0x5C21B7, static_cast<uint64_t>(a)));
  const SceneBox box = scene_box(dp);
  const double v_cap = 0.92 * dp.max_velocity_mps;

  MotionScript m;
  switch (a) {
    case Activity::Empty: m = empty_script(duration_s); break;
    case Activity::Sedentary: m = sedentary_script(duration_s, g, box, subject); break;
    case Activity::Washing: m = washing_script(duration_s, g, box, subject); break;
    case Activity::Vacuuming: m = vacuuming_script(duration_s, g, box, subject); break;
    case Activity::InPlaceMovement: m = in_place_script(duration_s, g, box, subject); break;
    case Activity::Walking: m = walking_script(duration_s, g, box, subject, v_cap); break;
  }
  if (a != Activity::Walking) cap_speeds(m, v_cap);  // walking caps its gait up front
  m.check_bounds(dp.max_range_m, dp.max_velocity_mps);
  return m;
}

MotionScript make_script(const std::string& activity, double duration_s, uint64_t seed,
                         const DerivedParams& dp, const SubjectProfile& subject) {
  return make_script(activity_from_string(activity), duration_s, seed, dp, subject);
}

}  // namespace radmon::sim

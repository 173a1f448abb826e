#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radmon/sim/chirp_config.hpp"

namespace radmon::sim {

enum class Activity { Empty = 0, Sedentary, Washing, Vacuuming, InPlaceMovement, Walking };

inline constexpr int kNumActivities = 6;

const char* activity_name(Activity a);
Activity activity_from_string(const std::string& s);  // throws UnknownActivity

// Base position: piecewise-linear radial path. A scatterer's range is the
// path value plus a sum of (optionally gated) sinusoidal excursions; the
// radial velocity is the exact analytic derivative, so range and Doppler
// stay consistent.
struct PathKnot {
  double t_s = 0;
  double r_m = 0;
};

struct Oscillation {
  double amp_m = 0;
  double freq_hz = 0;
  double phase_rad = 0;
  // Periodic activity gate with raised-cosine edges. gate_period_s == 0
  // means always on.
  double gate_period_s = 0;
  double gate_on_s = 0;
  double gate_ramp_s = 0.4;
  double gate_offset_s = 0;
};

struct Trajectory {
  std::vector<PathKnot> path;  // at least one knot; constant before/after ends
  std::vector<Oscillation> osc;

  double r(double t_s) const;
  double v(double t_s) const;
};

struct Scatterer {
  double amplitude = 1.0;
  double azimuth_rad = 0.0;
  Trajectory traj;
};

struct MotionScript {
  Activity activity = Activity::Empty;
  double duration_s = 0;
  std::vector<Scatterer> scatterers;  // empty scene has none

  // Scans a fine time grid; throws RangeOutOfBound / VelocityAmbiguous if
  // any scatterer leaves (0, r_max) or reaches |v| >= v_max.
  void check_bounds(double r_max_m, double v_max_mps) const;
};

// Per-subject perturbation of template amplitudes and rates (about +/-15%).
struct SubjectProfile {
  double amp_factor = 1.0;
  double freq_factor = 1.0;

  static SubjectProfile from_id(uint64_t subject_id);
};

// Builds a randomized activity scene. Scenes are constructed to respect the
// unambiguous-velocity and range limits of `dp` (speeds are rescaled when a
// draw would exceed them).
MotionScript make_script(Activity a, double duration_s, uint64_t seed,
                         const DerivedParams& dp, const SubjectProfile& subject = {});

MotionScript make_script(const std::string& activity, double duration_s, uint64_t seed,
                         const DerivedParams& dp, const SubjectProfile& subject = {});

}  // namespace radmon::sim

// Recorded hybrid trajectories and their CSV export.
#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace slip {

enum class TrajectoryPhase { Descent, Stance, Ascent };

inline std::string_view to_string(TrajectoryPhase phase) {
  switch (phase) {
    case TrajectoryPhase::Descent: return "descent";
    case TrajectoryPhase::Stance: return "stance";
    case TrajectoryPhase::Ascent: return "ascent";
  }
  return "unknown";
}

enum class EventKind { Apex, Touchdown, Bottom, Liftoff };

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Apex: return "apex";
    case EventKind::Touchdown: return "touchdown";
    case EventKind::Bottom: return "bottom";
    case EventKind::Liftoff: return "liftoff";
  }
  return "unknown";
}

/// One output row. In flight the leg columns hold the commanded leg
/// (r = r0, theta = touchdown or liftoff angle, zero rates) and tau = 0.
struct TrajectorySample {
  double t = 0.0;
  TrajectoryPhase phase = TrajectoryPhase::Descent;
  double r = 0.0;
  double r_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  double x = 0.0;
  double y = 0.0;
  double x_dot = 0.0;
  double y_dot = 0.0;
  double tau = 0.0;
};

struct TrajectoryEvent {
  EventKind kind;
  double t;
};

struct HybridTrajectory {
  std::vector<TrajectorySample> samples;
  std::vector<TrajectoryEvent> events;

  void append(const HybridTrajectory& other) {
    samples.insert(samples.end(), other.samples.begin(), other.samples.end());
    events.insert(events.end(), other.events.begin(), other.events.end());
  }
};

/// 9 significant digits with a '.' decimal point regardless of the global locale.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

inline void write_trajectory_csv(std::ostream& os, const HybridTrajectory& traj) {
  os << "t,phase,r,r_dot,theta,theta_dot,x,y,x_dot,y_dot,tau\n";
  for (const auto& s : traj.samples) {
    os << format_number(s.t) << ',' << to_string(s.phase) << ',' << format_number(s.r) << ','
       << format_number(s.r_dot) << ',' << format_number(s.theta) << ','
       << format_number(s.theta_dot) << ',' << format_number(s.x) << ',' << format_number(s.y)
       << ',' << format_number(s.x_dot) << ',' << format_number(s.y_dot) << ','
       << format_number(s.tau) << '\n';
  }
}

}  // namespace slip

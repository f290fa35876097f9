#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "followahead/errors.hpp"
#include "followahead/geometry.hpp"

namespace followahead {

enum class PathKind { kStraight, kCircle, kSShape, kUShape, kLCorridor, kWaypoints };

inline PathKind path_kind_from_string(const std::string& s) {
  if (s == "straight") return PathKind::kStraight;
  if (s == "circle") return PathKind::kCircle;
  if (s == "s-shape") return PathKind::kSShape;
  if (s == "u-shape") return PathKind::kUShape;
  if (s == "l-corridor") return PathKind::kLCorridor;
  if (s == "waypoints") return PathKind::kWaypoints;
  throw ParseError("unknown human trajectory kind '" + s + "'");
}

inline std::string to_string(PathKind k) {
  switch (k) {
    case PathKind::kStraight: return "straight";
    case PathKind::kCircle: return "circle";
    case PathKind::kSShape: return "s-shape";
    case PathKind::kUShape: return "u-shape";
    case PathKind::kLCorridor: return "l-corridor";
    case PathKind::kWaypoints: return "waypoints";
  }
  return "?";
}

// Scripted walking route. Curved kinds are unicycle arcs: `speed` m/s with
// `angular_speed` rad/s while turning (turn radius = speed/angular_speed).
// lead_in/lead_out are the straight stretches (seconds) around the turns for
// the u-shape, l-corridor and s-shape kinds.
struct HumanPathConfig {
  PathKind kind = PathKind::kStraight;
  Pose2D start{};
  double speed = 0.6;          // m/s
  double angular_speed = 0.3;  // rad/s
  double turn_dir = 1.0;       // +1 turns left (ccw), -1 right
  double lead_in = 2.0;        // s
  double lead_out = 1e9;       // s; final segment runs until the scenario ends
  std::vector<std::array<double, 2>> waypoints;
};

namespace detail {

struct MotionSegment {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
  double duration = 0.0;
};

// Closed-form unicycle integration of one segment.
inline Pose2D advance(const Pose2D& p, const MotionSegment& seg, double dt) {
  const double th0 = deg_to_rad(p.theta);
  if (seg.omega == 0.0) {
    return Pose2D{p.x + seg.v * dt * std::cos(th0), p.y + seg.v * dt * std::sin(th0),
                  p.theta};
  }
  const double th1 = th0 + seg.omega * dt;
  const double r = seg.v / seg.omega;
  return Pose2D{p.x + r * (std::sin(th1) - std::sin(th0)),
                p.y - r * (std::cos(th1) - std::cos(th0)),
                normalize_angle(rad_to_deg(th1))};
}

inline std::vector<MotionSegment> build_segments(const HumanPathConfig& cfg) {
  const double w = cfg.angular_speed * cfg.turn_dir;
  const double half_turn = kPi / std::fabs(cfg.angular_speed);
  const double quarter_turn = 0.5 * half_turn;
  switch (cfg.kind) {
    case PathKind::kStraight:
      return {{cfg.speed, 0.0, 1e9}};
    case PathKind::kCircle:
      return {{cfg.speed, w, 1e9}};
    case PathKind::kUShape:
      return {{cfg.speed, 0.0, cfg.lead_in},
              {cfg.speed, w, half_turn},
              {cfg.speed, 0.0, cfg.lead_out}};
    case PathKind::kLCorridor:
      return {{cfg.speed, 0.0, cfg.lead_in},
              {cfg.speed, w, quarter_turn},
              {cfg.speed, 0.0, cfg.lead_out}};
    case PathKind::kSShape: {
      // Alternating half circles, optionally after a straight lead-in.
      std::vector<MotionSegment> segs;
      if (cfg.lead_in > 0.0) segs.push_back({cfg.speed, 0.0, cfg.lead_in});
      double sign = 1.0;
      for (int i = 0; i < 64; ++i) {  // plenty for any practical duration
        segs.push_back({cfg.speed, w * sign, half_turn});
        sign = -sign;
      }
      return segs;
    }
    case PathKind::kWaypoints:
      throw std::logic_error("build_segments: waypoints handled separately");
  }
  throw ParseError("unknown human trajectory kind");
}

inline Pose2D waypoint_pose(const HumanPathConfig& cfg, double t) {
  if (cfg.waypoints.size() < 2) {
    throw ParseError("waypoints trajectory needs at least two points");
  }
  double remaining = cfg.speed * t;
  for (std::size_t i = 0; i + 1 < cfg.waypoints.size(); ++i) {
    const double sx = cfg.waypoints[i][0], sy = cfg.waypoints[i][1];
    const double ex = cfg.waypoints[i + 1][0], ey = cfg.waypoints[i + 1][1];
    const double len = std::hypot(ex - sx, ey - sy);
    const double heading = normalize_angle(rad_to_deg(std::atan2(ey - sy, ex - sx)));
    if (remaining <= len || i + 2 == cfg.waypoints.size()) {
      const double d = std::min(remaining, len);
      const double f = len > 0.0 ? d / len : 0.0;
      return Pose2D{sx + f * (ex - sx), sy + f * (ey - sy), heading};
    }
    remaining -= len;
  }
  const auto& last = cfg.waypoints.back();
  return Pose2D{last[0], last[1], 0.0};
}

}  // namespace detail

// Pose of the scripted person at time t. Position is continuous in t and the
// heading is tangent to the path.
inline Pose2D scripted_human_pose(const HumanPathConfig& cfg, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("scripted_human_pose: t must be >= 0");
  if (cfg.kind == PathKind::kWaypoints) return detail::waypoint_pose(cfg, t);

  Pose2D pose = cfg.start;
  double remaining = t;
  for (const auto& seg : detail::build_segments(cfg)) {
    const double dt = std::min(remaining, seg.duration);
    pose = detail::advance(pose, seg, dt);
    remaining -= dt;
    if (remaining <= 0.0) break;
  }
  return pose;
}

}  // namespace followahead

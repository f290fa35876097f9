#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "followahead/errors.hpp"

namespace followahead {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into (-180, 180]. The boundary -180 maps to +180.
inline double normalize_angle(double theta_deg) {
  if (!std::isfinite(theta_deg)) {
    throw std::invalid_argument("normalize_angle: non-finite angle");
  }
  double r = std::fmod(theta_deg, 360.0);
  if (r <= -180.0) {
    r += 360.0;
  } else if (r > 180.0) {
    r -= 360.0;
  }
  return r + 0.0;  // fold -0.0 into +0.0
}

// Planar pose. theta is a heading in degrees, kept in (-180, 180].
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

inline bool pose_finite(const Pose2D& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.theta);
}

// Joint robot/human configuration; one of these per search-tree node.
struct WorldState {
  Pose2D robot;
  Pose2D human;
};

inline void validate_state(const WorldState& s) {
  if (!pose_finite(s.robot) || !pose_finite(s.human)) {
    throw std::invalid_argument("WorldState: non-finite pose");
  }
}

// Human pose relative to the robot, componentwise, angle normalized.
struct Observation {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
};

// Discrete steering choices. Enumeration order is fixed (left, straight,
// right) so tree traversal and tie-breaking are reproducible.
enum class RobotAction : int { kTurnLeft = 0, kGoStraight = 1, kTurnRight = 2 };

inline constexpr int kNumActions = 3;
inline constexpr std::array<RobotAction, kNumActions> kAllActions{
    RobotAction::kTurnLeft, RobotAction::kGoStraight, RobotAction::kTurnRight};

inline double action_turn_deg(RobotAction a) {
  switch (a) {
    case RobotAction::kTurnLeft: return -45.0;
    case RobotAction::kGoStraight: return 0.0;
    case RobotAction::kTurnRight: return 45.0;
  }
  throw std::invalid_argument("action_turn_deg: bad action");
}

inline constexpr double kDefaultStepDistance = 0.3;  // meters per 0.5 s tick

// Discrete motion model: travel d meters along the post-turn heading.
inline Pose2D step_robot(const Pose2D& pose, RobotAction action,
                         double d = kDefaultStepDistance) {
  if (!pose_finite(pose)) throw std::invalid_argument("step_robot: non-finite pose");
  if (!(d > 0.0)) throw std::invalid_argument("step_robot: step distance must be > 0");
  const double heading = pose.theta + action_turn_deg(action);
  const double heading_rad = deg_to_rad(heading);
  return Pose2D{pose.x + d * std::cos(heading_rad),
                pose.y + d * std::sin(heading_rad),
                normalize_angle(heading)};
}

inline Observation relative_observation(const WorldState& s) {
  validate_state(s);
  return Observation{s.human.x - s.robot.x, s.human.y - s.robot.y,
                     normalize_angle(s.human.theta - s.robot.theta)};
}

// Human pose expressed in the robot's own frame (the global offset rotated by
// -theta_r). Unlike the raw componentwise difference this observation fully
// determines distance and bearing, so it is what the value network consumes.
inline Observation egocentric_observation(const WorldState& s) {
  validate_state(s);
  const double dx = s.human.x - s.robot.x;
  const double dy = s.human.y - s.robot.y;
  const double rot = deg_to_rad(-s.robot.theta);
  const double c = std::cos(rot), sn = std::sin(rot);
  return Observation{c * dx - sn * dy, sn * dx + c * dy,
                     normalize_angle(s.human.theta - s.robot.theta)};
}

inline double human_robot_distance(const WorldState& s) {
  validate_state(s);
  return std::hypot(s.human.x - s.robot.x, s.human.y - s.robot.y);
}

// Angle from the human's heading to the human->robot vector, in (-180, 180].
// Positive means the robot sits to the person's left.
inline double signed_bearing_alpha(const WorldState& s) {
  validate_state(s);
  const double dx = s.robot.x - s.human.x;
  const double dy = s.robot.y - s.human.y;
  if (dx == 0.0 && dy == 0.0) {
    throw DegenerateGeometryError("bearing_alpha: robot and human coincide");
  }
  return normalize_angle(rad_to_deg(std::atan2(dy, dx)) - s.human.theta);
}

// Unsigned bearing in [0, 180]; 0 = robot directly ahead of the person.
inline double bearing_alpha(const WorldState& s) {
  return std::fabs(signed_bearing_alpha(s));
}

}  // namespace followahead

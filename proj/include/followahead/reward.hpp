#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "followahead/geometry.hpp"

namespace followahead {

// Shaping constants for the follow-ahead reward. Defaults match the target
// band [1,2] m, the 0.5/5 m cutoffs and the 45-degree angle scale.
struct RewardConfig {
  double gamma = 0.99;
  double d_near = 0.5;
  double d_lo = 1.0;
  double d_hi = 2.0;
  double d_far = 5.0;
  double alpha_scale = 45.0;
};

inline void validate(const RewardConfig& cfg) {
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) {
    throw std::invalid_argument("RewardConfig: gamma must be in (0,1)");
  }
  if (!(0.0 < cfg.d_near && cfg.d_near < cfg.d_lo && cfg.d_lo < cfg.d_hi &&
        cfg.d_hi < cfg.d_far)) {
    throw std::invalid_argument("RewardConfig: need 0 < d_near < d_lo < d_hi < d_far");
  }
  if (!(cfg.alpha_scale > 0.0)) {
    throw std::invalid_argument("RewardConfig: alpha_scale must be > 0");
  }
}

// Distance term: 0 inside the target band, ramping penalties on either side,
// -1 when closer than d_near or farther than d_far.
inline double distance_reward(double d_h, const RewardConfig& cfg = {}) {
  if (!std::isfinite(d_h) || d_h < 0.0) {
    throw std::invalid_argument("distance_reward: distance must be finite and >= 0");
  }
  if (d_h >= cfg.d_lo && d_h <= cfg.d_hi) return 0.0;
  if (d_h > cfg.d_near && d_h < cfg.d_lo) return -(cfg.d_lo - d_h);
  if (d_h > cfg.d_hi && d_h < cfg.d_far) {
    return -(d_h - cfg.d_lo) / (cfg.d_far - cfg.d_lo);
  }
  return -1.0;
}

// Angle term (45 - alpha)/45 for the unsigned bearing alpha in [0, 180].
inline double angle_reward(double alpha_deg, const RewardConfig& cfg = {}) {
  if (!std::isfinite(alpha_deg) || alpha_deg < 0.0 || alpha_deg > 180.0) {
    throw std::invalid_argument("angle_reward: alpha must be in [0, 180]");
  }
  return (cfg.alpha_scale - alpha_deg) / cfg.alpha_scale;
}

// Per-step reward r = max(r_d + r_alpha, -1), bounded in [-1, 1].
inline double step_reward(const WorldState& s, const RewardConfig& cfg = {}) {
  const double d_h = human_robot_distance(s);
  const double alpha = bearing_alpha(s);
  return std::max(distance_reward(d_h, cfg) + angle_reward(alpha, cfg), -1.0);
}

// Same reward evaluated from an egocentric (robot-frame) observation alone;
// the bearing is invariant under the rigid transform that moves the robot to
// the origin with heading zero.
inline double step_reward_from_observation(const Observation& o,
                                           const RewardConfig& cfg = {}) {
  const WorldState s{Pose2D{0.0, 0.0, 0.0}, Pose2D{o.dx, o.dy, o.dtheta}};
  return step_reward(s, cfg);
}

// Discounted return: sum_i gamma^i * rewards[i].
inline double episode_return(std::span<const double> rewards, double gamma) {
  if (rewards.empty()) throw std::invalid_argument("episode_return: empty sequence");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("episode_return: gamma must be in (0,1)");
  }
  double total = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

}  // namespace followahead

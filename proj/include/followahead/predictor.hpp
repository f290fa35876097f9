#pragma once

#include <cmath>
#include <deque>
#include <stdexcept>

#include "followahead/errors.hpp"
#include "followahead/geometry.hpp"

namespace followahead {

struct TimedPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

// Sliding window of timestamped human positions. Samples older than
// `window` seconds relative to the newest one are evicted on push.
class PoseHistory {
 public:
  explicit PoseHistory(double window = 3.0) : window_(window) {
    if (!(window_ > 0.0)) throw std::invalid_argument("PoseHistory: window must be > 0");
  }

  void push(double t, double x, double y) {
    if (!std::isfinite(t) || !std::isfinite(x) || !std::isfinite(y)) {
      throw std::invalid_argument("PoseHistory::push: non-finite sample");
    }
    if (!samples_.empty() && t <= samples_.back().t) {
      throw std::invalid_argument("PoseHistory::push: timestamps must be strictly increasing");
    }
    samples_.push_back(TimedPoint{t, x, y});
    while (samples_.front().t < t - window_) samples_.pop_front();
  }

  const std::deque<TimedPoint>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double window() const { return window_; }

  double span() const {
    return samples_.empty() ? 0.0 : samples_.back().t - samples_.front().t;
  }

  void clear() { samples_.clear(); }

 private:
  double window_;
  std::deque<TimedPoint> samples_;
};

// Constant-velocity motion estimate: position p0 at the newest timestamp t0,
// velocity v, heading in degrees (direction of v, or held when stationary).
struct LinearMotionFit {
  double x0 = 0.0;
  double y0 = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double heading = 0.0;
  double t0 = 0.0;
};

inline constexpr double kStationarySpeed = 0.05;  // m/s; below this, hold heading
inline constexpr double kMinFitSpan = 0.5;        // seconds of history required

// Independent least-squares lines x(t), y(t) over the window. Requires at
// least two samples spanning kMinFitSpan; throws NotReadyError otherwise.
// `held_heading` is used when the fitted speed is below kStationarySpeed.
inline LinearMotionFit fit_line(const PoseHistory& history, double held_heading = 0.0) {
  const auto& s = history.samples();
  if (s.size() < 2 || history.span() < kMinFitSpan) {
    throw NotReadyError("fit_line: need >= 2 samples spanning >= 0.5 s");
  }
  const double n = static_cast<double>(s.size());
  double mt = 0.0, mx = 0.0, my = 0.0;
  for (const auto& p : s) {
    mt += p.t;
    mx += p.x;
    my += p.y;
  }
  mt /= n;
  mx /= n;
  my /= n;
  double stt = 0.0, stx = 0.0, sty = 0.0;
  for (const auto& p : s) {
    const double dt = p.t - mt;
    stt += dt * dt;
    stx += dt * (p.x - mx);
    sty += dt * (p.y - my);
  }
  LinearMotionFit fit;
  fit.vx = stx / stt;
  fit.vy = sty / stt;
  fit.t0 = s.back().t;
  fit.x0 = mx + fit.vx * (fit.t0 - mt);
  fit.y0 = my + fit.vy * (fit.t0 - mt);
  fit.heading = std::hypot(fit.vx, fit.vy) > kStationarySpeed
                    ? normalize_angle(rad_to_deg(std::atan2(fit.vy, fit.vx)))
                    : normalize_angle(held_heading);
  return fit;
}

// Extrapolates the fitted line dt seconds past its newest sample.
inline Pose2D predict(const LinearMotionFit& fit, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("predict: dt must be >= 0");
  return Pose2D{fit.x0 + fit.vx * dt, fit.y0 + fit.vy * dt, fit.heading};
}

// Stateful wrapper used by the harness: owns the history, remembers the last
// confidently-fitted heading, and falls back to a zero-velocity prediction
// until the window has filled.
class HumanPredictor {
 public:
  explicit HumanPredictor(double initial_heading = 0.0, double window = 3.0)
      : history_(window), held_heading_(normalize_angle(initial_heading)) {}

  void push(double t, double x, double y) { history_.push(t, x, y); }

  LinearMotionFit fit() {
    LinearMotionFit f = fit_line(history_, held_heading_);
    held_heading_ = f.heading;
    return f;
  }

  // fit() when ready, otherwise the person is assumed stationary at the
  // newest observed position with the held heading.
  LinearMotionFit fit_or_hold() {
    try {
      return fit();
    } catch (const NotReadyError&) {
      LinearMotionFit f;
      if (!history_.empty()) {
        f.x0 = history_.samples().back().x;
        f.y0 = history_.samples().back().y;
        f.t0 = history_.samples().back().t;
      }
      f.heading = held_heading_;
      return f;
    }
  }

  const PoseHistory& history() const { return history_; }
  double held_heading() const { return held_heading_; }

 private:
  PoseHistory history_;
  double held_heading_;
};

}  // namespace followahead

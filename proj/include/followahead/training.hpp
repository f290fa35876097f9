#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "followahead/errors.hpp"
#include "followahead/geometry.hpp"
#include "followahead/qfunction.hpp"
#include "followahead/reward.hpp"
#include "followahead/rng.hpp"

namespace followahead {

// One training sample: egocentric observation, the action held for the rest
// of the episode, the discounted return actually collected, and the
// observation one step later.
struct ExperienceTuple {
  Observation o;
  RobotAction a = RobotAction::kGoStraight;
  double ret = 0.0;
  Observation o_next;
};

// Episode sampler settings. Human paths mix straight lines, constant-rate
// turns and wave-forms; the robot's initial pose relative to the human is
// randomized. Tuples are emitted episode-blocked: episode k occupies indices
// [k*episode_len, (k+1)*episode_len) at consecutive start offsets, so
// adjacent tuples within a block obey R_t = r_{t+1} + gamma * R_{t+1}.
struct DatasetConfig {
  std::size_t n_tuples = 200000;
  int episode_len = 6;
  double dt = 0.5;
  double step_distance = kDefaultStepDistance;
  RewardConfig reward{};
  std::uint64_t seed = 1;
  // Sampler ranges.
  double human_speed_min = 0.1;
  double human_speed_max = 0.9;
  double turn_rate_max = 0.6;  // rad/s
  double robot_dist_min = 0.3;
  double robot_dist_max = 6.0;
};

namespace detail {

// Piecewise human motion for dataset episodes: heading profile is closed
// form, position advances one tick at a time along the current heading.
struct EpisodeHumanPath {
  enum Kind { kStraight = 0, kTurn = 1, kWave = 2 };
  Kind kind = kStraight;
  Pose2D start;
  double speed = 0.6;
  double turn_rate_deg = 0.0;   // deg/s, for kTurn
  double wave_amp_deg = 0.0;    // heading amplitude, for kWave
  double wave_period = 4.0;     // seconds
  double wave_phase = 0.0;      // radians

  double heading_at(double t) const {
    switch (kind) {
      case kStraight: return start.theta;
      case kTurn: return start.theta + turn_rate_deg * t;
      case kWave:
        return start.theta +
               wave_amp_deg * std::sin(2.0 * kPi * t / wave_period + wave_phase);
    }
    return start.theta;
  }

  // Poses at t = 0, dt, ..., n*dt.
  std::vector<Pose2D> roll(int n, double dt) const {
    std::vector<Pose2D> poses;
    poses.reserve(static_cast<std::size_t>(n) + 1);
    Pose2D p = start;
    p.theta = normalize_angle(heading_at(0.0));
    poses.push_back(p);
    for (int k = 0; k < n; ++k) {
      const double h = heading_at(k * dt);
      p.x += speed * dt * std::cos(deg_to_rad(h));
      p.y += speed * dt * std::sin(deg_to_rad(h));
      p.theta = normalize_angle(heading_at((k + 1) * dt));
      poses.push_back(p);
    }
    return poses;
  }
};

inline EpisodeHumanPath sample_episode_path(DetRng& rng, const DatasetConfig& cfg) {
  EpisodeHumanPath path;
  path.kind = static_cast<EpisodeHumanPath::Kind>(rng.below(3));
  path.start = Pose2D{0.0, 0.0, normalize_angle(rng.uniform(-180.0, 180.0))};
  path.speed = rng.uniform(cfg.human_speed_min, cfg.human_speed_max);
  if (path.kind == EpisodeHumanPath::kTurn) {
    const double mag = rng.uniform(0.1, cfg.turn_rate_max);
    path.turn_rate_deg = rad_to_deg(rng.below(2) ? mag : -mag);
  } else if (path.kind == EpisodeHumanPath::kWave) {
    path.wave_amp_deg = rng.uniform(20.0, 60.0);
    path.wave_period = rng.uniform(2.0, 6.0);
    path.wave_phase = rng.uniform(0.0, 2.0 * kPi);
  }
  return path;
}

inline Pose2D sample_robot_start(DetRng& rng, const DatasetConfig& cfg,
                                 const Pose2D& human) {
  const double dist = rng.uniform(cfg.robot_dist_min, cfg.robot_dist_max);
  const double angle = rng.uniform(0.0, 2.0 * kPi);
  return Pose2D{human.x + dist * std::cos(angle), human.y + dist * std::sin(angle),
                normalize_angle(rng.uniform(-180.0, 180.0))};
}

}  // namespace detail

// Rolls fixed-length single-action episodes and labels every start offset
// with the discounted return of the remaining steps. Reproducible from the
// seed alone.
inline std::vector<ExperienceTuple> generate_dataset(const DatasetConfig& cfg) {
  if (cfg.n_tuples == 0) throw std::invalid_argument("generate_dataset: n_tuples must be > 0");
  if (cfg.episode_len < 1) throw std::invalid_argument("generate_dataset: episode_len must be >= 1");
  validate(cfg.reward);

  DetRng rng(cfg.seed);
  std::vector<ExperienceTuple> out;
  out.reserve(cfg.n_tuples);
  const int n = cfg.episode_len;

  while (out.size() < cfg.n_tuples) {
    const auto path = detail::sample_episode_path(rng, cfg);
    const auto human = path.roll(n, cfg.dt);
    const auto action = static_cast<RobotAction>(rng.below(3));

    std::vector<Pose2D> robot;
    robot.reserve(static_cast<std::size_t>(n) + 1);
    robot.push_back(detail::sample_robot_start(rng, cfg, path.start));
    for (int k = 0; k < n; ++k) {
      robot.push_back(step_robot(robot.back(), action, cfg.step_distance));
    }

    // Rewards after each step, then suffix returns R_k = r_{k+1} + g*R_{k+1}.
    std::vector<double> reward_after(static_cast<std::size_t>(n), -1.0);
    for (int k = 0; k < n; ++k) {
      const WorldState s{robot[static_cast<std::size_t>(k) + 1],
                         human[static_cast<std::size_t>(k) + 1]};
      if (human_robot_distance(s) > 0.0) {
        reward_after[static_cast<std::size_t>(k)] = step_reward(s, cfg.reward);
      }
    }
    std::vector<double> returns(static_cast<std::size_t>(n), 0.0);
    returns[static_cast<std::size_t>(n) - 1] = reward_after[static_cast<std::size_t>(n) - 1];
    for (int k = n - 2; k >= 0; --k) {
      returns[static_cast<std::size_t>(k)] =
          reward_after[static_cast<std::size_t>(k)] +
          cfg.reward.gamma * returns[static_cast<std::size_t>(k) + 1];
    }

    for (int k = 0; k < n && out.size() < cfg.n_tuples; ++k) {
      ExperienceTuple tup;
      tup.o = egocentric_observation(WorldState{robot[static_cast<std::size_t>(k)],
                                                human[static_cast<std::size_t>(k)]});
      tup.a = action;
      tup.ret = returns[static_cast<std::size_t>(k)];
      tup.o_next = egocentric_observation(WorldState{robot[static_cast<std::size_t>(k) + 1],
                                                     human[static_cast<std::size_t>(k) + 1]});
      out.push_back(tup);
    }
  }
  return out;
}

enum class TrainMode { kMcRegression, kDdqn };

struct TrainConfig {
  TrainMode mode = TrainMode::kMcRegression;
  std::vector<int> hidden{64, 64};
  int epochs = 12;
  int batch_size = 128;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;
  double gamma = 0.99;
  int target_sync_interval = 500;  // optimizer steps between target refreshes (ddqn)
  RewardConfig reward{};           // used by the ddqn bootstrap target
};

struct TrainResult {
  QFunctionParams params;
  std::vector<double> loss_history;  // mean squared error per optimizer step
};

namespace detail {

struct AdamState {
  std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
  double beta1_pow = 1.0, beta2_pow = 1.0;

  explicit AdamState(const QFunctionParams& p) {
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
      m_w.emplace_back(p.weights[l].size(), 0.0);
      v_w.emplace_back(p.weights[l].size(), 0.0);
      m_b.emplace_back(p.biases[l].size(), 0.0);
      v_b.emplace_back(p.biases[l].size(), 0.0);
    }
  }

  void apply(QFunctionParams& p, const std::vector<std::vector<double>>& gw,
             const std::vector<std::vector<double>>& gb, const TrainConfig& cfg) {
    beta1_pow *= cfg.adam_beta1;
    beta2_pow *= cfg.adam_beta2;
    const double corr1 = 1.0 - beta1_pow;
    const double corr2 = 1.0 - beta2_pow;
    auto update = [&](std::vector<double>& theta, const std::vector<double>& g,
                      std::vector<double>& m, std::vector<double>& v) {
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * g[i];
        v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * g[i] * g[i];
        theta[i] -= cfg.learning_rate * (m[i] / corr1) /
                    (std::sqrt(v[i] / corr2) + cfg.adam_eps);
      }
    };
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
      update(p.weights[l], gw[l], m_w[l], v_w[l]);
      update(p.biases[l], gb[l], m_b[l], v_b[l]);
    }
  }
};

}  // namespace detail

// Fits Q to the dataset. kMcRegression regresses Q(o,a) directly onto the
// stored Monte-Carlo returns; kDdqn runs double-Q bootstrapped targets with a
// periodically synced target network over the same buffer. Deterministic for
// a fixed seed; throws TrainingFailureError when the loss goes non-finite.
inline TrainResult train(const std::vector<ExperienceTuple>& dataset,
                         const TrainConfig& cfg) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  if (cfg.batch_size < 1 || cfg.epochs < 1) {
    throw std::invalid_argument("train: batch_size and epochs must be >= 1");
  }

  DetRng rng(cfg.seed);
  QFunctionParams params = make_random_params(rng, cfg.hidden);
  QFunctionParams target = params;  // ddqn only
  MlpWorkspace ws(params);
  MlpWorkspace ws_target(params);

  std::vector<std::vector<double>> grad_w, grad_b;
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    grad_w.emplace_back(params.weights[l].size(), 0.0);
    grad_b.emplace_back(params.biases[l].size(), 0.0);
  }
  detail::AdamState adam(params);

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  std::vector<double> dloss(static_cast<std::size_t>(kNumActions), 0.0);
  std::size_t step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      const double inv_batch = 1.0 / static_cast<double>(end - begin);
      for (auto& g : grad_w) std::fill(g.begin(), g.end(), 0.0);
      for (auto& g : grad_b) std::fill(g.begin(), g.end(), 0.0);

      double loss = 0.0;
      for (std::size_t idx = begin; idx < end; ++idx) {
        const ExperienceTuple& tup = dataset[order[idx]];
        double y;
        if (cfg.mode == TrainMode::kMcRegression) {
          y = tup.ret;
        } else {
          // Double-Q target: online net picks the action, target net scores it.
          const auto& q_online_next = ws.forward(params, tup.o_next);
          int best = 0;
          for (int a = 1; a < kNumActions; ++a) {
            if (q_online_next[static_cast<std::size_t>(a)] >
                q_online_next[static_cast<std::size_t>(best)]) {
              best = a;
            }
          }
          const auto& q_target_next = ws_target.forward(target, tup.o_next);
          const double r = step_reward_from_observation(tup.o_next, cfg.reward);
          y = r + cfg.gamma * q_target_next[static_cast<std::size_t>(best)];
        }
        const auto& q = ws.forward(params, tup.o);
        const std::size_t slot = static_cast<std::size_t>(tup.a);
        const double err = q[slot] - y;
        loss += err * err;
        std::fill(dloss.begin(), dloss.end(), 0.0);
        dloss[slot] = 2.0 * err * inv_batch;
        ws.backward(params, dloss, grad_w, grad_b);
      }
      loss *= inv_batch;
      if (!std::isfinite(loss)) {
        throw TrainingFailureError("train: loss diverged", step);
      }
      result.loss_history.push_back(loss);
      adam.apply(params, grad_w, grad_b, cfg);
      ++step;
      if (cfg.mode == TrainMode::kDdqn &&
          step % static_cast<std::size_t>(cfg.target_sync_interval) == 0) {
        target = params;
      }
    }
  }
  if (!params.finite()) {
    throw TrainingFailureError("train: parameters non-finite after training", step);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace followahead

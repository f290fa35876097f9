#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "followahead/errors.hpp"
#include "followahead/geometry.hpp"
#include "followahead/grid.hpp"
#include "followahead/predictor.hpp"
#include "followahead/qfunction.hpp"

namespace followahead {

struct PlannerConfig {
  int expansion_budget = 200;
  double c_explore = 1.4;
  int horizon_steps = 6;
  double dt = 0.5;
  double inflation = 0.3;
  double time_budget = 0.45;  // seconds per plan; <= 0 disables the clock
  double step_distance = kDefaultStepDistance;
};

inline void validate(const PlannerConfig& cfg) {
  if (cfg.expansion_budget < 1) throw std::invalid_argument("PlannerConfig: expansion_budget >= 1");
  if (cfg.horizon_steps < 1) throw std::invalid_argument("PlannerConfig: horizon_steps >= 1");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("PlannerConfig: dt > 0");
  if (cfg.inflation < 0.0) throw std::invalid_argument("PlannerConfig: inflation >= 0");
}

// UCB1 node score. With c = 0 this reduces to the mean value; an unvisited
// node scores +infinity so it is always taken first.
inline double ucb(double w_total, int n_visits, int parent_visits, double c) {
  if (n_visits <= 0) return std::numeric_limits<double>::infinity();
  double bonus = 0.0;
  if (c != 0.0 && parent_visits > 0) {
    bonus = c * std::sqrt(std::log(static_cast<double>(parent_visits)) /
                          static_cast<double>(n_visits));
  }
  return w_total / static_cast<double>(n_visits) + bonus;
}

struct TreeNode {
  WorldState state;
  int depth = 0;
  int parent = -1;
  int action = -1;  // index into kAllActions; -1 at the root
  double w_total = 0.0;
  int n_visits = 0;
  std::array<int, kNumActions> child{-1, -1, -1};
  std::array<bool, kNumActions> action_pruned{false, false, false};
  bool expanded = false;  // every action either has a child or was pruned
  bool terminal = false;  // at the horizon, or all actions pruned

  double mean() const { return w_total / static_cast<double>(n_visits); }
  bool is_leaf() const { return child[0] < 0 && child[1] < 0 && child[2] < 0; }
};

// Arena-allocated search tree; indices are stable handles.
struct SearchTree {
  std::vector<TreeNode> nodes;
  int evaluations = 0;  // child creations + dead-end penalties

  const TreeNode& root() const { return nodes.front(); }
};

// Per-expansion value source: raw per-action values for children of a node
// with the given (egocentric) observation. Clamping to [-1,1] happens inside
// the planner so hand-assigned penalties keep their scale.
using LeafEvaluator = std::function<std::array<double, kNumActions>(const Observation&)>;

struct PlanResult {
  Pose2D goal;
  int goal_node = -1;
  int iterations = 0;
  SearchTree tree;
};

namespace detail {

inline void backpropagate(SearchTree& tree, int node, double value) {
  for (int i = node; i >= 0; i = tree.nodes[static_cast<std::size_t>(i)].parent) {
    tree.nodes[static_cast<std::size_t>(i)].w_total += value;
    tree.nodes[static_cast<std::size_t>(i)].n_visits += 1;
  }
}

// Tries every untried action of `node`: colliding children are discarded
// permanently, occluded children enter with value -1, the rest with the
// clamped evaluator value. Each new child's value is backpropagated to the
// root. A node whose actions all collide becomes terminal with value -1.
inline void expand_node(SearchTree& tree, int node_idx, const OccupancyGrid& grid,
                        std::span<const Pose2D> human_by_depth,
                        const LeafEvaluator& evaluate, const PlannerConfig& cfg) {
  const Observation parent_obs =
      egocentric_observation(tree.nodes[static_cast<std::size_t>(node_idx)].state);
  const std::array<double, kNumActions> values = evaluate(parent_obs);

  bool any_child = false;
  for (int a = 0; a < kNumActions; ++a) {
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_idx)];
    if (node.child[static_cast<std::size_t>(a)] >= 0 ||
        node.action_pruned[static_cast<std::size_t>(a)]) {
      any_child = any_child || node.child[static_cast<std::size_t>(a)] >= 0;
      continue;
    }
    const Pose2D robot_next =
        step_robot(node.state.robot, kAllActions[static_cast<std::size_t>(a)],
                   cfg.step_distance);
    if (grid.is_collision(robot_next.x, robot_next.y, cfg.inflation)) {
      node.action_pruned[static_cast<std::size_t>(a)] = true;
      continue;
    }
    const int child_depth = node.depth + 1;
    const Pose2D& human_next = human_by_depth[static_cast<std::size_t>(child_depth)];

    double value;
    const bool los_checkable = grid.in_bounds_world(human_next.x, human_next.y);
    if (los_checkable &&
        grid.is_occluded(robot_next.x, robot_next.y, human_next.x, human_next.y)) {
      value = -1.0;
    } else {
      value = std::clamp(values[static_cast<std::size_t>(a)], -1.0, 1.0);
    }

    TreeNode child;
    child.state = WorldState{robot_next, human_next};
    child.depth = child_depth;
    child.parent = node_idx;
    child.action = a;
    child.terminal = child_depth >= cfg.horizon_steps;
    const int child_idx = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(child);
    tree.nodes[static_cast<std::size_t>(node_idx)].child[static_cast<std::size_t>(a)] =
        child_idx;
    backpropagate(tree, child_idx, value);
    tree.evaluations += 1;
    any_child = true;
  }

  TreeNode& node = tree.nodes[static_cast<std::size_t>(node_idx)];
  node.expanded = true;
  if (!any_child) {
    // Dead end: every continuation collides.
    node.terminal = true;
    backpropagate(tree, node_idx, -1.0);
    tree.evaluations += 1;
  }
}

}  // namespace detail

// Receding-horizon tree search over joint robot/human states.
// human_by_depth[k] is the predicted human pose k steps ahead (index 0 =
// current); it must have horizon_steps + 1 entries. Fully deterministic for a
// deterministic evaluator: ties in UCB break toward the node created first,
// which within a parent follows the fixed action order.
inline PlanResult plan(const WorldState& root_state, const OccupancyGrid& grid,
                       std::span<const Pose2D> human_by_depth,
                       const LeafEvaluator& evaluate, const PlannerConfig& cfg) {
  validate(cfg);
  validate_state(root_state);
  if (human_by_depth.size() < static_cast<std::size_t>(cfg.horizon_steps) + 1) {
    throw std::invalid_argument("plan: need horizon_steps + 1 human poses");
  }
  if (grid.is_collision(root_state.robot.x, root_state.robot.y, cfg.inflation)) {
    throw PlanningInfeasibleError("plan: root robot position in collision");
  }

  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(std::max(cfg.time_budget, 0.0)));

  PlanResult result;
  SearchTree& tree = result.tree;
  tree.nodes.reserve(static_cast<std::size_t>(cfg.expansion_budget) * kNumActions + 4);
  TreeNode root;
  root.state = root_state;
  tree.nodes.push_back(root);

  for (int iter = 0; iter < cfg.expansion_budget; ++iter) {
    if (cfg.time_budget > 0.0 && iter > 0 && std::chrono::steady_clock::now() >= deadline) {
      break;
    }
    // Select the expandable leaf with the highest UCB.
    int selected = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const TreeNode& n = tree.nodes[i];
      if (!n.is_leaf() || n.terminal || n.expanded) continue;
      const int parent_visits =
          n.parent >= 0 ? tree.nodes[static_cast<std::size_t>(n.parent)].n_visits : n.n_visits;
      const double score = ucb(n.w_total, n.n_visits, parent_visits, cfg.c_explore);
      if (score > best) {
        best = score;
        selected = static_cast<int>(i);
      }
    }
    if (selected < 0) break;  // tree exhausted
    detail::expand_node(tree, selected, grid, human_by_depth, evaluate, cfg);
    result.iterations = iter + 1;
  }

  if (tree.root().is_leaf()) {
    throw PlanningInfeasibleError("plan: every first action collides");
  }

  // Goal extraction: UCB at c = 0, i.e. the best mean value among all leaves.
  int best_leaf = -1;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    if (!n.is_leaf()) continue;
    const double m = n.mean();
    if (m > best_mean) {
      best_mean = m;
      best_leaf = static_cast<int>(i);
    }
  }
  result.goal_node = best_leaf;
  result.goal = tree.nodes[static_cast<std::size_t>(best_leaf)].state.robot;
  return result;
}

// Predicted human poses for each tree depth, from a motion fit.
inline std::vector<Pose2D> human_poses_by_depth(const LinearMotionFit& fit,
                                                const PlannerConfig& cfg) {
  std::vector<Pose2D> poses;
  poses.reserve(static_cast<std::size_t>(cfg.horizon_steps) + 1);
  for (int k = 0; k <= cfg.horizon_steps; ++k) poses.push_back(predict(fit, k * cfg.dt));
  return poses;
}

// The MCTS-DRL planner: leaf values come from the learned Q function.
inline PlanResult plan_with_q(const WorldState& root_state, const OccupancyGrid& grid,
                              const LinearMotionFit& fit, const QFunctionParams& params,
                              const PlannerConfig& cfg) {
  QEvaluator q(params);
  const auto human = human_poses_by_depth(fit, cfg);
  return plan(root_state, grid, human, [&q](const Observation& o) { return q(o); }, cfg);
}

// Navigational goal only; the pose of the best leaf at any depth 1..horizon.
inline Pose2D plan_goal(const WorldState& root_state, const OccupancyGrid& grid,
                        const LinearMotionFit& fit, const QFunctionParams& params,
                        const PlannerConfig& cfg = {}) {
  return plan_with_q(root_state, grid, fit, params, cfg).goal;
}

}  // namespace followahead

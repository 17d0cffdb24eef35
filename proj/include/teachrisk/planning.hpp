#pragma once

#include "teachrisk/mdp.hpp"

namespace teachrisk {

struct PlannerOptions {
    double tolerance = 1e-10;  // sup-norm stopping tolerance on value iterates
    int extra_iterations = 64;  // margin on top of the analytic iteration cap
};

struct PlanResult {
    Policy policy;            // deterministic, ties broken by lowest action index
    Eigen::VectorXd values;   // V(s) at the fixed point
    int iterations = 0;
};

/// Value iteration for state rewards r(s): V(s) = r(s) + gamma * max_a E[V(s')].
/// The iteration cap is derived from gamma, the tolerance and the reward range;
/// exceeding it throws (it signals corrupted gamma/tolerance, not a hard case).
PlanResult plan_optimal(const Mdp& mdp, const Eigen::VectorXd& state_rewards,
                        const PlannerOptions& opts = {});

/// The deterministic optimal policy for the given state rewards.
Policy optimal_policy(const Mdp& mdp, const Eigen::VectorXd& state_rewards,
                      const PlannerOptions& opts = {});

}  // namespace teachrisk

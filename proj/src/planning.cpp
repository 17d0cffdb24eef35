#include "teachrisk/planning.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace teachrisk {

namespace {

// Iterations after which the value error from V_0 = 0 provably drops below
// tol: gamma^m * range / (1 - gamma) <= tol.
int iteration_cap(double gamma, double tol, double reward_range, int margin) {
    if (reward_range <= tol * (1.0 - gamma)) return 1 + margin;
    const double m = std::log(tol * (1.0 - gamma) / reward_range) / std::log(gamma);
    return static_cast<int>(std::ceil(m)) + margin;
}

}  // namespace

PlanResult plan_optimal(const Mdp& mdp, const Eigen::VectorXd& state_rewards,
                        const PlannerOptions& opts) {
    if (state_rewards.size() != mdp.n_states)
        throw std::invalid_argument("plan: reward vector size mismatch");
    if (!state_rewards.allFinite())
        throw std::invalid_argument("plan: rewards must be finite");

    const int n = mdp.n_states;
    const double range = state_rewards.maxCoeff() - state_rewards.minCoeff();
    const int cap = iteration_cap(mdp.gamma, opts.tolerance, range, opts.extra_iterations);

    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v_next(n);
    std::vector<Eigen::VectorXd> expected(mdp.n_actions);  // T_a * V per sweep

    int iter = 0;
    for (;; ++iter) {
        if (iter > cap)
            throw std::runtime_error(
                "value iteration exceeded its iteration cap; check gamma/tolerance");
        for (int a = 0; a < mdp.n_actions; ++a) expected[a] = mdp.transitions[a] * v;
        for (int s = 0; s < n; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < mdp.n_actions; ++a) {
                if (!mdp.allowed(s, a)) continue;
                best = std::max(best, expected[a][s]);
            }
            v_next[s] = state_rewards[s] + mdp.gamma * best;
        }
        const double delta = (v_next - v).lpNorm<Eigen::Infinity>();
        v.swap(v_next);
        if (delta <= opts.tolerance) break;
    }

    // Greedy extraction; scanning in action order with strict improvement
    // breaks ties toward the lowest index.
    for (int a = 0; a < mdp.n_actions; ++a) expected[a] = mdp.transitions[a] * v;
    std::vector<int> actions(n, 0);
    for (int s = 0; s < n; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        int best_a = -1;
        for (int a = 0; a < mdp.n_actions; ++a) {
            if (!mdp.allowed(s, a)) continue;
            if (expected[a][s] > best) {
                best = expected[a][s];
                best_a = a;
            }
        }
        actions[s] = best_a;
    }

    PlanResult result;
    result.policy = Policy::deterministic(actions, mdp.n_actions);
    result.values = std::move(v);
    result.iterations = iter + 1;
    return result;
}

Policy optimal_policy(const Mdp& mdp, const Eigen::VectorXd& state_rewards,
                      const PlannerOptions& opts) {
    return plan_optimal(mdp, state_rewards, opts).policy;
}

}  // namespace teachrisk

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace teachrisk {

/// Finite MDP with a linear-reward feature map. Transitions are stored as one
/// dense row-stochastic matrix per action; transitions[a](s, s') is the
/// probability of moving to s' when taking a in s. States with a disallowed
/// (s, a) pair carry an arbitrary valid row there; planners and simulators
/// must consult allowed(s, a) before using it.
struct Mdp {
    int n_states = 0;
    int n_actions = 0;
    std::vector<Eigen::MatrixXd> transitions;  // n_actions matrices, n_states x n_states
    Eigen::VectorXd initial_dist;              // D, length n_states
    double gamma = 0.9;
    Eigen::MatrixXd features;                  // n_states x k, row s = phi(s)
    std::vector<std::vector<bool>> allowed_actions;  // [s][a]

    int n_features() const { return static_cast<int>(features.cols()); }
    bool allowed(int s, int a) const { return allowed_actions[s][a]; }

    /// 2 * max_s ||phi(s)|| / (1 - gamma); every mu(pi) lies in a ball of half
    /// this diameter around the origin.
    double mu_diameter_upper() const {
        double max_norm = 0.0;
        for (int s = 0; s < n_states; ++s)
            max_norm = std::max(max_norm, features.row(s).norm());
        return 2.0 * max_norm / (1.0 - gamma);
    }
};

/// Throws std::invalid_argument unless all structural invariants hold:
/// stochastic rows (1 +- 1e-12, nonnegative), stochastic initial distribution,
/// gamma in (0,1), and at least one allowed action per state.
void validate_mdp(const Mdp& mdp);

/// Stochastic policy: row-stochastic n_states x n_actions matrix with zero
/// probability on disallowed actions.
struct Policy {
    Eigen::MatrixXd action_probs;

    static Policy deterministic(const std::vector<int>& actions, int n_actions);

    /// For deterministic policies: the action per state (lowest index carrying
    /// all the probability mass).
    std::vector<int> deterministic_actions() const;
};

void validate_policy(const Mdp& mdp, const Policy& policy);

/// Convex mixture of policies; weights sum to 1.
struct MixedPolicy {
    std::vector<std::pair<double, Policy>> components;

    static MixedPolicy single(Policy p) { return MixedPolicy{{{1.0, std::move(p)}}}; }
};

void validate_mixed_policy(const Mdp& mdp, const MixedPolicy& mixed);

/// Discounted feature expectations mu(pi) in R^k.
struct FeatureExpectations {
    Eigen::VectorXd mu;
};

}  // namespace teachrisk

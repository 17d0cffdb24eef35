#include "teachrisk/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace teachrisk {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

bool is_distribution(const Eigen::VectorXd& v, double tol) {
    if (v.minCoeff() < 0.0) return false;
    return std::abs(v.sum() - 1.0) <= tol;
}

}  // namespace

void validate_mdp(const Mdp& mdp) {
    require(mdp.n_states >= 1, "mdp: n_states must be positive");
    require(mdp.n_actions >= 1, "mdp: n_actions must be positive");
    require(mdp.gamma > 0.0 && mdp.gamma < 1.0, "mdp: gamma must lie in (0,1)");
    require(static_cast<int>(mdp.transitions.size()) == mdp.n_actions,
            "mdp: one transition matrix per action required");
    require(mdp.initial_dist.size() == mdp.n_states, "mdp: initial_dist size mismatch");
    require(is_distribution(mdp.initial_dist, 1e-12),
            "mdp: initial_dist is not a probability vector");
    require(mdp.features.rows() == mdp.n_states, "mdp: feature matrix row count mismatch");
    require(mdp.features.allFinite(), "mdp: features must be finite");
    require(static_cast<int>(mdp.allowed_actions.size()) == mdp.n_states,
            "mdp: allowed_actions size mismatch");

    for (int a = 0; a < mdp.n_actions; ++a) {
        const auto& t = mdp.transitions[a];
        require(t.rows() == mdp.n_states && t.cols() == mdp.n_states,
                "mdp: transition matrix shape mismatch");
        for (int s = 0; s < mdp.n_states; ++s) {
            require(is_distribution(t.row(s).transpose(), 1e-12),
                    "mdp: transition row (s=" + std::to_string(s) +
                        ", a=" + std::to_string(a) + ") is not a probability vector");
        }
    }
    for (int s = 0; s < mdp.n_states; ++s) {
        require(static_cast<int>(mdp.allowed_actions[s].size()) == mdp.n_actions,
                "mdp: allowed_actions row size mismatch");
        bool any = false;
        for (bool b : mdp.allowed_actions[s]) any = any || b;
        require(any, "mdp: state " + std::to_string(s) + " has no allowed action");
    }
}

Policy Policy::deterministic(const std::vector<int>& actions, int n_actions) {
    Policy p;
    p.action_probs = Eigen::MatrixXd::Zero(static_cast<int>(actions.size()), n_actions);
    for (int s = 0; s < static_cast<int>(actions.size()); ++s) {
        if (actions[s] < 0 || actions[s] >= n_actions)
            throw std::invalid_argument("policy: action index out of range");
        p.action_probs(s, actions[s]) = 1.0;
    }
    return p;
}

std::vector<int> Policy::deterministic_actions() const {
    std::vector<int> actions(action_probs.rows());
    for (int s = 0; s < action_probs.rows(); ++s) {
        int best = 0;
        action_probs.row(s).maxCoeff(&best);
        actions[s] = best;
    }
    return actions;
}

void validate_policy(const Mdp& mdp, const Policy& policy) {
    require(policy.action_probs.rows() == mdp.n_states &&
                policy.action_probs.cols() == mdp.n_actions,
            "policy: shape mismatch");
    for (int s = 0; s < mdp.n_states; ++s) {
        require(is_distribution(policy.action_probs.row(s).transpose(), 1e-12),
                "policy: row " + std::to_string(s) + " is not a probability vector");
        for (int a = 0; a < mdp.n_actions; ++a)
            require(mdp.allowed(s, a) || policy.action_probs(s, a) == 0.0,
                    "policy: positive probability on disallowed action");
    }
}

void validate_mixed_policy(const Mdp& mdp, const MixedPolicy& mixed) {
    require(!mixed.components.empty(), "mixed policy: no components");
    double total = 0.0;
    for (const auto& [w, p] : mixed.components) {
        require(w >= 0.0, "mixed policy: negative weight");
        validate_policy(mdp, p);
        total += w;
    }
    require(std::abs(total - 1.0) <= 1e-9, "mixed policy: weights must sum to 1");
}

}  // namespace teachrisk

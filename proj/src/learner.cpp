#include "teachrisk/learner.hpp"

#include <stdexcept>

namespace teachrisk {

namespace {

struct Step {
    std::vector<int> actions;
    Eigen::VectorXd view_mu;
};

Step plan_and_view(const Mdp& mdp, const Worldview& a, const Eigen::VectorXd& w_view,
                   const LearnerConfig& cfg, OccupancyCache& cache) {
    // State reward the learner optimizes: <w_view, A phi(s)>.
    const Eigen::VectorXd rewards = mdp.features * (a.matrix().transpose() * w_view);
    Step step;
    step.actions = optimal_policy(mdp, rewards, cfg.planner).deterministic_actions();
    step.view_mu = a.matrix() * cache.feature_expectations(step.actions).mu;
    return step;
}

MixedPolicy assemble_mixture(const std::vector<std::pair<double, std::vector<int>>>& parts,
                             int n_actions) {
    MixedPolicy mixed;
    double total = 0.0;
    for (const auto& [w, actions] : parts) {
        if (w <= 0.0) continue;
        mixed.components.emplace_back(w, Policy::deterministic(actions, n_actions));
        total += w;
    }
    if (mixed.components.empty()) {
        // All mass collapsed onto later components; keep the newest policy.
        mixed.components.emplace_back(1.0, Policy::deterministic(parts.back().second, n_actions));
        total = 1.0;
    }
    for (auto& [w, p] : mixed.components) w /= total;
    return mixed;
}

}  // namespace

LearnerResult project_learner(const Mdp& mdp, const Worldview& a,
                              const Eigen::VectorXd& target_view_mu,
                              const LearnerConfig& cfg, OccupancyCache* cache) {
    if (a.feature_dim() != mdp.n_features())
        throw std::invalid_argument("learner: worldview feature dimension mismatch");
    if (target_view_mu.size() != a.view_dim())
        throw std::invalid_argument("learner: target dimension mismatch");
    if (!(cfg.match_tolerance > 0.0))
        throw std::invalid_argument("learner: match_tolerance must be positive");

    LearnerResult result;
    if (a.view_dim() == 0) {
        // The learner sees nothing: any policy matches the (empty) view target.
        const auto actions =
            optimal_policy(mdp, Eigen::VectorXd::Zero(mdp.n_states), cfg.planner)
                .deterministic_actions();
        result.mixed_policy = MixedPolicy::single(Policy::deterministic(actions, mdp.n_actions));
        result.view_distance_history = {0.0};
        result.converged = true;
        result.final_view_distance = 0.0;
        return result;
    }

    OccupancyCache local_cache(mdp);
    OccupancyCache& occ = cache ? *cache : local_cache;

    std::vector<std::pair<double, std::vector<int>>> parts;

    Step first = plan_and_view(mdp, a, target_view_mu, cfg, occ);
    parts.emplace_back(1.0, first.actions);
    Eigen::VectorXd point = first.view_mu;  // mu_bar^(i), the recursion's running view point
    double distance = (target_view_mu - point).norm();
    result.view_distance_history.push_back(distance);

    bool converged = distance < cfg.match_tolerance;
    for (int iter = 1; iter <= cfg.max_iterations && !converged; ++iter) {
        const Eigen::VectorXd direction = target_view_mu - point;
        const Step step = plan_and_view(mdp, a, direction, cfg, occ);

        const Eigen::VectorXd segment = step.view_mu - point;
        const double seg_sq = segment.squaredNorm();
        if (seg_sq <= 0.0) {
            // The best policy along this direction is where we already are;
            // no further progress is possible.
            result.view_distance_history.push_back(distance);
            break;
        }
        const double lambda = std::clamp(direction.dot(segment) / seg_sq, 0.0, 1.0);
        if (lambda == 0.0) {
            result.view_distance_history.push_back(distance);
            break;
        }

        point += lambda * segment;
        for (auto& [w, actions] : parts) w *= 1.0 - lambda;
        parts.emplace_back(lambda, step.actions);

        const double next_distance = (target_view_mu - point).norm();
        result.view_distance_history.push_back(next_distance);
        if (next_distance >= distance - 1e-15 && next_distance >= cfg.match_tolerance) {
            // Stalled short of the tolerance.
            distance = std::min(distance, next_distance);
            break;
        }
        distance = next_distance;
        converged = distance < cfg.match_tolerance;
    }

    result.mixed_policy = assemble_mixture(parts, mdp.n_actions);
    result.converged = converged;
    result.final_view_distance = distance;
    return result;
}

}  // namespace teachrisk

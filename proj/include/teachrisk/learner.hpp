#pragma once

#include "teachrisk/expectations.hpp"
#include "teachrisk/mdp.hpp"
#include "teachrisk/planning.hpp"
#include "teachrisk/worldview.hpp"

namespace teachrisk {

struct LearnerConfig {
    double match_tolerance = 1e-2;  // epsilon_L, view-space Euclidean norm
    int max_iterations = 300;
    PlannerOptions planner;

    /// match_tolerance scaled to the feature-expectation magnitude 1/(1-gamma).
    static LearnerConfig defaults(double gamma) {
        LearnerConfig cfg;
        cfg.match_tolerance = 1e-3 / (1.0 - gamma);
        return cfg;
    }
};

struct LearnerResult {
    MixedPolicy mixed_policy;
    std::vector<double> view_distance_history;  // ||target - mu_bar^(i)||, non-increasing
    bool converged = false;
    double final_view_distance = 0.0;
};

/// Projection-style apprenticeship learning run entirely in view space
/// psi(s) = A phi(s): plan a policy for the current weight direction, project
/// the target onto the segment from the running point to the new policy's
/// view expectations, repeat until the target is matched to match_tolerance.
/// The returned mixture carries the convex weights implied by that recursion,
/// so A * mu(mixture) equals the recursion's final point.
///
/// Hitting the iteration cap is not an error: the result reports
/// converged = false and the best-so-far mixture (performance bounds consume
/// whatever distance was achieved). A 0-row worldview returns the planner's
/// tie-break policy with distance 0.
LearnerResult project_learner(const Mdp& mdp, const Worldview& a,
                              const Eigen::VectorXd& target_view_mu,
                              const LearnerConfig& cfg, OccupancyCache* cache = nullptr);

}  // namespace teachrisk

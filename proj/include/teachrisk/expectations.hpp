#pragma once

#include <memory>
#include <optional>
#include <unordered_map>

#include "teachrisk/mdp.hpp"
#include "teachrisk/rng.hpp"

namespace teachrisk {

/// Exact discounted feature expectations: mu = Phi^T d with
/// (I - gamma * P_pi^T) d = D solved densely. Throws if the solve residual
/// exceeds 1e-10 (cannot happen for valid transitions with gamma < 1).
FeatureExpectations feature_expectations_exact(const Mdp& mdp, const Policy& policy);

FeatureExpectations feature_expectations_mixed(const Mdp& mdp, const MixedPolicy& mixed);

/// Empirical mean of sum_t gamma^t phi(s_t) over seeded rollouts. For mixtures
/// a component is drawn once per rollout. Throws on n_rollouts == 0.
FeatureExpectations feature_expectations_sampled(const Mdp& mdp, const Policy& policy,
                                                 int n_rollouts, int horizon,
                                                 std::uint64_t seed);
FeatureExpectations feature_expectations_sampled(const Mdp& mdp, const MixedPolicy& mixed,
                                                 int n_rollouts, int horizon,
                                                 std::uint64_t seed);

/// Affine normalization of <w_star, mu> to [0,1] between the worst and best
/// achievable policy values. nullopt when the MDP is reward-degenerate for
/// w_star (best and worst coincide).
std::optional<double> relative_performance(const Mdp& mdp, const Eigen::VectorXd& w_star,
                                           const FeatureExpectations& mu);

/// Precomputed normalization for repeated relative-performance evaluations
/// against a fixed (mdp, w_star) pair.
struct PerformanceScale {
    double r_min = 0.0;
    double r_max = 0.0;

    static PerformanceScale compute(const Mdp& mdp, const Eigen::VectorXd& w_star);
    bool degenerate() const;
    std::optional<double> relative(double true_value) const;
};

struct DiameterEstimate {
    double lower = 0.0;  // max over sampled directions of ||mu(opt u) - mu(opt -u)||
    double upper = 0.0;  // 2 max_s ||phi(s)|| / (1 - gamma)
};

/// Sampled lower bound plus analytic upper bound on diam mu(Pi). The upper
/// bound is the one safe to use inside theorem checks.
DiameterEstimate estimate_diameter(const Mdp& mdp, int n_directions, std::uint64_t seed);

/// Memoizes the occupancy solve for deterministic policies of one fixed MDP.
/// Not thread-safe; use one cache per worker.
class OccupancyCache {
  public:
    explicit OccupancyCache(const Mdp& mdp) : mdp_(&mdp) {}

    /// Occupancy vector d for a deterministic policy given by its action list.
    const Eigen::VectorXd& occupancy(const std::vector<int>& actions);

    FeatureExpectations feature_expectations(const std::vector<int>& actions);

    std::size_t size() const { return cache_.size(); }

  private:
    struct VecHash {
        std::size_t operator()(const std::vector<int>& v) const;
    };

    const Mdp* mdp_;
    std::unordered_map<std::vector<int>, Eigen::VectorXd, VecHash> cache_;
};

}  // namespace teachrisk

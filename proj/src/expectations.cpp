#include "teachrisk/expectations.hpp"

#include <stdexcept>

#include "teachrisk/planning.hpp"

namespace teachrisk {

namespace {

Eigen::MatrixXd policy_transition(const Mdp& mdp, const Policy& policy) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_states);
    for (int a = 0; a < mdp.n_actions; ++a) {
        const auto weights = policy.action_probs.col(a);
        if (weights.isZero(0.0)) continue;
        p += weights.asDiagonal() * mdp.transitions[a];
    }
    return p;
}

Eigen::VectorXd solve_occupancy(const Mdp& mdp, const Eigen::MatrixXd& p_pi) {
    const int n = mdp.n_states;
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - mdp.gamma * p_pi.transpose();
    Eigen::VectorXd d = system.partialPivLu().solve(mdp.initial_dist);
    const double residual = (system * d - mdp.initial_dist).lpNorm<Eigen::Infinity>();
    if (residual > 1e-10)
        throw std::runtime_error("occupancy solve residual too large; transitions corrupted?");
    return d;
}

int sample_next_state(const Mdp& mdp, int s, int a, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    const auto row = mdp.transitions[a].row(s);
    for (int t = 0; t < mdp.n_states; ++t) {
        acc += row[t];
        if (u < acc) return t;
    }
    return mdp.n_states - 1;
}

int sample_action(const Mdp& mdp, const Policy& policy, int s, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int a = 0; a < mdp.n_actions; ++a) {
        acc += policy.action_probs(s, a);
        if (u < acc) return a;
    }
    for (int a = mdp.n_actions - 1; a >= 0; --a)
        if (policy.action_probs(s, a) > 0.0) return a;
    return 0;
}

Eigen::VectorXd rollout_sum(const Mdp& mdp, const Policy& policy, int horizon, Rng& rng) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(mdp.n_features());
    int s = rng.categorical(mdp.initial_dist);
    double discount = 1.0;
    for (int t = 0; t < horizon; ++t) {
        acc += discount * mdp.features.row(s).transpose();
        const int a = sample_action(mdp, policy, s, rng);
        s = sample_next_state(mdp, s, a, rng);
        discount *= mdp.gamma;
    }
    return acc;
}

}  // namespace

FeatureExpectations feature_expectations_exact(const Mdp& mdp, const Policy& policy) {
    const Eigen::VectorXd d = solve_occupancy(mdp, policy_transition(mdp, policy));
    return FeatureExpectations{mdp.features.transpose() * d};
}

FeatureExpectations feature_expectations_mixed(const Mdp& mdp, const MixedPolicy& mixed) {
    if (mixed.components.empty())
        throw std::invalid_argument("mixed policy: no components");
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(mdp.n_features());
    for (const auto& [w, p] : mixed.components) {
        if (w == 0.0) continue;
        mu += w * feature_expectations_exact(mdp, p).mu;
    }
    return FeatureExpectations{std::move(mu)};
}

FeatureExpectations feature_expectations_sampled(const Mdp& mdp, const Policy& policy,
                                                 int n_rollouts, int horizon,
                                                 std::uint64_t seed) {
    if (n_rollouts < 1) throw std::invalid_argument("sampled mu: need at least one rollout");
    Rng rng(seed);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(mdp.n_features());
    for (int r = 0; r < n_rollouts; ++r) acc += rollout_sum(mdp, policy, horizon, rng);
    return FeatureExpectations{acc / n_rollouts};
}

FeatureExpectations feature_expectations_sampled(const Mdp& mdp, const MixedPolicy& mixed,
                                                 int n_rollouts, int horizon,
                                                 std::uint64_t seed) {
    if (n_rollouts < 1) throw std::invalid_argument("sampled mu: need at least one rollout");
    validate_mixed_policy(mdp, mixed);
    Rng rng(seed);
    Eigen::VectorXd weights(mixed.components.size());
    for (std::size_t i = 0; i < mixed.components.size(); ++i)
        weights[static_cast<int>(i)] = mixed.components[i].first;

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(mdp.n_features());
    for (int r = 0; r < n_rollouts; ++r) {
        // Mixture semantics: draw the component once per rollout.
        const int c = rng.categorical(weights);
        acc += rollout_sum(mdp, mixed.components[c].second, horizon, rng);
    }
    return FeatureExpectations{acc / n_rollouts};
}

PerformanceScale PerformanceScale::compute(const Mdp& mdp, const Eigen::VectorXd& w_star) {
    const Eigen::VectorXd rewards = mdp.features * w_star;
    const Policy best = optimal_policy(mdp, rewards);
    const Policy worst = optimal_policy(mdp, -rewards);
    PerformanceScale scale;
    scale.r_max = w_star.dot(feature_expectations_exact(mdp, best).mu);
    scale.r_min = w_star.dot(feature_expectations_exact(mdp, worst).mu);
    return scale;
}

bool PerformanceScale::degenerate() const {
    return r_max - r_min <= 1e-12 * std::max({1.0, std::abs(r_max), std::abs(r_min)});
}

std::optional<double> PerformanceScale::relative(double true_value) const {
    if (degenerate()) return std::nullopt;
    return (true_value - r_min) / (r_max - r_min);
}

std::optional<double> relative_performance(const Mdp& mdp, const Eigen::VectorXd& w_star,
                                           const FeatureExpectations& mu) {
    if (std::abs(w_star.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("relative_performance: w_star must be a unit vector");
    return PerformanceScale::compute(mdp, w_star).relative(w_star.dot(mu.mu));
}

DiameterEstimate estimate_diameter(const Mdp& mdp, int n_directions, std::uint64_t seed) {
    if (n_directions < 1)
        throw std::invalid_argument("estimate_diameter: need at least one direction");
    DiameterEstimate est;
    est.upper = mdp.mu_diameter_upper();

    Rng rng(seed);
    const int k = mdp.n_features();
    for (int i = 0; i < n_directions; ++i) {
        const Eigen::VectorXd u = rng.unit_vector(k);
        const Eigen::VectorXd rewards = mdp.features * u;
        const auto mu_hi = feature_expectations_exact(mdp, optimal_policy(mdp, rewards)).mu;
        const auto mu_lo = feature_expectations_exact(mdp, optimal_policy(mdp, -rewards)).mu;
        est.lower = std::max(est.lower, (mu_hi - mu_lo).norm());
    }
    return est;
}

std::size_t OccupancyCache::VecHash::operator()(const std::vector<int>& v) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (int x : v) {
        h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

const Eigen::VectorXd& OccupancyCache::occupancy(const std::vector<int>& actions) {
    auto it = cache_.find(actions);
    if (it != cache_.end()) return it->second;
    const Policy p = Policy::deterministic(actions, mdp_->n_actions);
    Eigen::VectorXd d = solve_occupancy(*mdp_, policy_transition(*mdp_, p));
    return cache_.emplace(actions, std::move(d)).first->second;
}

FeatureExpectations OccupancyCache::feature_expectations(const std::vector<int>& actions) {
    return FeatureExpectations{mdp_->features.transpose() * occupancy(actions)};
}

}  // namespace teachrisk

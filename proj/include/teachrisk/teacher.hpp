#pragma once

#include <functional>
#include <string>

#include "teachrisk/learner.hpp"

namespace teachrisk {

/// The finite set of teachable features; each may be taught at most once.
class FeaturePool {
  public:
    explicit FeaturePool(std::vector<Eigen::VectorXd> features);

    static FeaturePool one_hot(int k);
    static FeaturePool random_unit(int k, int size, Rng& rng);

    int size() const { return static_cast<int>(features_.size()); }
    int n_untaught() const { return n_untaught_; }
    bool taught(int i) const { return taught_[i]; }
    const Eigen::VectorXd& feature(int i) const { return features_[i]; }

    void mark_taught(int i);

  private:
    std::vector<Eigen::VectorXd> features_;
    std::vector<bool> taught_;
    int n_untaught_ = 0;
};

enum class Strategy { kTrGreedy, kRandom, kPerfGreedy };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

/// Untaught feature whose row-append minimizes the updated teaching risk;
/// ties broken by lowest index. Throws std::logic_error on an exhausted pool.
int trgreedy_select(const Worldview& a, const FeaturePool& pool, const RewardWeights& w);

/// Uniform over untaught features, deterministic given the seed.
int random_select(const FeaturePool& pool, std::uint64_t seed);

/// Simulates one learner round per untaught candidate and returns the feature
/// whose append maximizes the learner's true performance <w_star, mu(mixture)>;
/// ties broken by lowest index. view_target maps a candidate worldview to the
/// target the simulated learner must match.
int perfgreedy_select(const Mdp& mdp, const Worldview& a, const FeaturePool& pool,
                      const std::function<Eigen::VectorXd(const Worldview&)>& view_target,
                      const RewardWeights& w, const LearnerConfig& cfg,
                      OccupancyCache* cache = nullptr);

struct RoundRecord {
    int round = 0;           // 0 = initial training before any teaching
    int feature_index = -1;  // -1 when no feature was taught this round
    double teaching_risk = 0.0;
    double view_distance = 0.0;  // learner's final view-space match distance
    double true_perf = 0.0;      // <w_star, mu(mixture)>
    double rel_perf = 0.0;       // affine-normalized true_perf (0 when degenerate)
    double elapsed_ms = 0.0;
};

struct TeachingSession {
    std::vector<RoundRecord> rounds;  // round 0 plus one record per taught feature
    int budget = 0;
    double threshold = 0.0;  // epsilon of the stopping test
    Strategy strategy = Strategy::kTrGreedy;
    Worldview final_worldview;
    MixedPolicy final_policy;
    bool stopped_early = false;   // performance gap reached the threshold
    bool pool_exhausted = false;  // ran out of features before budget/threshold

    int n_taught() const { return static_cast<int>(rounds.size()) - 1; }
};

/// Round-based feature teaching: train the learner under the initial
/// worldview, then per round stop if the true-performance gap to pi_T is
/// within eps, otherwise select a feature by the chosen strategy, append it,
/// and retrain against the updated view of mu(pi_T). The teacher knows the
/// MDP, so the stopping test uses exact feature expectations of the current
/// mixture.
TeachingSession run_teaching_session(const Mdp& mdp, const RewardWeights& w,
                                     const Worldview& a0, FeaturePool pool, int budget,
                                     double eps, Strategy strategy,
                                     const LearnerConfig& cfg, const Policy& pi_t,
                                     std::uint64_t session_seed);

struct WitnessReport {
    double max_gap = 0.0;               // best view-value improvement over pi_star found
    Eigen::VectorXd witness_direction;  // learner-reward direction attaining max_gap
    double frac_matched = 0.0;  // directions where a view-distinct policy ties or beats pi_star
    int n_strict = 0;           // directions with a strictly better policy
    bool enumerated = true;     // false: policy space too large, sampled instead
    long n_policies = 0;
};

/// Empirical certificate that a truly optimal policy fails to look optimal in
/// view space: over sampled unit learner-reward directions, how much some
/// policy beats pi_star's view value. Enumerates deterministic policies when
/// their count is within enumeration_cap, otherwise samples (flagged in the
/// report).
WitnessReport suboptimality_witness(const Mdp& mdp, const Worldview& a,
                                    const Policy& pi_star, int n_directions,
                                    std::uint64_t seed, long enumeration_cap = 200000,
                                    int n_sampled_policies = 4000);

}  // namespace teachrisk

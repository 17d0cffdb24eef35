#include "teachrisk/teacher.hpp"

#include <chrono>
#include <limits>
#include <stdexcept>

namespace teachrisk {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Product of per-state allowed-action counts, saturating at cap + 1.
long count_deterministic_policies(const Mdp& mdp, long cap) {
    long count = 1;
    for (int s = 0; s < mdp.n_states; ++s) {
        long allowed = 0;
        for (int a = 0; a < mdp.n_actions; ++a)
            if (mdp.allowed(s, a)) ++allowed;
        if (count > cap / allowed) return cap + 1;
        count *= allowed;
    }
    return count;
}

std::vector<std::vector<int>> allowed_action_lists(const Mdp& mdp) {
    std::vector<std::vector<int>> lists(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            if (mdp.allowed(s, a)) lists[s].push_back(a);
    return lists;
}

}  // namespace

FeaturePool::FeaturePool(std::vector<Eigen::VectorXd> features)
    : features_(std::move(features)) {
    if (features_.empty()) throw std::invalid_argument("feature pool: empty");
    const auto dim = features_.front().size();
    for (const auto& f : features_) {
        if (f.size() != dim) throw std::invalid_argument("feature pool: mixed dimensions");
        if (!f.allFinite()) throw std::invalid_argument("feature pool: non-finite feature");
    }
    taught_.assign(features_.size(), false);
    n_untaught_ = static_cast<int>(features_.size());
}

FeaturePool FeaturePool::one_hot(int k) {
    std::vector<Eigen::VectorXd> features;
    features.reserve(k);
    for (int i = 0; i < k; ++i) features.push_back(Eigen::VectorXd::Unit(k, i));
    return FeaturePool(std::move(features));
}

FeaturePool FeaturePool::random_unit(int k, int size, Rng& rng) {
    std::vector<Eigen::VectorXd> features;
    features.reserve(size);
    for (int i = 0; i < size; ++i) features.push_back(rng.unit_vector(k));
    return FeaturePool(std::move(features));
}

void FeaturePool::mark_taught(int i) {
    if (i < 0 || i >= size()) throw std::out_of_range("feature pool: index out of range");
    if (taught_[i]) throw std::logic_error("feature pool: feature already taught");
    taught_[i] = true;
    --n_untaught_;
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::kTrGreedy: return "trgreedy";
        case Strategy::kRandom: return "random";
        case Strategy::kPerfGreedy: return "perfgreedy";
    }
    return "unknown";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "trgreedy") return Strategy::kTrGreedy;
    if (name == "random") return Strategy::kRandom;
    if (name == "perfgreedy") return Strategy::kPerfGreedy;
    throw std::invalid_argument("unknown strategy: " + name);
}

int trgreedy_select(const Worldview& a, const FeaturePool& pool, const RewardWeights& w) {
    if (pool.n_untaught() == 0) throw std::logic_error("trgreedy: pool exhausted");
    int best = -1;
    double best_risk = std::numeric_limits<double>::infinity();
    for (int i = 0; i < pool.size(); ++i) {
        if (pool.taught(i)) continue;
        const double risk = teaching_risk(a.with_row(pool.feature(i)), w);
        if (risk < best_risk) {
            best_risk = risk;
            best = i;
        }
    }
    return best;
}

int random_select(const FeaturePool& pool, std::uint64_t seed) {
    if (pool.n_untaught() == 0) throw std::logic_error("random select: pool exhausted");
    Rng rng(seed);
    auto pick = rng.uniform_index(static_cast<std::uint64_t>(pool.n_untaught()));
    for (int i = 0; i < pool.size(); ++i) {
        if (pool.taught(i)) continue;
        if (pick == 0) return i;
        --pick;
    }
    return pool.size() - 1;
}

int perfgreedy_select(const Mdp& mdp, const Worldview& a, const FeaturePool& pool,
                      const std::function<Eigen::VectorXd(const Worldview&)>& view_target,
                      const RewardWeights& w, const LearnerConfig& cfg,
                      OccupancyCache* cache) {
    if (pool.n_untaught() == 0) throw std::logic_error("perfgreedy: pool exhausted");
    OccupancyCache local_cache(mdp);
    OccupancyCache& occ = cache ? *cache : local_cache;

    int best = -1;
    double best_perf = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < pool.size(); ++i) {
        if (pool.taught(i)) continue;
        const Worldview candidate = a.with_row(pool.feature(i));
        const LearnerResult sim =
            project_learner(mdp, candidate, view_target(candidate), cfg, &occ);
        const double perf =
            w.w_star.dot(feature_expectations_mixed(mdp, sim.mixed_policy).mu);
        if (perf > best_perf) {
            best_perf = perf;
            best = i;
        }
    }
    return best;
}

TeachingSession run_teaching_session(const Mdp& mdp, const RewardWeights& w,
                                     const Worldview& a0, FeaturePool pool, int budget,
                                     double eps, Strategy strategy,
                                     const LearnerConfig& cfg, const Policy& pi_t,
                                     std::uint64_t session_seed) {
    if (budget < 1) throw std::invalid_argument("teaching session: budget must be >= 1");
    if (eps < 0.0) throw std::invalid_argument("teaching session: eps must be >= 0");

    const Eigen::VectorXd mu_t = feature_expectations_exact(mdp, pi_t).mu;
    const double perf_t = w.w_star.dot(mu_t);
    const PerformanceScale scale = PerformanceScale::compute(mdp, w.w_star);
    OccupancyCache cache(mdp);

    TeachingSession session;
    session.budget = budget;
    session.threshold = eps;
    session.strategy = strategy;

    Worldview a = a0;
    auto train_and_log = [&](int round, int feature_index, double elapsed_pre_ms) {
        const auto start = Clock::now();
        const LearnerResult trained =
            project_learner(mdp, a, a.matrix() * mu_t, cfg, &cache);
        const double perf =
            w.w_star.dot(feature_expectations_mixed(mdp, trained.mixed_policy).mu);
        RoundRecord rec;
        rec.round = round;
        rec.feature_index = feature_index;
        rec.teaching_risk = teaching_risk(a, w);
        rec.view_distance = trained.final_view_distance;
        rec.true_perf = perf;
        rec.rel_perf = scale.relative(perf).value_or(0.0);
        rec.elapsed_ms = elapsed_pre_ms + ms_since(start);
        session.rounds.push_back(rec);
        session.final_policy = trained.mixed_policy;
        return perf;
    };

    double perf_l = train_and_log(0, -1, 0.0);

    for (int round = 1; round <= budget; ++round) {
        if (std::abs(perf_t - perf_l) <= eps) {
            session.stopped_early = true;
            break;
        }
        if (pool.n_untaught() == 0) {
            session.pool_exhausted = true;
            break;
        }
        const auto start = Clock::now();
        int chosen = -1;
        switch (strategy) {
            case Strategy::kTrGreedy:
                chosen = trgreedy_select(a, pool, w);
                break;
            case Strategy::kRandom:
                chosen = random_select(
                    pool, seeding::derive(session_seed,
                                          {static_cast<std::uint64_t>(round),
                                           seeding::tag("random-select")}));
                break;
            case Strategy::kPerfGreedy:
                chosen = perfgreedy_select(
                    mdp, a, pool,
                    [&](const Worldview& candidate) { return candidate.matrix() * mu_t; },
                    w, cfg, &cache);
                break;
        }
        pool.mark_taught(chosen);
        a = a.with_row(pool.feature(chosen));
        perf_l = train_and_log(round, chosen, ms_since(start));
    }

    session.final_worldview = a;
    return session;
}

WitnessReport suboptimality_witness(const Mdp& mdp, const Worldview& a,
                                    const Policy& pi_star, int n_directions,
                                    std::uint64_t seed, long enumeration_cap,
                                    int n_sampled_policies) {
    if (n_directions < 1)
        throw std::invalid_argument("witness: need at least one direction");
    const int ell = a.view_dim();
    const Eigen::VectorXd view_star =
        a.matrix() * feature_expectations_exact(mdp, pi_star).mu;

    WitnessReport report;
    report.witness_direction = Eigen::VectorXd::Zero(ell);
    if (ell == 0) {
        // Every policy has the same (empty) view value.
        report.frac_matched = 1.0;
        report.n_policies = 1;
        return report;
    }

    const auto lists = allowed_action_lists(mdp);
    const long n_policies = count_deterministic_policies(mdp, enumeration_cap);
    report.enumerated = n_policies <= enumeration_cap;

    OccupancyCache cache(mdp);
    std::vector<Eigen::VectorXd> view_mus;
    if (report.enumerated) {
        report.n_policies = n_policies;
        view_mus.reserve(n_policies);
        std::vector<int> idx(mdp.n_states, 0);
        std::vector<int> actions(mdp.n_states);
        for (;;) {
            for (int s = 0; s < mdp.n_states; ++s) actions[s] = lists[s][idx[s]];
            view_mus.push_back(a.matrix() * cache.feature_expectations(actions).mu);
            int s = 0;
            while (s < mdp.n_states && ++idx[s] == static_cast<int>(lists[s].size())) {
                idx[s] = 0;
                ++s;
            }
            if (s == mdp.n_states) break;
        }
    } else {
        report.n_policies = n_sampled_policies;
        Rng rng(seeding::derive(seed, {seeding::tag("witness-policies")}));
        std::vector<int> actions(mdp.n_states);
        for (int p = 0; p < n_sampled_policies; ++p) {
            for (int s = 0; s < mdp.n_states; ++s)
                actions[s] = lists[s][rng.uniform_index(lists[s].size())];
            view_mus.push_back(a.matrix() * cache.feature_expectations(actions).mu);
        }
    }

    constexpr double kTieTol = 1e-9;
    Rng rng(seeding::derive(seed, {seeding::tag("witness-directions")}));
    int matched = 0;
    for (int d = 0; d < n_directions; ++d) {
        const Eigen::VectorXd w = rng.unit_vector(ell);
        const double star_value = w.dot(view_star);
        double best = -std::numeric_limits<double>::infinity();
        bool distinct_match = false;
        for (const auto& vm : view_mus) {
            const double value = w.dot(vm);
            best = std::max(best, value);
            if (!distinct_match && value >= star_value - kTieTol &&
                (vm - view_star).norm() > kTieTol)
                distinct_match = true;
        }
        const double gap = best - star_value;
        if (gap > report.max_gap) {
            report.max_gap = gap;
            report.witness_direction = w;
        }
        if (gap > kTieTol) ++report.n_strict;
        if (distinct_match) ++matched;
    }
    report.frac_matched = static_cast<double>(matched) / n_directions;
    return report;
}

}  // namespace teachrisk

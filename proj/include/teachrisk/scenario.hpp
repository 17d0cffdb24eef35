#pragma once

#include <optional>
#include <string>
#include <vector>

#include "teachrisk/gridworld.hpp"
#include "teachrisk/learner.hpp"
#include "teachrisk/teacher.hpp"

namespace teachrisk {

/// How per-trial worldviews are drawn.
struct WorldviewSpec {
    enum class Kind { kGaussian, kIdentity, kExplicit };
    Kind kind = Kind::kGaussian;
    int ell = 5;                             // rows for Gaussian draws
    std::vector<Eigen::VectorXd> rows;       // explicit rows (k-dim each)

    Worldview realize(int k, Rng& rng) const;
};

struct PoolSpec {
    enum class Kind { kOneHot, kRandomUnit, kExplicit };
    Kind kind = Kind::kRandomUnit;
    int size = 30;                           // random-unit pool size
    std::vector<Eigen::VectorXd> features;   // explicit pool

    FeaturePool realize(int k, Rng& rng) const;
};

/// Experiment protocol parameters; loaded from a JSON config file, each field
/// overridable from the command line.
struct ExperimentConfig {
    std::string scenario = "random-grid";  // random-grid | fig1-chain | fig4-obstacles
    GridworldSpec grid;                    // used by random-grid (and as base for builtins)
    int trials = 5;
    std::uint64_t seed = 0;
    std::vector<double> gammas;            // sweep-risk: one sweep per gamma; empty = grid.gamma
    int ell_min = 1;
    int ell_max = 0;                       // 0 = k
    WorldviewSpec worldview;
    PoolSpec pool;
    std::vector<Strategy> strategies = {Strategy::kTrGreedy, Strategy::kRandom,
                                        Strategy::kPerfGreedy};
    int budget = 10;
    double epsilon = 1e-3;                 // session stopping threshold on the performance gap
    std::optional<double> match_tolerance; // learner override; default scales with gamma
    int max_iterations = 300;
    std::string out;                       // output path; empty = $TEACHRISK_OUT_DIR/<command>.csv
    bool timing = false;                   // include wall-clock columns (breaks byte-reproducibility)
    int threads = 0;                       // 0 = hardware concurrency
    int n_directions = 200;                // witness directions in verify-bounds

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);

    LearnerConfig learner_config(double gamma) const;

    /// Resolves the output path for a command (config value, else env
    /// TEACHRISK_OUT_DIR, else the working directory).
    std::string resolve_out(const std::string& command) const;
};

/// A fully-instantiated scenario: the MDP plus its reward direction.
struct ScenarioInstance {
    Mdp mdp;
    RewardWeights w;
    GridworldSpec spec;
};

/// Builds the named scenario. "fig4-obstacles" draws its reward weights from
/// the given rng (near-zero background noise); fig1-chain is fully fixed;
/// random-grid samples w uniformly from the unit sphere unless the grid spec
/// pins reward_weights.
ScenarioInstance build_scenario(const ExperimentConfig& cfg, double gamma, Rng& rng);

/// The 10x10 / 2x2 scenario with high-reward macrocells 4 and 9 and obstacle
/// macrocells 18 and 23: +1 / -1 weights there, N(0, 0.01^2) elsewhere,
/// normalized to unit length.
Eigen::VectorXd obstacle_reward_weights(int k, Rng& rng);

}  // namespace teachrisk

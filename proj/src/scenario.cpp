#include "teachrisk/scenario.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace teachrisk {

namespace {

using nlohmann::json;

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(j.size());
    int i = 0;
    for (const auto& x : j) v[i++] = x.get<double>();
    return v;
}

void parse_grid(const json& j, GridworldSpec& spec) {
    if (j.contains("n")) spec.grid_size = j["n"].get<int>();
    if (j.contains("macro")) spec.macrocell_size = j["macro"].get<int>();
    if (j.contains("action_noise")) spec.action_noise = j["action_noise"].get<double>();
    if (j.contains("gamma")) spec.gamma = j["gamma"].get<double>();
    if (j.contains("reward_weights"))
        spec.reward_weights = vector_from_json(j["reward_weights"]);
}

void parse_worldview(const json& j, WorldviewSpec& wv) {
    const std::string kind = j.value("kind", "gaussian");
    if (kind == "gaussian") {
        wv.kind = WorldviewSpec::Kind::kGaussian;
        if (j.contains("ell")) wv.ell = j["ell"].get<int>();
    } else if (kind == "identity") {
        wv.kind = WorldviewSpec::Kind::kIdentity;
    } else if (kind == "explicit") {
        wv.kind = WorldviewSpec::Kind::kExplicit;
        wv.rows.clear();
        for (const auto& row : j.at("rows")) wv.rows.push_back(vector_from_json(row));
    } else {
        throw std::invalid_argument("config: unknown worldview kind: " + kind);
    }
}

void parse_pool(const json& j, PoolSpec& pool) {
    const std::string kind = j.value("kind", "random-unit");
    if (kind == "one-hot") {
        pool.kind = PoolSpec::Kind::kOneHot;
    } else if (kind == "random-unit") {
        pool.kind = PoolSpec::Kind::kRandomUnit;
        if (j.contains("size")) pool.size = j["size"].get<int>();
    } else if (kind == "explicit") {
        pool.kind = PoolSpec::Kind::kExplicit;
        pool.features.clear();
        for (const auto& row : j.at("features")) pool.features.push_back(vector_from_json(row));
    } else {
        throw std::invalid_argument("config: unknown pool kind: " + kind);
    }
}

}  // namespace

Worldview WorldviewSpec::realize(int k, Rng& rng) const {
    switch (kind) {
        case Kind::kGaussian: {
            if (ell < 0) throw std::invalid_argument("worldview spec: ell must be >= 0");
            return Worldview(rng.normal_matrix(ell, k));
        }
        case Kind::kIdentity:
            return Worldview::identity(k);
        case Kind::kExplicit: {
            Eigen::MatrixXd m(rows.size(), k);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].size() != k)
                    throw std::invalid_argument("worldview spec: row dimension mismatch");
                m.row(static_cast<int>(i)) = rows[i].transpose();
            }
            return Worldview(std::move(m));
        }
    }
    throw std::logic_error("worldview spec: bad kind");
}

FeaturePool PoolSpec::realize(int k, Rng& rng) const {
    switch (kind) {
        case Kind::kOneHot:
            return FeaturePool::one_hot(k);
        case Kind::kRandomUnit:
            return FeaturePool::random_unit(k, size, rng);
        case Kind::kExplicit:
            return FeaturePool(features);
    }
    throw std::logic_error("pool spec: bad kind");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    if (j.contains("scenario")) cfg.scenario = j["scenario"].get<std::string>();
    if (j.contains("grid")) parse_grid(j["grid"], cfg.grid);
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("gammas")) {
        cfg.gammas.clear();
        for (const auto& g : j["gammas"]) cfg.gammas.push_back(g.get<double>());
    }
    if (j.contains("ell")) {
        const auto& e = j["ell"];
        if (e.contains("min")) cfg.ell_min = e["min"].get<int>();
        if (e.contains("max")) cfg.ell_max = e["max"].get<int>();
    }
    if (j.contains("worldview")) parse_worldview(j["worldview"], cfg.worldview);
    if (j.contains("pool")) parse_pool(j["pool"], cfg.pool);
    if (j.contains("strategies")) {
        cfg.strategies.clear();
        for (const auto& s : j["strategies"])
            cfg.strategies.push_back(strategy_from_name(s.get<std::string>()));
    }
    if (j.contains("budget")) cfg.budget = j["budget"].get<int>();
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
    if (j.contains("learner")) {
        const auto& l = j["learner"];
        if (l.contains("match_tolerance"))
            cfg.match_tolerance = l["match_tolerance"].get<double>();
        if (l.contains("max_iterations")) cfg.max_iterations = l["max_iterations"].get<int>();
    }
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("timing")) cfg.timing = j["timing"].get<bool>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("n_directions")) cfg.n_directions = j["n_directions"].get<int>();

    if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open file: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

LearnerConfig ExperimentConfig::learner_config(double gamma) const {
    LearnerConfig cfg = LearnerConfig::defaults(gamma);
    if (match_tolerance) cfg.match_tolerance = *match_tolerance;
    cfg.max_iterations = max_iterations;
    return cfg;
}

std::string ExperimentConfig::resolve_out(const std::string& command) const {
    if (!out.empty()) return out;
    std::filesystem::path dir = ".";
    if (const char* env = std::getenv("TEACHRISK_OUT_DIR")) dir = env;
    return (dir / (command + ".csv")).string();
}

Eigen::VectorXd obstacle_reward_weights(int k, Rng& rng) {
    Eigen::VectorXd w(k);
    for (int i = 0; i < k; ++i) w[i] = 0.01 * rng.normal();
    // High-reward macrocells and obstacles of the 5x5 macro layout.
    w[4] = 1.0;
    w[9] = 1.0;
    w[18] = -1.0;
    w[23] = -1.0;
    return w / w.norm();
}

ScenarioInstance build_scenario(const ExperimentConfig& cfg, double gamma, Rng& rng) {
    if (cfg.scenario == "fig1-chain") {
        Mdp mdp = build_chain(5, gamma, cfg.grid.action_noise);
        GridworldSpec spec = cfg.grid;
        spec.grid_size = 5;
        spec.macrocell_size = 1;
        spec.gamma = gamma;
        return {std::move(mdp), RewardWeights(chain_reward_weights()), spec};
    }
    if (cfg.scenario == "fig4-obstacles") {
        GridworldSpec spec = cfg.grid;
        spec.grid_size = 10;
        spec.macrocell_size = 2;
        spec.gamma = gamma;
        spec.reward_weights.reset();
        validate_gridworld_spec(spec);
        Mdp mdp = build_gridworld(spec);
        return {std::move(mdp), RewardWeights(obstacle_reward_weights(spec.n_features(), rng)),
                spec};
    }
    if (cfg.scenario == "random-grid") {
        GridworldSpec spec = cfg.grid;
        spec.gamma = gamma;
        validate_gridworld_spec(spec);
        Mdp mdp = build_gridworld(spec);
        RewardWeights w = spec.reward_weights
                              ? RewardWeights(*spec.reward_weights)
                              : RewardWeights(rng.unit_vector(spec.n_features()));
        return {std::move(mdp), std::move(w), spec};
    }
    throw std::invalid_argument("config: unknown scenario: " + cfg.scenario);
}

}  // namespace teachrisk

#include "teachrisk/gridworld.hpp"

#include <stdexcept>

namespace teachrisk {

namespace {

// Column/row displacement per grid action, indexed by GridAction.
constexpr int kDCol[4] = {-1, 1, 0, 0};
constexpr int kDRow[4] = {0, 0, -1, 1};

Mdp build_rectangle(int rows, int cols, int n_actions, double gamma, double action_noise,
                    const Eigen::MatrixXd& features) {
    const int n_states = rows * cols;
    Mdp mdp;
    mdp.n_states = n_states;
    mdp.n_actions = n_actions;
    mdp.gamma = gamma;
    mdp.features = features;
    mdp.initial_dist = Eigen::VectorXd::Constant(n_states, 1.0 / n_states);
    mdp.allowed_actions.assign(n_states, std::vector<bool>(n_actions, false));
    mdp.transitions.assign(n_actions, Eigen::MatrixXd::Zero(n_states, n_states));

    auto state_of = [cols](int r, int c) { return r * cols + c; };

    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int s = state_of(r, c);
            std::vector<int> targets;  // destination per allowed action, in action order
            std::vector<int> acts;
            for (int a = 0; a < n_actions; ++a) {
                const int nr = r + kDRow[a];
                const int nc = c + kDCol[a];
                if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
                mdp.allowed_actions[s][a] = true;
                acts.push_back(a);
                targets.push_back(state_of(nr, nc));
            }
            // Executed action is replaced with probability action_noise by a
            // uniformly random allowed action (possibly the same one).
            for (std::size_t i = 0; i < acts.size(); ++i) {
                auto& t = mdp.transitions[acts[i]];
                t(s, targets[i]) += 1.0 - action_noise;
                for (int dest : targets) t(s, dest) += action_noise / acts.size();
            }
            // Disallowed actions keep a valid (never used) self-loop row.
            for (int a = 0; a < n_actions; ++a)
                if (!mdp.allowed_actions[s][a]) mdp.transitions[a](s, s) = 1.0;
        }
    }
    validate_mdp(mdp);
    return mdp;
}

}  // namespace

void validate_gridworld_spec(const GridworldSpec& spec) {
    if (spec.grid_size < 1) throw std::invalid_argument("gridworld: grid_size must be positive");
    if (spec.macrocell_size < 1)
        throw std::invalid_argument("gridworld: macrocell_size must be positive");
    if (spec.grid_size % spec.macrocell_size != 0)
        throw std::invalid_argument("gridworld: macrocell_size must divide grid_size");
    if (spec.action_noise < 0.0 || spec.action_noise > 1.0)
        throw std::invalid_argument("gridworld: action_noise must lie in [0,1]");
    if (spec.gamma <= 0.0 || spec.gamma >= 1.0)
        throw std::invalid_argument("gridworld: gamma must lie in (0,1)");
    if (spec.reward_weights) {
        if (spec.reward_weights->size() != spec.n_features())
            throw std::invalid_argument("gridworld: reward_weights must have (N/n)^2 entries");
        if (std::abs(spec.reward_weights->norm() - 1.0) > 1e-9)
            throw std::invalid_argument("gridworld: reward_weights must have unit norm");
    }
}

int macrocell_of_state(const GridworldSpec& spec, int state) {
    const int row = state / spec.grid_size;
    const int col = state % spec.grid_size;
    return (row / spec.macrocell_size) * spec.n_macro() + col / spec.macrocell_size;
}

Mdp build_gridworld(const GridworldSpec& spec) {
    validate_gridworld_spec(spec);
    const int n = spec.grid_size;
    const int k = spec.n_features();
    Eigen::MatrixXd features = Eigen::MatrixXd::Zero(n * n, k);
    for (int s = 0; s < n * n; ++s) features(s, macrocell_of_state(spec, s)) = 1.0;
    return build_rectangle(n, n, 4, spec.gamma, spec.action_noise, features);
}

Mdp build_chain(int n_cells, double gamma, double action_noise) {
    if (n_cells < 1) throw std::invalid_argument("chain: n_cells must be positive");
    if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("chain: gamma must lie in (0,1)");
    // One row of cells, per-cell one-hot features, actions {left, right}.
    return build_rectangle(1, n_cells, 2, gamma, action_noise,
                           Eigen::MatrixXd::Identity(n_cells, n_cells));
}

Eigen::VectorXd chain_reward_weights() {
    Eigen::VectorXd w(5);
    w << -1.0, -0.5, 0.0, 0.5, 1.0;
    return w / w.norm();
}

}  // namespace teachrisk

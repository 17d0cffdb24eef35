#pragma once

#include <optional>

#include "teachrisk/mdp.hpp"

namespace teachrisk {

/// N x N gridworld whose cells are grouped into n x n macrocells, one one-hot
/// feature per macrocell (k = (N/n)^2). Moves that would leave the grid are
/// disallowed rather than self-looping.
struct GridworldSpec {
    int grid_size = 10;       // N
    int macrocell_size = 2;   // n, must divide N
    double action_noise = 0.0;  // chance the executed action is a uniformly random allowed one
    double gamma = 0.9;
    std::optional<Eigen::VectorXd> reward_weights;  // unit vector in R^k if present

    int n_macro() const { return grid_size / macrocell_size; }
    int n_features() const { return n_macro() * n_macro(); }
};

void validate_gridworld_spec(const GridworldSpec& spec);

/// Grid actions, in index order.
enum GridAction : int { kLeft = 0, kRight = 1, kUp = 2, kDown = 3 };

/// Builds the N^2-state gridworld MDP: uniform initial distribution, one-hot
/// macrocell features, actions {left, right, up, down} masked at the walls.
Mdp build_gridworld(const GridworldSpec& spec);

/// 1 x n_cells chain with actions {left, right}: the smallest interesting
/// worldview-mismatch environment. One-hot per-cell features, uniform initial
/// distribution, end-of-chain moves disallowed.
Mdp build_chain(int n_cells, double gamma, double action_noise = 0.0);

/// Reward direction used with the 5-cell chain: normalized (-1,-0.5,0,0.5,1).
Eigen::VectorXd chain_reward_weights();

/// Macrocell index of state s under the given spec (row-major over macrocells).
int macrocell_of_state(const GridworldSpec& spec, int state);

}  // namespace teachrisk

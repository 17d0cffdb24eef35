#pragma once

#include "teachrisk/scenario.hpp"

namespace teachrisk {

struct CommandResult {
    std::vector<std::string> files_written;
    int violations = 0;  // verify-bounds only
    std::string summary;
};

/// One row per (gamma, ell, trial): sample a Gaussian worldview and a random
/// reward direction, train the learner once against the optimal policy's view
/// expectations, and record teaching risk vs relative performance.
CommandResult cmd_sweep_risk(const ExperimentConfig& cfg);

/// Runs every configured strategy from identical per-trial initial state
/// (same gridworld, reward direction, pool, and worldview draws) and emits
/// per-round and aggregate CSVs.
CommandResult cmd_compare(const ExperimentConfig& cfg);

/// Repeats the obstacle-scenario teaching session across trials and counts
/// which feature was taught first and second.
CommandResult cmd_histogram(const ExperimentConfig& cfg);

/// Random-instance property suite: performance-gap and view-suboptimality
/// bounds, the kernel-alignment estimate with its equality case, witness
/// checks, and pseudoinverse identities. Nonzero violations mean an
/// implementation bug, surfaced via exit code 2.
CommandResult cmd_verify_bounds(const ExperimentConfig& cfg);

/// Single seeded teaching session; prints the round table and writes the
/// session CSV.
CommandResult cmd_teach(const ExperimentConfig& cfg);

}  // namespace teachrisk

#include "teachrisk/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <thread>

#include "teachrisk/csv.hpp"

namespace teachrisk {

namespace {

/// Runs fn(trial) for trial in [0, n) on a bounded pool; fn must write its
/// result into pre-sized per-trial storage so output order is deterministic.
void run_parallel(int n, int threads, const std::function<void(int)>& fn) {
    int workers = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / xs.size();
}

double stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / (xs.size() - 1));
}

struct SessionRows {
    std::vector<RoundRecord> rounds;
    bool stopped_early = false;
    bool pool_exhausted = false;
};

}  // namespace

CommandResult cmd_sweep_risk(const ExperimentConfig& cfg) {
    std::vector<double> gammas = cfg.gammas;
    if (gammas.empty()) gammas = {cfg.grid.gamma};

    struct Row {
        double gamma;
        int ell;
        int trial;
        double risk;
        double rel_perf;
        double view_distance;
        bool converged;
        bool valid = false;
    };

    struct Job {
        double gamma;
        int ell;
        int trial;
    };
    std::vector<Job> jobs;
    for (double gamma : gammas) {
        // One scenario per gamma; k fixed by the grid spec.
        GridworldSpec probe = cfg.grid;
        const int k = probe.n_features();
        const int ell_max = cfg.ell_max > 0 ? cfg.ell_max : k;
        for (int ell = cfg.ell_min; ell <= ell_max; ++ell)
            for (int t = 0; t < cfg.trials; ++t) jobs.push_back({gamma, ell, t});
    }

    std::vector<Row> rows(jobs.size());
    run_parallel(static_cast<int>(jobs.size()), cfg.threads, [&](int i) {
        const Job& job = jobs[i];
        Rng scenario_rng(seeding::derive(
            cfg.seed, {seeding::tag("sweep-scenario"), static_cast<std::uint64_t>(job.ell),
                       static_cast<std::uint64_t>(job.trial),
                       std::bit_cast<std::uint64_t>(job.gamma)}));
        const ScenarioInstance inst = build_scenario(cfg, job.gamma, scenario_rng);
        const int k = inst.mdp.n_features();

        Rng draw_rng(seeding::derive(
            cfg.seed, {seeding::tag("sweep-draw"), static_cast<std::uint64_t>(job.ell),
                       static_cast<std::uint64_t>(job.trial),
                       std::bit_cast<std::uint64_t>(job.gamma)}));
        const Worldview a(draw_rng.normal_matrix(job.ell, k));
        const RewardWeights w = RewardWeights(draw_rng.unit_vector(k));

        const Policy pi_t = optimal_policy(inst.mdp, inst.mdp.features * w.w_star);
        const Eigen::VectorXd mu_t = feature_expectations_exact(inst.mdp, pi_t).mu;
        const LearnerResult res = project_learner(inst.mdp, a, a.matrix() * mu_t,
                                                  cfg.learner_config(job.gamma));
        const double perf =
            w.w_star.dot(feature_expectations_mixed(inst.mdp, res.mixed_policy).mu);
        const auto rel = PerformanceScale::compute(inst.mdp, w.w_star).relative(perf);
        if (!rel) return;  // reward-degenerate draw, skipped

        rows[i] = {job.gamma,           job.ell,       job.trial, teaching_risk(a, w),
                   *rel,                res.final_view_distance,
                   res.converged,       true};
    });

    CsvWriter csv({"gamma", "ell", "trial", "teaching_risk", "rel_performance",
                   "view_distance", "converged"});
    for (const auto& r : rows) {
        if (!r.valid) continue;
        csv.add(r.gamma).add(r.ell).add(r.trial).add(r.risk).add(r.rel_perf)
            .add(r.view_distance).add(r.converged);
        csv.end_row();
    }
    const std::string path = cfg.resolve_out("sweep-risk");
    csv.write_file(path);

    CommandResult result;
    result.files_written = {path};
    result.summary = "sweep-risk: " + std::to_string(csv.rows()) + " rows -> " + path;
    return result;
}

CommandResult cmd_compare(const ExperimentConfig& cfg) {
    const double gamma = cfg.gammas.empty() ? cfg.grid.gamma : cfg.gammas.front();
    std::vector<std::vector<SessionRows>> per_trial(cfg.trials);

    run_parallel(cfg.trials, cfg.threads, [&](int trial) {
        // All strategies share the exact same per-trial draws.
        Rng scenario_rng(seeding::derive(
            cfg.seed, {seeding::tag("compare-scenario"), static_cast<std::uint64_t>(trial)}));
        const ScenarioInstance inst = build_scenario(cfg, gamma, scenario_rng);
        const int k = inst.mdp.n_features();

        Rng draw_rng(seeding::derive(
            cfg.seed, {seeding::tag("compare-draw"), static_cast<std::uint64_t>(trial)}));
        const Worldview a0 = cfg.worldview.realize(k, draw_rng);
        const FeaturePool pool = cfg.pool.realize(k, draw_rng);
        const Policy pi_t = optimal_policy(inst.mdp, inst.mdp.features * inst.w.w_star);
        const std::uint64_t session_seed = seeding::derive(
            cfg.seed, {seeding::tag("compare-session"), static_cast<std::uint64_t>(trial)});

        auto& out = per_trial[trial];
        out.resize(cfg.strategies.size());
        for (std::size_t si = 0; si < cfg.strategies.size(); ++si) {
            const TeachingSession session = run_teaching_session(
                inst.mdp, inst.w, a0, pool, cfg.budget, cfg.epsilon, cfg.strategies[si],
                cfg.learner_config(gamma), pi_t, session_seed);
            out[si] = {session.rounds, session.stopped_early, session.pool_exhausted};
        }
    });

    CsvWriter csv({"trial", "strategy", "round", "feature_index", "teaching_risk",
                   "view_distance", "true_perf", "rel_perf", "elapsed_ms"});
    // round -> strategy -> values, for the aggregate file
    std::map<std::pair<std::string, int>, std::vector<double>> perf_agg, risk_agg, ms_agg;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        for (std::size_t si = 0; si < cfg.strategies.size(); ++si) {
            const std::string name = strategy_name(cfg.strategies[si]);
            for (const RoundRecord& rec : per_trial[trial][si].rounds) {
                const double ms = cfg.timing ? rec.elapsed_ms : 0.0;
                csv.add(trial).add(name).add(rec.round).add(rec.feature_index)
                    .add(rec.teaching_risk).add(rec.view_distance).add(rec.true_perf)
                    .add(rec.rel_perf).add(ms);
                csv.end_row();
                perf_agg[{name, rec.round}].push_back(rec.rel_perf);
                risk_agg[{name, rec.round}].push_back(rec.teaching_risk);
                ms_agg[{name, rec.round}].push_back(ms);
            }
        }
    }
    const std::string path = cfg.resolve_out("compare");
    csv.write_file(path);

    CsvWriter summary({"strategy", "round", "n", "mean_rel_perf", "std_rel_perf",
                       "mean_teaching_risk", "mean_elapsed_ms"});
    for (const auto& [key, perfs] : perf_agg) {
        summary.add(key.first).add(key.second).add(static_cast<int>(perfs.size()))
            .add(mean(perfs)).add(stddev(perfs)).add(mean(risk_agg[key]))
            .add(mean(ms_agg[key]));
        summary.end_row();
    }
    std::string summary_path = path;
    const auto dot = summary_path.rfind(".csv");
    if (dot != std::string::npos) summary_path.insert(dot, "_summary");
    else summary_path += "_summary";
    summary.write_file(summary_path);

    CommandResult result;
    result.files_written = {path, summary_path};
    result.summary = "compare: " + std::to_string(csv.rows()) + " round rows -> " + path;
    return result;
}

CommandResult cmd_histogram(const ExperimentConfig& cfg) {
    ExperimentConfig scenario_cfg = cfg;
    if (scenario_cfg.scenario == "random-grid") scenario_cfg.scenario = "fig4-obstacles";
    const double gamma = cfg.gammas.empty() ? cfg.grid.gamma : cfg.gammas.front();

    struct Picks {
        int first = -1;
        int second = -1;
    };
    std::vector<Picks> picks(cfg.trials);

    run_parallel(cfg.trials, cfg.threads, [&](int trial) {
        Rng scenario_rng(seeding::derive(
            cfg.seed, {seeding::tag("hist-scenario"), static_cast<std::uint64_t>(trial)}));
        const ScenarioInstance inst = build_scenario(scenario_cfg, gamma, scenario_rng);
        const int k = inst.mdp.n_features();

        Rng draw_rng(seeding::derive(
            cfg.seed, {seeding::tag("hist-draw"), static_cast<std::uint64_t>(trial)}));
        const Worldview a0 = cfg.worldview.realize(k, draw_rng);
        const FeaturePool pool = cfg.pool.realize(k, draw_rng);
        const Policy pi_t = optimal_policy(inst.mdp, inst.mdp.features * inst.w.w_star);

        const TeachingSession session = run_teaching_session(
            inst.mdp, inst.w, a0, pool, std::max(2, cfg.budget), /*eps=*/0.0,
            Strategy::kTrGreedy, cfg.learner_config(gamma), pi_t,
            seeding::derive(cfg.seed,
                            {seeding::tag("hist-session"), static_cast<std::uint64_t>(trial)}));
        if (session.rounds.size() > 1) picks[trial].first = session.rounds[1].feature_index;
        if (session.rounds.size() > 2) picks[trial].second = session.rounds[2].feature_index;
    });

    int k_max = 0;
    for (const auto& p : picks) k_max = std::max({k_max, p.first + 1, p.second + 1});
    std::vector<int> first_counts(k_max, 0), second_counts(k_max, 0);
    for (const auto& p : picks) {
        if (p.first >= 0) ++first_counts[p.first];
        if (p.second >= 0) ++second_counts[p.second];
    }

    CsvWriter csv({"feature_index", "first_count", "second_count"});
    for (int i = 0; i < k_max; ++i) {
        csv.add(i).add(first_counts[i]).add(second_counts[i]);
        csv.end_row();
    }
    const std::string path = cfg.resolve_out("histogram");
    csv.write_file(path);

    CommandResult result;
    result.files_written = {path};
    result.summary = "histogram: " + std::to_string(cfg.trials) + " sessions -> " + path;
    return result;
}

CommandResult cmd_teach(const ExperimentConfig& cfg) {
    const double gamma = cfg.gammas.empty() ? cfg.grid.gamma : cfg.gammas.front();
    Rng scenario_rng(seeding::derive(cfg.seed, {seeding::tag("teach-scenario")}));
    const ScenarioInstance inst = build_scenario(cfg, gamma, scenario_rng);
    const int k = inst.mdp.n_features();

    Rng draw_rng(seeding::derive(cfg.seed, {seeding::tag("teach-draw")}));
    const Worldview a0 = cfg.worldview.realize(k, draw_rng);
    const FeaturePool pool = cfg.pool.realize(k, draw_rng);
    const Policy pi_t = optimal_policy(inst.mdp, inst.mdp.features * inst.w.w_star);
    const Strategy strategy = cfg.strategies.empty() ? Strategy::kTrGreedy
                                                     : cfg.strategies.front();

    const TeachingSession session = run_teaching_session(
        inst.mdp, inst.w, a0, pool, cfg.budget, cfg.epsilon, strategy,
        cfg.learner_config(gamma), pi_t,
        seeding::derive(cfg.seed, {seeding::tag("teach-session")}));

    CsvWriter csv({"round", "strategy", "feature_index", "teaching_risk", "view_distance",
                   "true_perf", "rel_perf", "elapsed_ms"});
    std::ostringstream table;
    table << "round  feature  risk        rel_perf    view_dist\n";
    for (const RoundRecord& rec : session.rounds) {
        csv.add(rec.round).add(strategy_name(strategy)).add(rec.feature_index)
            .add(rec.teaching_risk).add(rec.view_distance).add(rec.true_perf)
            .add(rec.rel_perf).add(cfg.timing ? rec.elapsed_ms : 0.0);
        csv.end_row();
        char line[128];
        std::snprintf(line, sizeof(line), "%-6d %-8d %-11.4g %-11.4g %-11.4g\n", rec.round,
                      rec.feature_index, rec.teaching_risk, rec.rel_perf, rec.view_distance);
        table << line;
    }
    const std::string path = cfg.resolve_out("teach");
    csv.write_file(path);

    table << "taught " << session.n_taught() << "/" << session.budget << " features";
    if (session.stopped_early) table << "; gap within threshold";
    if (session.pool_exhausted) table << "; pool exhausted";
    table << "\nsession CSV -> " << path;

    CommandResult result;
    result.files_written = {path};
    result.summary = table.str();
    return result;
}

CommandResult cmd_verify_bounds(const ExperimentConfig& cfg) {
    const double gamma = cfg.gammas.empty() ? cfg.grid.gamma : cfg.gammas.front();

    struct Check {
        std::string name;
        long instances = 0;
        long violations = 0;
        double worst_slack = std::numeric_limits<double>::infinity();
        void record(double slack, double tol) {
            ++instances;
            worst_slack = std::min(worst_slack, slack);
            if (slack < -tol) ++violations;
        }
    };
    Check perf_gap{"performance-gap-bound"};
    Check view_subopt{"view-suboptimality-bound"};
    Check view_subopt_inf{"view-suboptimality-infinite-guard"};
    Check basic{"kernel-alignment-estimate"};
    Check basic_eq{"kernel-alignment-equality"};
    Check witness{"optimality-witness"};
    Check penrose{"pseudoinverse-identities"};
    std::mutex agg_mutex;

    run_parallel(cfg.trials, cfg.threads, [&](int trial) {
        Rng rng(seeding::derive(cfg.seed,
                                {seeding::tag("verify"), static_cast<std::uint64_t>(trial)}));
        ExperimentConfig scen = cfg;
        const ScenarioInstance inst = build_scenario(scen, gamma, rng);
        const Mdp& mdp = inst.mdp;
        const int k = mdp.n_features();

        const int ell =
            cfg.worldview.kind == WorldviewSpec::Kind::kGaussian
                ? 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(k)))
                : k;
        Worldview a = cfg.worldview.kind == WorldviewSpec::Kind::kIdentity
                          ? Worldview::identity(k)
                          : Worldview(rng.normal_matrix(ell, k));
        const RewardWeights w(rng.unit_vector(k));

        const double rho = teaching_risk(a, w);
        const double diam_upper = mdp.mu_diameter_upper();
        const double a_norm = spectral_norm(a);

        const Policy pi_t = optimal_policy(mdp, mdp.features * w.w_star);
        const Eigen::VectorXd mu_t = feature_expectations_exact(mdp, pi_t).mu;

        const LearnerResult res =
            project_learner(mdp, a, a.matrix() * mu_t, cfg.learner_config(gamma));
        const Eigen::VectorXd mu_l = feature_expectations_mixed(mdp, res.mixed_policy).mu;

        double gap_slack = 0.0;
        bool have_gap = false;
        if (const auto sigma = sigma_min_nonzero(a)) {
            const double eps_achieved = (a.matrix() * (mu_t - mu_l)).norm();
            const double bound = theorem1_bound(eps_achieved, *sigma, rho, diam_upper);
            gap_slack = bound - std::abs(w.w_star.dot(mu_t - mu_l));
            have_gap = true;
        }

        // View-space suboptimality of the truly optimal policy.
        double subopt_slack = 0.0;
        int subopt_case = 0;  // 1 = finite bound checked, 2 = infinite guard
        if (rho < 1.0 - 1e-6) {
            const auto w_l = learner_reward_vector(a, w);
            if (w_l) {
                const Eigen::VectorXd dir = a.matrix().transpose() * *w_l;
                const Policy best_view = optimal_policy(mdp, mdp.features * dir);
                const double lhs =
                    dir.dot(feature_expectations_exact(mdp, best_view).mu - mu_t);
                subopt_slack = theorem2_bound(diam_upper, a_norm, rho) - lhs;
                subopt_case = 1;
            }
        } else {
            subopt_case = std::isinf(theorem2_bound(diam_upper, a_norm, rho)) ? 2 : -1;
        }

        // Kernel-alignment estimate with a random kernel vector, plus its
        // equality case at the maximizing direction.
        const Eigen::VectorXd delta = kernel_projection(a, rng.normal_vector(k));
        const double align_slack = rho * delta.norm() + 1e-9 - std::abs(w.w_star.dot(delta));
        double eq_err = 0.0;
        bool have_eq = false;
        const Eigen::VectorXd pr_w = kernel_projection(a, w.w_star);
        if (pr_w.norm() > 1e-9) {
            const Eigen::VectorXd delta_star = pr_w * (1.0 + rng.uniform());
            eq_err = std::abs(std::abs(w.w_star.dot(delta_star)) - rho * delta_star.norm());
            have_eq = true;
        }

        // Pseudoinverse identities.
        const Eigen::MatrixXd pinv = pseudoinverse(a);
        const Eigen::MatrixXd& m = a.matrix();
        double penrose_err = std::max(
            {(m * pinv * m - m).norm(), (pinv * m * pinv - pinv).norm(),
             ((m * pinv).transpose() - m * pinv).norm(),
             ((pinv * m).transpose() - pinv * m).norm()});
        const SvdFactors f = SvdFactors::compute(m);
        const Eigen::MatrixXd pr_perp =
            f.row_space_basis() * f.row_space_basis().transpose();
        penrose_err = std::max(penrose_err, (pinv * m - pr_perp).norm());

        std::lock_guard lock(agg_mutex);
        if (have_gap) perf_gap.record(gap_slack, 1e-6);
        if (subopt_case == 1) view_subopt.record(subopt_slack, 1e-6);
        if (subopt_case == 2) view_subopt_inf.record(0.0, 1e-6);
        basic.record(align_slack, 0.0);
        if (have_eq) basic_eq.record(1e-9 - eq_err, 0.0);
        penrose.record(1e-8 - penrose_err, 0.0);
    });

    // Witness checks on small instances where policies can be enumerated.
    {
        Rng rng(seeding::derive(cfg.seed, {seeding::tag("verify-witness")}));
        const Mdp chain = build_chain(5, gamma);
        const RewardWeights w(chain_reward_weights());
        const Policy pi_star = optimal_policy(chain, chain.features * w.w_star);
        for (int i = 0; i < std::min(cfg.trials, 20); ++i) {
            const Worldview a(rng.normal_matrix(1 + static_cast<int>(rng.uniform_index(3)), 5));
            if (teaching_risk(a, w) <= 0.05) continue;
            const WitnessReport rep = suboptimality_witness(
                chain, a, pi_star, cfg.n_directions,
                seeding::derive(cfg.seed, {seeding::tag("verify-witness"),
                                           static_cast<std::uint64_t>(i)}));
            witness.record(rep.frac_matched - 0.95, 0.0);
        }
    }

    CsvWriter csv({"check", "instances", "violations", "worst_slack"});
    int violations = 0;
    std::ostringstream report;
    for (const Check* c :
         {&perf_gap, &view_subopt, &view_subopt_inf, &basic, &basic_eq, &witness, &penrose}) {
        const double slack = c->instances ? c->worst_slack : 0.0;
        csv.add(c->name).add(c->instances).add(c->violations).add(slack);
        csv.end_row();
        violations += static_cast<int>(c->violations);
        report << c->name << ": " << c->instances << " instances, " << c->violations
               << " violations, worst slack " << csv_double(slack) << "\n";
    }
    const std::string path = cfg.resolve_out("verify-bounds");
    csv.write_file(path);
    report << (violations == 0 ? "all bounds hold" : "BOUND VIOLATIONS FOUND");
    report << " -> " << path;

    CommandResult result;
    result.files_written = {path};
    result.violations = violations;
    result.summary = report.str();
    return result;
}

}  // namespace teachrisk

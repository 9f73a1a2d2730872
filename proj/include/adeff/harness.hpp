#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "adeff/environments.hpp"
#include "adeff/learner.hpp"

namespace adeff {

enum class AlgorithmKind { advice_efficient, full_info_baseline };

struct EnvironmentSpec {
    std::string kind;                        // matrix | bernoulli | drifting | bandit
    std::vector<double> means;               // bernoulli / drifting / bandit
    std::size_t drift_period = 1;            // drifting
    std::vector<std::vector<double>> matrix; // matrix / bandit with explicit losses

    std::unique_ptr<LossOracle> build(std::uint64_t env_seed) const {
        if (kind == "matrix")
            return std::make_unique<MatrixEnvironment>(matrix);
        if (kind == "bernoulli")
            return std::make_unique<BernoulliEnvironment>(means, env_seed);
        if (kind == "drifting")
            return std::make_unique<DriftingEnvironment>(means, drift_period, env_seed);
        if (kind == "bandit") {
            if (!matrix.empty())
                return std::make_unique<BanditMatrixAdapter>(matrix);
            return std::make_unique<BanditAdapter>(means, env_seed);
        }
        throw invalid_input("unknown environment kind: " + kind);
    }
};

struct ExperimentConfig {
    std::size_t n_experts = 1;
    std::size_t budget = 1; // M
    std::size_t horizon = 1; // T
    std::size_t repetitions = 50;
    std::uint64_t base_seed = 0;
    AlgorithmKind algorithm = AlgorithmKind::advice_efficient;
    EnvironmentSpec environment;

    void validate() const {
        if (n_experts < 1 || budget < 1 || budget > n_experts)
            throw invalid_input("ExperimentConfig: need 1 <= M <= N");
        if (horizon < 1)
            throw invalid_input("ExperimentConfig: need T >= 1");
        if (repetitions < 1)
            throw invalid_input("ExperimentConfig: need R >= 1");
    }
};

// Theorem bound b(t) = 2 sqrt((N/M) t ln N).
inline double regret_bound(std::size_t n, std::size_t m, std::size_t t) {
    return 2.0 * std::sqrt(static_cast<double>(n) / static_cast<double>(m) *
                           static_cast<double>(t) * std::log(static_cast<double>(n)));
}

struct RunResult {
    std::vector<RoundTrace> traces;
    std::vector<double> regret;              // regret(t) per round, from true losses
    std::vector<double> cumulative_loss;     // algorithm's cumulative true loss
    std::size_t best_expert = 0;             // in hindsight at the horizon
    double best_expert_loss = 0.0;
    std::size_t ledger_max_per_round = 0;
    std::size_t ledger_total = 0;
};

struct ExperimentResult {
    std::vector<double> mean_cumulative_loss;
    std::vector<double> mean_regret, std_regret, min_regret, max_regret;
    std::vector<double> bound;               // b(t), deterministic in (N, M)
    std::vector<std::size_t> best_experts;   // one per repetition
    std::size_t ledger_max_per_round = 0;
    std::size_t ledger_total = 0;
};

// Environment and algorithm randomness use separate derived streams, so an
// M-sweep at the same seed replays identical loss realizations.
inline std::uint64_t environment_seed(std::uint64_t seed) { return derive_seed(seed, 1); }
inline std::uint64_t algorithm_seed(std::uint64_t seed) { return derive_seed(seed, 2); }

inline RunResult run_once(const ExperimentConfig& config, std::uint64_t seed,
                          bool keep_traces = true) {
    config.validate();
    auto oracle = config.environment.build(environment_seed(seed));
    if (oracle->num_experts() != config.n_experts)
        throw invalid_input("run_once: environment expert count does not match N");

    const std::size_t n = config.n_experts;
    const std::size_t m = config.budget;
    const std::size_t t_max = config.horizon;
    Rng rng(algorithm_seed(seed));

    RunResult result;
    result.traces.reserve(t_max);
    result.regret.reserve(t_max);
    result.cumulative_loss.reserve(t_max);

    std::vector<double> true_cumulative(n, 0.0);
    double algo_cumulative = 0.0;

    if (config.algorithm == AlgorithmKind::advice_efficient) {
        Learner learner({n, m});
        for (std::size_t i = 0; i < t_max; ++i) {
            const SampleSet sample = learner.begin_round(rng);
            std::map<std::size_t, double> losses;
            for (std::size_t h : sample.observed)
                losses[h] = oracle->query(i, h);
            RoundTrace trace = learner.feed_losses(losses);
            algo_cumulative += trace.algorithm_loss;
            if (keep_traces)
                result.traces.push_back(std::move(trace));

            // regret uses true losses for every expert, harness-side only
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t h = 0; h < n; ++h) {
                true_cumulative[h] += oracle->peek(i, h);
                best = std::min(best, true_cumulative[h]);
            }
            result.cumulative_loss.push_back(algo_cumulative);
            result.regret.push_back(algo_cumulative - best);
        }
        oracle->ledger().enforce_budget(std::min(m, n));
        if (oracle->ledger().max_distinct_per_round() != std::min(m, n) ||
            oracle->ledger().rounds() != t_max)
            throw invariant_violation("run_once: learner did not use its full advice budget");
    } else {
        FullInfoHedge hedge(n);
        for (std::size_t i = 0; i < t_max; ++i) {
            const SamplingDistribution q = hedge.current_distribution();
            const SampleSet sample = sample_experts(q, 1, rng);

            RoundTrace trace;
            trace.round = i + 1;
            trace.distribution = q;
            trace.sample = sample;

            std::vector<double> losses(n);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t h = 0; h < n; ++h) {
                losses[h] = oracle->query(i, h);
                trace.observed_losses[h] = losses[h];
                true_cumulative[h] += losses[h];
                best = std::min(best, true_cumulative[h]);
            }
            trace.algorithm_loss = losses[sample.primary];
            trace.estimates_delta = losses;
            hedge.feed_losses(losses);

            algo_cumulative += trace.algorithm_loss;
            result.cumulative_loss.push_back(algo_cumulative);
            result.regret.push_back(algo_cumulative - best);
            if (keep_traces)
                result.traces.push_back(std::move(trace));
        }
    }

    result.best_expert = 0;
    for (std::size_t h = 1; h < n; ++h)
        if (true_cumulative[h] < true_cumulative[result.best_expert])
            result.best_expert = h;
    result.best_expert_loss = true_cumulative[result.best_expert];
    result.ledger_max_per_round = oracle->ledger().max_distinct_per_round();
    result.ledger_total = oracle->ledger().total_queries();
    return result;
}

// Repetition r uses seed base_seed + r; aggregation runs in repetition-index
// order regardless of which thread finished first.
inline ExperimentResult run_repeated(const ExperimentConfig& config,
                                     std::size_t threads = 1) {
    config.validate();
    const std::size_t reps = config.repetitions;
    const std::size_t t_max = config.horizon;

    std::vector<RunResult> runs(reps);
    if (threads <= 1 || reps == 1) {
        for (std::size_t r = 0; r < reps; ++r)
            runs[r] = run_once(config, config.base_seed + r, /*keep_traces=*/false);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::atomic<bool> failed{false};
        for (std::size_t w = 0; w < std::min(threads, reps); ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) {
                    try {
                        runs[r] = run_once(config, config.base_seed + r,
                                           /*keep_traces=*/false);
                    } catch (...) {
                        failed = true;
                        return;
                    }
                }
            });
        }
        for (auto& th : pool)
            th.join();
        if (failed)
            throw invariant_violation("run_repeated: a repetition failed");
    }

    ExperimentResult agg;
    agg.mean_cumulative_loss.assign(t_max, 0.0);
    agg.mean_regret.assign(t_max, 0.0);
    agg.std_regret.assign(t_max, 0.0);
    agg.min_regret.assign(t_max, std::numeric_limits<double>::infinity());
    agg.max_regret.assign(t_max, -std::numeric_limits<double>::infinity());
    agg.bound.resize(t_max);
    for (std::size_t t = 0; t < t_max; ++t)
        agg.bound[t] = regret_bound(config.n_experts, config.budget, t + 1);

    for (const RunResult& run : runs) {
        agg.best_experts.push_back(run.best_expert);
        agg.ledger_max_per_round = std::max(agg.ledger_max_per_round, run.ledger_max_per_round);
        agg.ledger_total += run.ledger_total;
        for (std::size_t t = 0; t < t_max; ++t) {
            agg.mean_cumulative_loss[t] += run.cumulative_loss[t];
            agg.mean_regret[t] += run.regret[t];
            agg.min_regret[t] = std::min(agg.min_regret[t], run.regret[t]);
            agg.max_regret[t] = std::max(agg.max_regret[t], run.regret[t]);
        }
    }
    for (std::size_t t = 0; t < t_max; ++t) {
        agg.mean_cumulative_loss[t] /= static_cast<double>(reps);
        agg.mean_regret[t] /= static_cast<double>(reps);
    }
    for (const RunResult& run : runs)
        for (std::size_t t = 0; t < t_max; ++t) {
            const double d = run.regret[t] - agg.mean_regret[t];
            agg.std_regret[t] += d * d;
        }
    for (std::size_t t = 0; t < t_max; ++t)
        agg.std_regret[t] = std::sqrt(agg.std_regret[t] / static_cast<double>(reps));
    return agg;
}

// One result per M, paired across M values via the shared base seed (the
// environment stream does not depend on M).
inline std::vector<ExperimentResult> sweep_budget(const ExperimentConfig& config,
                                                  const std::vector<std::size_t>& m_values,
                                                  std::size_t threads = 1) {
    std::vector<ExperimentResult> results;
    for (std::size_t m : m_values) {
        if (m < 1 || m > config.n_experts)
            throw invalid_input("sweep_budget: M out of range");
        ExperimentConfig c = config;
        c.budget = m;
        results.push_back(run_repeated(c, threads));
    }
    return results;
}

} // namespace adeff

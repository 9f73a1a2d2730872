#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "adeff/core.hpp"

namespace adeff {

struct LearnerConfig {
    std::size_t n_experts = 1;
    std::size_t budget = 1;                  // M, experts observed per round
    std::optional<double> eta_override = {}; // testing only

    void validate() const {
        if (n_experts < 1 || budget < 1 || budget > n_experts)
            throw invalid_input("LearnerConfig: need 1 <= M <= N");
        if (eta_override && !(*eta_override >= 0.0))
            throw invalid_input("LearnerConfig: eta_override must be >= 0");
    }
};

// Everything recorded about one completed round.
struct RoundTrace {
    std::size_t round = 0;
    SampleSet sample;
    SamplingDistribution distribution;       // q_i actually used this round
    std::map<std::size_t, double> observed_losses;
    double algorithm_loss = 0.0;             // loss of the played (primary) expert
    std::vector<double> estimates_delta;     // zero outside sample.observed
};

// Advice-efficient exponential-weights learner. Each round is driven through
// begin_round (sample which experts to query) then feed_losses (their losses).
// The interface only ever accepts losses for the observed set, so unobserved
// losses cannot leak in.
class Learner {
public:
    explicit Learner(LearnerConfig config) : config_(config), estimates_(config.n_experts) {
        config_.validate();
    }

    std::size_t round() const { return round_; }
    const LearnerConfig& config() const { return config_; }
    const CumulativeEstimates& estimates() const { return estimates_; }
    bool awaiting_losses() const { return awaiting_losses_; }

    // The distribution that will be (or was) used for the current round.
    SamplingDistribution current_distribution() const {
        return compute_distribution(estimates_, current_eta());
    }

    SampleSet begin_round(Rng& rng) {
        if (awaiting_losses_)
            throw protocol_violation("begin_round called twice without feed_losses");
        distribution_ = current_distribution();
        sample_ = sample_experts(distribution_, config_.budget, rng);
        awaiting_losses_ = true;
        return sample_;
    }

    RoundTrace feed_losses(const std::map<std::size_t, double>& losses) {
        if (!awaiting_losses_)
            throw protocol_violation("feed_losses called before begin_round");
        if (losses.size() != sample_.observed.size())
            throw protocol_violation("feed_losses: losses must cover exactly the observed set");
        for (const auto& [h, loss] : losses) {
            if (!sample_.contains(h))
                throw protocol_violation("feed_losses: loss for unobserved expert");
            check_loss_value(loss);
        }

        RoundTrace trace;
        trace.round = round_;
        trace.sample = sample_;
        trace.distribution = distribution_;
        trace.observed_losses = losses;
        trace.algorithm_loss = losses.at(sample_.primary);
        trace.estimates_delta.assign(config_.n_experts, 0.0);
        for (std::size_t h : sample_.observed) {
            const double p = inclusion_probability(distribution_, h, config_.budget);
            trace.estimates_delta[h] =
                importance_weighted_estimate(losses.at(h), p, true);
        }

        estimates_.add(trace.estimates_delta);
        ++round_;
        awaiting_losses_ = false;
        return trace;
    }

private:
    double current_eta() const {
        if (config_.eta_override)
            return *config_.eta_override;
        return learning_rate(round_, config_.n_experts, config_.budget);
    }

    LearnerConfig config_;
    CumulativeEstimates estimates_;
    std::size_t round_ = 1;
    bool awaiting_losses_ = false;
    SamplingDistribution distribution_;
    SampleSet sample_;
};

// Full-information Hedge with the same anytime eta schedule; the M=N
// specialization of the learner must match its distributions exactly.
class FullInfoHedge {
public:
    explicit FullInfoHedge(std::size_t n_experts, std::optional<double> eta_override = {})
        : n_(n_experts), eta_override_(eta_override), estimates_(n_experts) {
        if (n_ < 1)
            throw invalid_input("FullInfoHedge: need N >= 1");
    }

    std::size_t round() const { return round_; }

    SamplingDistribution current_distribution() const {
        const double eta =
            eta_override_ ? *eta_override_ : learning_rate(round_, n_, n_);
        return compute_distribution(estimates_, eta);
    }

    void feed_losses(const std::vector<double>& losses) {
        if (losses.size() != n_)
            throw invalid_input("FullInfoHedge: need one loss per expert");
        for (double loss : losses)
            check_loss_value(loss);
        estimates_.add(losses);
        ++round_;
    }

private:
    std::size_t n_;
    std::optional<double> eta_override_;
    CumulativeEstimates estimates_;
    std::size_t round_ = 1;
};

// Smallest index attaining the minimum column sum, plus that sum.
inline std::pair<std::size_t, double>
best_expert_in_hindsight(const std::vector<std::vector<double>>& true_losses) {
    if (true_losses.empty() || true_losses.front().empty())
        throw invalid_input("best_expert_in_hindsight: empty matrix");
    const std::size_t n = true_losses.front().size();
    std::vector<double> column_sums(n, 0.0);
    for (const auto& row : true_losses) {
        if (row.size() != n)
            throw invalid_input("best_expert_in_hindsight: ragged matrix");
        for (std::size_t h = 0; h < n; ++h) {
            check_loss_value(row[h]);
            column_sums[h] += row[h];
        }
    }
    std::size_t best = 0;
    for (std::size_t h = 1; h < n; ++h)
        if (column_sums[h] < column_sums[best])
            best = h;
    return {best, column_sums[best]};
}

} // namespace adeff

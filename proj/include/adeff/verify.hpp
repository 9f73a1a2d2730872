#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "adeff/core.hpp"

namespace adeff::verify {

// Exact quantities computed by summing over every (primary, subset) outcome
// of the two-stage sampling scheme: N * C(N-1, M-1) terms, each weighted by
// q(primary) / C(N-1, M-1). Independent of sample_experts.
struct EnumerationReport {
    std::vector<double> inclusion;       // exact P(h in observed)
    std::vector<double> estimator_mean;  // exact E[L^h]
    std::vector<double> second_moment;   // exact E[(L^h)^2]
    std::vector<double> variance;
    double weighted_second_moment = 0.0; // exact E[sum_h q(h) (L^h)^2]
    double max_inclusion_deviation = 0.0;   // vs inclusion_probability closed form
    double max_unbiasedness_deviation = 0.0; // vs the supplied true losses
};

namespace detail {

constexpr std::size_t kMaxEnumerable = 10;

// Advance pick to the next size-k combination of {0,...,range-1}; false when
// exhausted.
inline bool next_combination(std::vector<std::size_t>& pick, std::size_t range) {
    const std::size_t k = pick.size();
    for (std::size_t i = k; i-- > 0;) {
        if (pick[i] < range - (k - i)) {
            ++pick[i];
            for (std::size_t j = i + 1; j < k; ++j)
                pick[j] = pick[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Visit every (primary, observed subset) outcome with its probability.
template <typename Visitor>
void for_each_outcome(const SamplingDistribution& q, std::size_t m, Visitor&& visit) {
    const std::size_t n = q.size();
    if (n > kMaxEnumerable)
        throw infeasible_instance("enumeration limited to N <= 10");
    if (m < 1 || m > n)
        throw invalid_input("enumeration: need 1 <= M <= N");

    // subsets of size m-1 over the n-1 non-primary indices
    double subset_count = 1.0;
    for (std::size_t k = 1; k < m; ++k)
        subset_count *= static_cast<double>(n - k) / static_cast<double>(k);

    std::vector<std::size_t> observed(m);
    for (std::size_t primary = 0; primary < n; ++primary) {
        const double p_primary = q(primary);
        std::vector<std::size_t> rest;
        for (std::size_t h = 0; h < n; ++h)
            if (h != primary)
                rest.push_back(h);

        std::vector<std::size_t> pick(m - 1);
        for (std::size_t k = 0; k + 1 < m; ++k)
            pick[k] = k;
        const double p_outcome = p_primary / subset_count;
        do {
            observed.clear();
            observed.push_back(primary);
            for (std::size_t idx : pick)
                observed.push_back(rest[idx]);
            visit(primary, observed, p_outcome);
        } while (!pick.empty() && next_combination(pick, rest.size()));
    }
}

} // namespace detail

// Exact P(h in observed) for every expert, compared against the closed form.
inline EnumerationReport enumerate_inclusion(const SamplingDistribution& q, std::size_t m) {
    q.validate();
    const std::size_t n = q.size();
    EnumerationReport report;
    report.inclusion.assign(n, 0.0);
    detail::for_each_outcome(q, m,
                             [&](std::size_t, const std::vector<std::size_t>& observed,
                                 double p) {
                                 for (std::size_t h : observed)
                                     report.inclusion[h] += p;
                             });
    for (std::size_t h = 0; h < n; ++h) {
        const double closed = inclusion_probability(q, h, m);
        report.max_inclusion_deviation =
            std::max(report.max_inclusion_deviation, std::abs(report.inclusion[h] - closed));
    }
    return report;
}

// Exact estimator moments over the sampling scheme for a fixed loss vector.
inline EnumerationReport enumerate_estimator_moments(const SamplingDistribution& q,
                                                     const std::vector<double>& losses,
                                                     std::size_t m) {
    q.validate();
    const std::size_t n = q.size();
    if (losses.size() != n)
        throw invalid_input("enumerate_estimator_moments: need one loss per expert");
    for (double loss : losses)
        check_loss_value(loss);

    EnumerationReport report = enumerate_inclusion(q, m);
    report.estimator_mean.assign(n, 0.0);
    report.second_moment.assign(n, 0.0);

    std::vector<double> weight(n);
    for (std::size_t h = 0; h < n; ++h)
        weight[h] = losses[h] / inclusion_probability(q, h, m);

    detail::for_each_outcome(q, m,
                             [&](std::size_t, const std::vector<std::size_t>& observed,
                                 double p) {
                                 for (std::size_t h : observed) {
                                     report.estimator_mean[h] += p * weight[h];
                                     report.second_moment[h] += p * weight[h] * weight[h];
                                 }
                             });

    report.variance.assign(n, 0.0);
    for (std::size_t h = 0; h < n; ++h) {
        report.variance[h] =
            report.second_moment[h] - report.estimator_mean[h] * report.estimator_mean[h];
        report.weighted_second_moment += q(h) * report.second_moment[h];
        report.max_unbiasedness_deviation = std::max(
            report.max_unbiasedness_deviation, std::abs(report.estimator_mean[h] - losses[h]));
    }
    return report;
}

// Left-hand side of the appendix inequality:
//   sum_h q(h)(N-1) / (q(h)(N-M) + M-1)  <=  N/M.
// Zero-mass experts contribute zero (their estimator is never formed).
inline double lemma2_value(const SamplingDistribution& q, std::size_t m) {
    q.validate();
    const std::size_t n = q.size();
    if (m < 1 || m > n)
        throw invalid_input("lemma2_value: need 1 <= M <= N");
    double sum = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        const double qh = q(h);
        if (qh == 0.0)
            continue;
        sum += qh * static_cast<double>(n - 1) /
               (qh * static_cast<double>(n - m) + static_cast<double>(m - 1));
    }
    return sum;
}

inline SamplingDistribution dirichlet_uniform(std::size_t n, Rng& rng) {
    std::exponential_distribution<double> expo(1.0);
    SamplingDistribution q;
    q.probs.resize(n);
    double sum = 0.0;
    for (double& p : q.probs) {
        p = expo(rng);
        sum += p;
    }
    for (double& p : q.probs)
        p /= sum;
    return q;
}

// Random-restart hill climbing over the simplex: coordinate perturbation with
// renormalization and geometric step decay. Checks the appendix claim that
// the maximum of the lemma's left-hand side is N/M, attained at uniform q.
inline std::pair<double, SamplingDistribution>
lemma2_max_search(std::size_t n, std::size_t m, std::size_t trials, Rng& rng) {
    if (trials < 1)
        throw invalid_input("lemma2_max_search: need trials >= 1");
    double best_value = -1.0;
    SamplingDistribution best_q;

    std::uniform_int_distribution<std::size_t> coord(0, n - 1);
    std::uniform_real_distribution<double> sign(-1.0, 1.0);

    const std::size_t restarts = std::max<std::size_t>(1, trials / 100);
    for (std::size_t r = 0; r < restarts; ++r) {
        SamplingDistribution q = dirichlet_uniform(n, rng);
        double value = lemma2_value(q, m);
        double step = 0.25;
        for (std::size_t it = 0; it < 100; ++it) {
            SamplingDistribution cand = q;
            const std::size_t h = coord(rng);
            cand.probs[h] = std::max(0.0, cand.probs[h] + step * sign(rng));
            double sum = 0.0;
            for (double p : cand.probs)
                sum += p;
            if (sum <= 0.0)
                continue;
            for (double& p : cand.probs)
                p /= sum;
            const double cand_value = lemma2_value(cand, m);
            if (cand_value > value) {
                q = std::move(cand);
                value = cand_value;
            } else {
                step *= 0.95;
            }
        }
        if (value > best_value) {
            best_value = value;
            best_q = q;
        }
    }
    return {best_value, best_q};
}

// One entry of the machine-readable verification report.
struct CheckResult {
    std::string name;
    double max_deviation = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// The full oracle suite: inclusion probabilities, unbiasedness, moment
// bounds, the appendix lemma, and sampler frequency agreement.
inline std::vector<CheckResult> run_suite(std::size_t max_n, Rng& rng) {
    if (max_n < 2 || max_n > detail::kMaxEnumerable)
        throw invalid_input("run_suite: need 2 <= max_N <= 10");
    std::vector<CheckResult> checks;
    auto push = [&](const std::string& name, double deviation, double threshold) {
        checks.push_back({name, deviation, threshold, deviation <= threshold});
    };

    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // enumerated inclusion probabilities vs closed form; sum over experts = M
    {
        double dev = 0.0, sum_dev = 0.0;
        for (std::size_t n = 2; n <= max_n; ++n)
            for (std::size_t m = 1; m <= n; ++m)
                for (int rep = 0; rep < 20; ++rep) {
                    const SamplingDistribution q = dirichlet_uniform(n, rng);
                    const EnumerationReport rpt = enumerate_inclusion(q, m);
                    dev = std::max(dev, rpt.max_inclusion_deviation);
                    double total = 0.0;
                    for (double p : rpt.inclusion)
                        total += p;
                    sum_dev = std::max(sum_dev, std::abs(total - static_cast<double>(m)));
                }
        push("inclusion_probability_exact", dev, 1e-12);
        push("inclusion_sums_to_M", sum_dev, 1e-12);
    }

    // unbiasedness, weighted second moment <= N/M, variance <= (N-1)/(M-1)
    {
        double bias_dev = 0.0, moment_excess = 0.0, var_excess = 0.0;
        for (std::size_t n = 2; n <= max_n; ++n)
            for (std::size_t m = 1; m <= n; ++m)
                for (int rep = 0; rep < 20; ++rep) {
                    const SamplingDistribution q = dirichlet_uniform(n, rng);
                    std::vector<double> losses(n);
                    for (double& loss : losses)
                        loss = unif(rng);
                    const EnumerationReport rpt = enumerate_estimator_moments(q, losses, m);
                    bias_dev = std::max(bias_dev, rpt.max_unbiasedness_deviation);
                    const double nm = static_cast<double>(n) / static_cast<double>(m);
                    moment_excess =
                        std::max(moment_excess, rpt.weighted_second_moment - nm);
                    if (m >= 2) {
                        const double var_bound = static_cast<double>(n - 1) /
                                                 static_cast<double>(m - 1);
                        for (double v : rpt.variance)
                            var_excess = std::max(var_excess, v - var_bound);
                    }
                }
        push("estimator_unbiasedness", bias_dev, 1e-12);
        push("weighted_second_moment_below_N_over_M", moment_excess, 1e-12);
        push("variance_below_bound", var_excess, 1e-12);
    }

    // appendix lemma: random simplex points, uniform attainment, hill climbing
    {
        double lhs_excess = 0.0, uniform_dev = 0.0, search_excess = 0.0;
        for (std::size_t n = 2; n <= 12; ++n)
            for (std::size_t m = 1; m <= n; ++m) {
                const double nm = static_cast<double>(n) / static_cast<double>(m);
                for (int rep = 0; rep < 1000; ++rep) {
                    const SamplingDistribution q = dirichlet_uniform(n, rng);
                    lhs_excess = std::max(lhs_excess, lemma2_value(q, m) - nm);
                }
                SamplingDistribution uniform;
                uniform.probs.assign(n, 1.0 / static_cast<double>(n));
                uniform_dev = std::max(uniform_dev, std::abs(lemma2_value(uniform, m) - nm));
                const auto [max_found, argmax] = lemma2_max_search(n, m, 1000, rng);
                search_excess = std::max(search_excess, max_found - nm);
            }
        push("lemma2_random_simplex", lhs_excess, 1e-9);
        push("lemma2_uniform_attains_N_over_M", uniform_dev, 1e-12);
        push("lemma2_max_search", search_excess, 1e-9);
    }

    // empirical sampler vs enumerated inclusion, 3 standard errors per expert
    {
        const std::size_t n = 5, m = 3, draws = 100000;
        SamplingDistribution q;
        q.probs = {0.4, 0.25, 0.15, 0.12, 0.08};
        const EnumerationReport rpt = enumerate_inclusion(q, m);
        std::vector<double> counts(n, 0.0);
        for (std::size_t d = 0; d < draws; ++d) {
            const SampleSet s = sample_experts(q, m, rng);
            for (std::size_t h : s.observed)
                counts[h] += 1.0;
        }
        double worst_sigmas = 0.0;
        for (std::size_t h = 0; h < n; ++h) {
            const double p = rpt.inclusion[h];
            const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(draws));
            const double freq = counts[h] / static_cast<double>(draws);
            if (se > 0.0)
                worst_sigmas = std::max(worst_sigmas, std::abs(freq - p) / se);
        }
        push("sampler_frequency_agreement_sigmas", worst_sigmas, 3.0);
    }

    return checks;
}

} // namespace adeff::verify

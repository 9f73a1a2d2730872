#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "adeff/errors.hpp"
#include "adeff/rng.hpp"

namespace adeff {

// Probability vector over the N experts (the exponential-weights distribution).
struct SamplingDistribution {
    std::vector<double> probs;

    std::size_t size() const { return probs.size(); }
    double operator()(std::size_t h) const { return probs[h]; }

    void validate(double tol = 1e-12) const {
        if (probs.empty())
            throw invalid_input("SamplingDistribution: empty");
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0))
                throw invalid_input("SamplingDistribution: negative or NaN entry");
            sum += p;
        }
        if (std::abs(sum - 1.0) > tol)
            throw invalid_input("SamplingDistribution: entries do not sum to 1");
    }
};

// Accumulated importance-weighted loss estimates, one total per expert.
struct CumulativeEstimates {
    std::vector<double> totals;
    std::size_t round_index = 0; // number of completed rounds folded in

    explicit CumulativeEstimates(std::size_t n = 0) : totals(n, 0.0) {}
    std::size_t size() const { return totals.size(); }

    void add(const std::vector<double>& delta) {
        for (std::size_t h = 0; h < totals.size(); ++h) {
            if (delta[h] < 0.0)
                throw invariant_violation("CumulativeEstimates: negative estimate delta");
            totals[h] += delta[h];
        }
        ++round_index;
    }
};

// The primary (played) expert plus the full observed set of min(M,N) experts.
struct SampleSet {
    std::size_t primary = 0;
    std::vector<std::size_t> observed; // sorted, distinct, contains primary

    bool contains(std::size_t h) const {
        return std::binary_search(observed.begin(), observed.end(), h);
    }
};

inline void check_loss_value(double loss) {
    if (!(loss >= 0.0 && loss <= 1.0))
        throw invalid_input("loss outside [0,1]");
}

// q(h) proportional to exp(-eta * totals(h)). The min total is subtracted
// before exponentiating, otherwise eta*L_hat underflows everything to zero
// on long runs.
inline SamplingDistribution compute_distribution(const CumulativeEstimates& estimates,
                                                 double eta) {
    const std::size_t n = estimates.size();
    if (n == 0)
        throw invalid_input("compute_distribution: empty estimates");
    if (!(eta >= 0.0))
        throw invalid_input("compute_distribution: eta must be >= 0");

    SamplingDistribution q;
    q.probs.resize(n);
    const double shift = *std::min_element(estimates.totals.begin(), estimates.totals.end());
    double sum = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        q.probs[h] = std::exp(-eta * (estimates.totals[h] - shift));
        sum += q.probs[h];
    }
    for (double& p : q.probs)
        p /= sum;
    return q;
}

// Anytime schedule eta_i = sqrt(M ln N / (i N)); non-increasing in the round.
inline double learning_rate(std::size_t round, std::size_t n, std::size_t m) {
    if (round < 1)
        throw invalid_input("learning_rate: round must be >= 1");
    if (n < 1 || m < 1 || m > n)
        throw invalid_input("learning_rate: need 1 <= M <= N");
    return std::sqrt(static_cast<double>(m) * std::log(static_cast<double>(n)) /
                     (static_cast<double>(round) * static_cast<double>(n)));
}

// P(h is among the M observed experts) = q(h) + (1-q(h)) (M-1)/(N-1).
// M=N is returned as exactly 1 so the full-information reduction is bit-exact.
inline double inclusion_probability(const SamplingDistribution& q, std::size_t h,
                                    std::size_t m) {
    const std::size_t n = q.size();
    if (h >= n)
        throw invalid_input("inclusion_probability: expert index out of range");
    if (m < 1 || m > n)
        throw invalid_input("inclusion_probability: need 1 <= M <= N");
    if (m == n)
        return 1.0;
    const double qh = q(h);
    return qh + (1.0 - qh) * static_cast<double>(m - 1) / static_cast<double>(n - 1);
}

// Draw the primary expert from q, then M-1 extras uniformly without
// replacement from the remaining indices (partial Fisher-Yates, every
// (M-1)-subset equiprobable).
inline SampleSet sample_experts(const SamplingDistribution& q, std::size_t m, Rng& rng) {
    const std::size_t n = q.size();
    if (n == 0)
        throw invalid_input("sample_experts: empty distribution");
    if (m < 1 || m > n)
        throw invalid_input("sample_experts: need 1 <= M <= N");

    SampleSet s;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double cum = 0.0;
    s.primary = n - 1; // fallback if rounding leaves u above the final cumsum
    for (std::size_t h = 0; h < n; ++h) {
        cum += q(h);
        if (u < cum) {
            s.primary = h;
            break;
        }
    }

    std::vector<std::size_t> rest;
    rest.reserve(n - 1);
    for (std::size_t h = 0; h < n; ++h)
        if (h != s.primary)
            rest.push_back(h);
    for (std::size_t k = 0; k + 1 < m; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, rest.size() - 1);
        std::swap(rest[k], rest[pick(rng)]);
    }

    s.observed.assign(rest.begin(), rest.begin() + (m - 1));
    s.observed.push_back(s.primary);
    std::sort(s.observed.begin(), s.observed.end());
    return s;
}

// loss / inclusion probability when observed, exactly zero otherwise.
inline double importance_weighted_estimate(double loss, double p_incl, bool in_sample) {
    check_loss_value(loss);
    if (!in_sample)
        return 0.0;
    if (!(p_incl > 0.0))
        throw invariant_violation("importance_weighted_estimate: observed with p <= 0");
    return loss / p_incl;
}

} // namespace adeff

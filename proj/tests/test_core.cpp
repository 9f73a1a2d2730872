#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "adeff/core.hpp"

using namespace adeff;

namespace {

CumulativeEstimates make_estimates(std::vector<double> totals) {
    CumulativeEstimates e(totals.size());
    e.totals = std::move(totals);
    return e;
}

} // namespace

TEST_CASE("compute_distribution: zero losses give uniform") {
    const auto q = compute_distribution(make_estimates({0.0, 0.0, 0.0}), 0.5);
    for (double p : q.probs)
        CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("compute_distribution: eta=0 gives uniform regardless of totals") {
    const auto q = compute_distribution(make_estimates({3.0, 100.0, 0.2, 7.0}), 0.0);
    for (double p : q.probs)
        CHECK(p == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("compute_distribution: totals (0, ln2/eta) give (2/3, 1/3)") {
    const double eta = 0.7;
    const auto q = compute_distribution(make_estimates({0.0, std::log(2.0) / eta}), eta);
    CHECK(std::abs(q(0) - 2.0 / 3.0) <= 1e-12);
    CHECK(std::abs(q(1) - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("compute_distribution: empty estimates rejected") {
    CHECK_THROWS_AS(compute_distribution(CumulativeEstimates(0), 1.0), invalid_input);
    CHECK_THROWS_AS(compute_distribution(make_estimates({1.0}), -0.5), invalid_input);
}

TEST_CASE("compute_distribution: no underflow on huge totals") {
    // raw exponentials of -1e6 all underflow; the shifted form must not
    const auto q = compute_distribution(make_estimates({1e6, 1e6 + 1.0, 1e6 + 2.0}), 1.0);
    q.validate();
    CHECK(q(0) > q(1));
    CHECK(q(1) > q(2));
}

TEST_CASE("compute_distribution properties: normalization, monotonicity, shift invariance") {
    Rng rng(7);
    std::uniform_real_distribution<double> unif(0.0, 50.0);
    std::uniform_int_distribution<std::size_t> size_dist(1, 12);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = size_dist(rng);
        std::vector<double> totals(n);
        for (double& t : totals)
            t = unif(rng);
        const double eta = unif(rng) / 50.0;
        const auto q = compute_distribution(make_estimates(totals), eta);

        double sum = 0.0;
        for (double p : q.probs) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);

        if (eta > 0.0)
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    if (totals[a] < totals[b])
                        CHECK(q(a) > q(b));

        std::vector<double> shifted = totals;
        for (double& t : shifted)
            t += 17.25;
        const auto q2 = compute_distribution(make_estimates(shifted), eta);
        for (std::size_t h = 0; h < n; ++h)
            CHECK(std::abs(q(h) - q2(h)) <= 1e-12);
    }
}

TEST_CASE("learning_rate: N=1 gives 0 at any round") {
    CHECK(learning_rate(1, 1, 1) == 0.0);
    CHECK(learning_rate(1000, 1, 1) == 0.0);
}

TEST_CASE("learning_rate: direct evaluation at N=100, M=10, round=1") {
    CHECK(learning_rate(1, 100, 10) == doctest::Approx(0.6786140424415112).epsilon(1e-12));
}

TEST_CASE("learning_rate: quadrupling the round halves the rate") {
    for (std::size_t k : {1u, 3u, 17u})
        CHECK(learning_rate(4 * k, 20, 4) ==
              doctest::Approx(0.5 * learning_rate(k, 20, 4)).epsilon(1e-14));
}

TEST_CASE("learning_rate: positive for N >= 2 and non-increasing in the round") {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= 100; ++i) {
        const double eta = learning_rate(i, 8, 3);
        CHECK(eta > 0.0);
        CHECK(eta <= prev);
        prev = eta;
    }
    CHECK_THROWS_AS(learning_rate(0, 5, 2), invalid_input);
    CHECK_THROWS_AS(learning_rate(1, 5, 6), invalid_input);
}

TEST_CASE("inclusion_probability: M=N is exactly 1") {
    SamplingDistribution q{{0.2, 0.5, 0.3}};
    for (std::size_t h = 0; h < 3; ++h)
        CHECK(inclusion_probability(q, h, 3) == 1.0);
    SamplingDistribution single{{1.0}};
    CHECK(inclusion_probability(single, 0, 1) == 1.0);
}

TEST_CASE("inclusion_probability: M=1 is q(h)") {
    SamplingDistribution q{{0.2, 0.5, 0.3}};
    for (std::size_t h = 0; h < 3; ++h)
        CHECK(inclusion_probability(q, h, 1) == q(h));
}

TEST_CASE("inclusion_probability: uniform q gives M/N") {
    for (std::size_t n = 2; n <= 6; ++n) {
        SamplingDistribution q;
        q.probs.assign(n, 1.0 / static_cast<double>(n));
        for (std::size_t m = 1; m <= n; ++m)
            for (std::size_t h = 0; h < n; ++h)
                CHECK(inclusion_probability(q, h, m) ==
                      doctest::Approx(static_cast<double>(m) / n).epsilon(1e-14));
    }
}

TEST_CASE("inclusion_probability: out-of-range index rejected") {
    SamplingDistribution q{{0.5, 0.5}};
    CHECK_THROWS_AS(inclusion_probability(q, 2, 1), invalid_input);
}

TEST_CASE("sample_experts: single expert") {
    SamplingDistribution q{{1.0}};
    Rng rng(1);
    const SampleSet s = sample_experts(q, 1, rng);
    CHECK(s.primary == 0);
    CHECK(s.observed == std::vector<std::size_t>{0});
}

TEST_CASE("sample_experts: M=N observes everyone") {
    SamplingDistribution q{{0.1, 0.2, 0.3, 0.4}};
    Rng rng(2);
    for (int rep = 0; rep < 50; ++rep) {
        const SampleSet s = sample_experts(q, 4, rng);
        CHECK(s.observed == std::vector<std::size_t>{0, 1, 2, 3});
        CHECK(s.contains(s.primary));
    }
}

TEST_CASE("sample_experts: degenerate q pins the primary, extras uniform") {
    SamplingDistribution q{{1.0, 0.0, 0.0}};
    Rng rng(3);
    std::map<std::size_t, int> extra_counts;
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) {
        const SampleSet s = sample_experts(q, 2, rng);
        REQUIRE(s.primary == 0);
        REQUIRE(s.observed.size() == 2);
        const std::size_t extra = s.observed[0] == 0 ? s.observed[1] : s.observed[0];
        ++extra_counts[extra];
    }
    // each of {0,1},{0,2} with prob 1/2; 5 sigma on a fair coin over 1e5 draws
    for (std::size_t h : {1u, 2u})
        CHECK(std::abs(extra_counts[h] / double(draws) - 0.5) < 5.0 * 0.5 / std::sqrt(draws));
}

TEST_CASE("sample_experts: invalid budget rejected") {
    SamplingDistribution q{{0.5, 0.5}};
    Rng rng(4);
    CHECK_THROWS_AS(sample_experts(q, 0, rng), invalid_input);
    CHECK_THROWS_AS(sample_experts(q, 3, rng), invalid_input);
}

TEST_CASE("sample_experts: observed sets are distinct, sorted, in range") {
    Rng rng(5);
    for (int rep = 0; rep < 500; ++rep) {
        std::uniform_int_distribution<std::size_t> nd(1, 9);
        const std::size_t n = nd(rng);
        std::uniform_int_distribution<std::size_t> md(1, n);
        const std::size_t m = md(rng);
        std::vector<double> w(n);
        std::uniform_real_distribution<double> unif(0.01, 1.0);
        double sum = 0.0;
        for (double& x : w) {
            x = unif(rng);
            sum += x;
        }
        for (double& x : w)
            x /= sum;
        const SampleSet s = sample_experts(SamplingDistribution{w}, m, rng);
        REQUIRE(s.observed.size() == m);
        CHECK(std::is_sorted(s.observed.begin(), s.observed.end()));
        CHECK(std::adjacent_find(s.observed.begin(), s.observed.end()) == s.observed.end());
        CHECK(s.observed.back() < n);
        CHECK(s.contains(s.primary));
    }
}

TEST_CASE("importance_weighted_estimate") {
    CHECK(importance_weighted_estimate(0.7, 1.0, true) == 0.7);
    CHECK(importance_weighted_estimate(0.9, 0.1, false) == 0.0);
    CHECK(importance_weighted_estimate(0.5, 0.5, true) == 1.0);
    CHECK_THROWS_AS(importance_weighted_estimate(0.5, 0.0, true), invariant_violation);
    CHECK_THROWS_AS(importance_weighted_estimate(1.5, 1.0, true), invalid_input);
    CHECK_THROWS_AS(importance_weighted_estimate(-0.1, 1.0, true), invalid_input);
}

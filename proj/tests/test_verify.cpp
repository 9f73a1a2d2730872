#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adeff/verify.hpp"

using namespace adeff;
using namespace adeff::verify;

TEST_CASE("enumerate_inclusion: hand-computed N=3, M=2 instance") {
    SamplingDistribution q{{0.5, 0.3, 0.2}};
    const auto rpt = enumerate_inclusion(q, 2);
    CHECK(rpt.inclusion[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(rpt.inclusion[1] == doctest::Approx(0.65).epsilon(1e-14));
    CHECK(rpt.inclusion[2] == doctest::Approx(0.60).epsilon(1e-14));
    CHECK(rpt.inclusion[0] + rpt.inclusion[1] + rpt.inclusion[2] ==
          doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rpt.max_inclusion_deviation <= 1e-12);
}

TEST_CASE("enumerate_inclusion: M=N gives 1, M=1 gives q") {
    SamplingDistribution q{{0.4, 0.35, 0.25}};
    const auto full = enumerate_inclusion(q, 3);
    for (double p : full.inclusion)
        CHECK(p == doctest::Approx(1.0).epsilon(1e-14));
    const auto one = enumerate_inclusion(q, 1);
    for (std::size_t h = 0; h < 3; ++h)
        CHECK(one.inclusion[h] == doctest::Approx(q(h)).epsilon(1e-14));
}

TEST_CASE("enumerate_inclusion: agrees with the closed form on random instances") {
    Rng rng(11);
    for (std::size_t n = 2; n <= 6; ++n)
        for (std::size_t m = 1; m <= n; ++m)
            for (int rep = 0; rep < 20; ++rep) {
                const auto q = dirichlet_uniform(n, rng);
                const auto rpt = enumerate_inclusion(q, m);
                CHECK(rpt.max_inclusion_deviation <= 1e-12);
                double sum = 0.0;
                for (double p : rpt.inclusion)
                    sum += p;
                CHECK(std::abs(sum - static_cast<double>(m)) <= 1e-12);
            }
}

TEST_CASE("enumeration rejects infeasible or invalid instances") {
    SamplingDistribution big;
    big.probs.assign(11, 1.0 / 11.0);
    CHECK_THROWS_AS(enumerate_inclusion(big, 2), infeasible_instance);
    SamplingDistribution q{{0.5, 0.5}};
    CHECK_THROWS_AS(enumerate_inclusion(q, 3), invalid_input);
}

TEST_CASE("estimator moments: all losses 1 at M=N") {
    SamplingDistribution q{{0.2, 0.3, 0.5}};
    const auto rpt = enumerate_estimator_moments(q, {1.0, 1.0, 1.0}, 3);
    for (std::size_t h = 0; h < 3; ++h) {
        CHECK(rpt.estimator_mean[h] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(rpt.second_moment[h] == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(rpt.weighted_second_moment == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("estimator moments: all losses 0") {
    SamplingDistribution q{{0.6, 0.4}};
    const auto rpt = enumerate_estimator_moments(q, {0.0, 0.0}, 1);
    for (std::size_t h = 0; h < 2; ++h) {
        CHECK(rpt.estimator_mean[h] == 0.0);
        CHECK(rpt.second_moment[h] == 0.0);
        CHECK(rpt.variance[h] == 0.0);
    }
    CHECK(rpt.weighted_second_moment == 0.0);
}

TEST_CASE("estimator moments: unbiasedness and variance bound, N=4 M=2") {
    Rng rng(12);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto q = dirichlet_uniform(4, rng);
        std::vector<double> losses(4);
        for (double& loss : losses)
            loss = unif(rng);
        const auto rpt = enumerate_estimator_moments(q, losses, 2);
        CHECK(rpt.max_unbiasedness_deviation <= 1e-13);
        CHECK(rpt.weighted_second_moment <= 4.0 / 2.0 + 1e-12);
        for (double v : rpt.variance)
            CHECK(v <= 3.0 + 1e-12); // (N-1)/(M-1)
    }
}

TEST_CASE("lemma2_value: uniform q attains N/M") {
    for (std::size_t n = 2; n <= 12; ++n)
        for (std::size_t m = 1; m <= n; ++m) {
            SamplingDistribution q;
            q.probs.assign(n, 1.0 / static_cast<double>(n));
            CHECK(std::abs(lemma2_value(q, m) -
                           static_cast<double>(n) / static_cast<double>(m)) <= 1e-12);
        }
}

TEST_CASE("lemma2_value: M=N sums the distribution back to 1") {
    SamplingDistribution q{{0.7, 0.2, 0.1}};
    CHECK(lemma2_value(q, 3) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lemma2_value: M=1 counts the support") {
    SamplingDistribution full{{0.5, 0.3, 0.2}};
    CHECK(lemma2_value(full, 1) == doctest::Approx(3.0).epsilon(1e-14));
    SamplingDistribution partial{{0.5, 0.5, 0.0}};
    CHECK(lemma2_value(partial, 1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("lemma2_value: bounded by N/M at random simplex points") {
    Rng rng(13);
    for (std::size_t n = 2; n <= 12; ++n)
        for (std::size_t m = 1; m <= n; ++m)
            for (int rep = 0; rep < 100; ++rep) {
                const auto q = dirichlet_uniform(n, rng);
                CHECK(lemma2_value(q, m) <=
                      static_cast<double>(n) / static_cast<double>(m) + 1e-9);
            }
}

TEST_CASE("lemma2_max_search: M=N caps at 1") {
    Rng rng(14);
    const auto [value, q] = lemma2_max_search(4, 4, 100, rng);
    CHECK(value <= 1.0 + 1e-9);
    CHECK(value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lemma2_max_search: N=5, M=2 maximum at uniform") {
    Rng rng(15);
    const auto [value, q] = lemma2_max_search(5, 2, 10000, rng);
    CHECK(value <= 2.5 + 1e-9);
    CHECK(value > 2.5 - 1e-3);
    for (double p : q.probs)
        CHECK(std::abs(p - 0.2) < 0.1);
}

TEST_CASE("lemma2_max_search: N=2, M=1 reaches 2 at any full-support q") {
    // 1-D grid over the simplex
    for (double p = 0.05; p < 1.0; p += 0.05) {
        SamplingDistribution q{{p, 1.0 - p}};
        CHECK(lemma2_value(q, 1) == doctest::Approx(2.0).epsilon(1e-12));
    }
    Rng rng(16);
    const auto [value, q] = lemma2_max_search(2, 1, 1000, rng);
    CHECK(value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("empirical sampler matches enumerated inclusion within 3 standard errors") {
    SamplingDistribution q{{0.35, 0.3, 0.2, 0.1, 0.05}};
    const auto rpt = enumerate_inclusion(q, 3);
    Rng rng(17);
    const std::size_t draws = 100000;
    std::vector<double> counts(5, 0.0);
    for (std::size_t d = 0; d < draws; ++d)
        for (std::size_t h : sample_experts(q, 3, rng).observed)
            counts[h] += 1.0;
    for (std::size_t h = 0; h < 5; ++h) {
        const double p = rpt.inclusion[h];
        const double se = std::sqrt(p * (1.0 - p) / draws);
        CHECK(std::abs(counts[h] / draws - p) <= 3.0 * se);
    }
}

TEST_CASE("run_suite: every check passes and covers the edge budgets") {
    Rng rng(18);
    const auto checks = run_suite(3, rng);
    CHECK(checks.size() >= 5);
    for (const auto& check : checks) {
        INFO(check.name);
        CHECK(check.pass);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nhpp/diagnostics.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/rng.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace nhpp;

namespace {

std::vector<double> ar1_chain(std::size_t n, double rho, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(n);
    x[0] = g(rng) / std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 1; i < n; ++i) x[i] = rho * x[i - 1] + g(rng);
    return x;
}

} // namespace

TEST_CASE("gelman-rubin: identical chains hit the analytic floor") {
    Rng rng = make_rng(61);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n = 500;
    std::vector<double> c(n);
    for (auto& v : c) v = g(rng);
    const auto res = gelman_rubin({c, c, c});
    // B = 0, so rhat = sqrt((n-1)/n) exactly
    CHECK(res.rhat == doctest::Approx(std::sqrt((n - 1.0) / n)).epsilon(1e-12));
    CHECK(!res.degenerate);
}

TEST_CASE("gelman-rubin: direct two-chain formula oracle") {
    // chains with hand-computable moments
    std::vector<double> a{1.0, 2.0, 3.0, 4.0};  // mean 2.5, var 5/3
    std::vector<double> b{11.0, 12.0, 13.0, 14.0};
    const auto res = gelman_rubin({a, b});
    const double w = 5.0 / 3.0;
    const double b_over_n = 50.0; // sample variance of {2.5, 12.5}
    const double want = std::sqrt((3.0 / 4.0 * w + b_over_n) / w);
    CHECK(res.rhat == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("gelman-rubin: split halves detect a trend") {
    // one long drifting chain looks fine unsplit against its copy, but the
    // split variant compares first and second halves
    std::vector<double> drift(400);
    Rng rng = make_rng(62);
    std::normal_distribution<double> g(0.0, 0.1);
    for (std::size_t i = 0; i < drift.size(); ++i) drift[i] = i * 0.01 + g(rng);
    const auto split = gelman_rubin({drift, drift}, true);
    CHECK(split.rhat > 1.5);
}

TEST_CASE("gelman-rubin: degenerate and invalid inputs") {
    std::vector<double> flat(100, 3.0);
    const auto res = gelman_rubin({flat, flat});
    CHECK(res.degenerate);
    CHECK(res.rhat == 1.0);
    CHECK_THROWS_AS(gelman_rubin({flat}), invalid_input);
    CHECK_THROWS_AS(gelman_rubin({{1.0, 2.0}, {1.0}}), invalid_input);
}

TEST_CASE("ess: near-independent chain stays near n") {
    Rng rng = make_rng(63);
    const std::size_t n = 20000;
    const auto x = ar1_chain(n, 0.0, rng);
    const auto res = effective_sample_size(x);
    CHECK(res.ess > 0.8 * n);
    CHECK(res.ess <= n);
}

TEST_CASE("ess: ar(1) rho=0.9 matches n/19 within 20%") {
    Rng rng = make_rng(64);
    const std::size_t n = 100000;
    const auto x = ar1_chain(n, 0.9, rng);
    const auto res = effective_sample_size(x);
    const double want = n / 19.0;
    CHECK(std::fabs(res.ess - want) < 0.2 * want);
}

TEST_CASE("ess: constant chain is degenerate") {
    std::vector<double> flat(100, 1.0);
    const auto res = effective_sample_size(flat);
    CHECK(res.degenerate);
    CHECK(res.ess == 100.0);
    CHECK_THROWS_AS(effective_sample_size({1.0, 2.0}), invalid_input);
}

TEST_CASE("diagnose_chains report") {
    Rng rng = make_rng(65);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n = 800;
    std::vector<std::vector<std::array<double, 6>>> chains(4);
    for (auto& c : chains) {
        c.resize(n);
        for (auto& draw : c)
            for (auto& v : draw) v = g(rng);
    }
    const auto report = diagnose_chains(chains, 1.01, 400.0);
    REQUIRE(report.parameters.size() == 6);
    CHECK(report.n_chains == 4);
    CHECK(report.chain_length == n);
    CHECK(report.parameters[0].name == "N_FRBs");
    CHECK(report.parameters[5].name == "DM*");
    for (const auto& p : report.parameters) {
        CHECK(p.rhat < 1.01);
        CHECK(p.ess_per_chain.size() == 4);
        CHECK(p.ess_pooled > 400.0);
        CHECK(!p.rhat_exceeded);
        CHECK(!p.low_ess);
    }
    CHECK(report.converged);

    // an impossible threshold flips the verdict
    const auto strict = diagnose_chains(chains, 0.5, 400.0);
    CHECK(!strict.converged);
    CHECK_THROWS_AS(diagnose_chains({chains[0]}), invalid_input);
}

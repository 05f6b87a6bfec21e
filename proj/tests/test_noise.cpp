#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nhpp/errors.hpp"
#include "nhpp/noise.hpp"
#include "nhpp/stats.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace nhpp;

TEST_CASE("degenerate noise") {
    const auto nm = NoiseModel::degenerate_zero(3);
    Rng rng = make_rng(1);
    const auto e = nm.sample(rng);
    CHECK(e == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(nm.density({0.0, 0.0, 0.0}) == std::numeric_limits<double>::infinity());
    CHECK(nm.density({0.1, 0.0, 0.0}) == 0.0);
}

TEST_CASE("isotropic gaussian: density matches the product of normals") {
    const auto nm = NoiseModel::isotropic_gaussian({0.5, 2.0});
    const std::vector<double> e{0.3, -1.0};
    const double want = stats::normal_pdf(0.3, 0.0, 0.5) * stats::normal_pdf(-1.0, 0.0, 2.0);
    CHECK(nm.density(e) == doctest::Approx(want).epsilon(1e-12));
    CHECK(nm.log_density(e) == doctest::Approx(std::log(want)).epsilon(1e-10));
    CHECK_THROWS_AS(NoiseModel::isotropic_gaussian({0.5, -1.0}), invalid_input);
}

TEST_CASE("isotropic gaussian: sample moments") {
    const auto nm = NoiseModel::isotropic_gaussian({0.5, 2.0});
    Rng rng = make_rng(2);
    const int n = 100000;
    double m0 = 0, m1 = 0, v0 = 0, v1 = 0;
    for (int i = 0; i < n; ++i) {
        const auto e = nm.sample(rng);
        m0 += e[0];
        m1 += e[1];
        v0 += e[0] * e[0];
        v1 += e[1] * e[1];
    }
    m0 /= n; m1 /= n; v0 /= n; v1 /= n;
    CHECK(std::fabs(m0) < 0.01);
    CHECK(std::fabs(m1) < 0.04);
    CHECK(v0 == doctest::Approx(0.25).epsilon(0.03));
    CHECK(v1 == doctest::Approx(4.0).epsilon(0.03));
}

TEST_CASE("gridded noise: validation, density, sampling frequencies") {
    CHECK_THROWS_AS(
        NoiseModel::gridded_empirical({0.0}, {1.0}, {2}, {0.6, 0.6}), invalid_input);
    CHECK_THROWS_AS(
        NoiseModel::gridded_empirical({0.0}, {1.0}, {2}, {1.2, -0.2}), invalid_input);

    const auto nm = NoiseModel::gridded_empirical({0.0, 0.0}, {2.0, 1.0}, {2, 2},
                                                  {0.1, 0.2, 0.3, 0.4});
    // cell volume is (2/2) * (1/2) = 0.5
    CHECK(nm.density({0.5, 0.25}) == doctest::Approx(0.1 / 0.5));
    CHECK(nm.density({1.5, 0.75}) == doctest::Approx(0.4 / 0.5));
    CHECK(nm.density({2.5, 0.5}) == 0.0);

    Rng rng = make_rng(3);
    const int n = 200000;
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const auto e = nm.sample(rng);
        CHECK(e[0] >= 0.0);
        CHECK(e[0] <= 2.0);
        const int cx = e[0] < 1.0 ? 0 : 1;
        const int cy = e[1] < 0.5 ? 0 : 1;
        ++counts[cx * 2 + cy];
    }
    const double want[4] = {0.1, 0.2, 0.3, 0.4};
    for (int c = 0; c < 4; ++c) {
        const double p = static_cast<double>(counts[c]) / n;
        const double se = std::sqrt(want[c] * (1 - want[c]) / n);
        CHECK(std::fabs(p - want[c]) < 4 * se);
    }
}

TEST_CASE("radial max distribution: k=1 equals the chi law") {
    const auto nm = NoiseModel::isotropic_gaussian({0.7, 0.7});
    for (double x : {0.2, 0.8, 1.5}) {
        CHECK(nm.radial_max_cdf(1, x) == doctest::Approx(stats::chi_cdf(x, 2, 0.7)).epsilon(1e-10));
        CHECK(nm.radial_max_pdf(1, x) == doctest::Approx(stats::chi_pdf(x, 2, 0.7)).epsilon(1e-10));
    }
}

TEST_CASE("radial max distribution: k=3 empirical oracle") {
    const auto nm = NoiseModel::isotropic_gaussian({0.5, 0.5, 0.5});
    Rng rng = make_rng(4);
    const int n = 100000;
    const double x0 = 1.1;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        double worst = 0.0;
        for (int k = 0; k < 3; ++k) {
            const auto e = nm.sample(rng);
            double r2 = 0.0;
            for (double v : e) r2 += v * v;
            worst = std::max(worst, std::sqrt(r2));
        }
        if (worst <= x0) ++hits;
    }
    const double p = static_cast<double>(hits) / n;
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::fabs(nm.radial_max_cdf(3, x0) - p) < 4 * se);
    // pdf is k F^{k-1} f
    const double want = 3.0 * std::pow(stats::chi_cdf(x0, 3, 0.5), 2) * stats::chi_pdf(x0, 3, 0.5);
    CHECK(nm.radial_max_pdf(3, x0) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("radial max distribution: metric weights rescale sigma") {
    const auto nm = NoiseModel::isotropic_gaussian({0.5, 1.0});
    // weights (2, 1) make both metric sigmas equal to 1
    CHECK(nm.radial_max_cdf(2, 1.3, {2.0, 1.0}) ==
          doctest::Approx(std::pow(stats::chi_cdf(1.3, 2, 1.0), 2)).epsilon(1e-10));
    // mismatched metric sigmas are not isotropic under the metric
    CHECK_THROWS_AS(nm.radial_max_cdf(2, 1.0, {1.0, 1.0}), invalid_input);
}

TEST_CASE("radial max quantile inverts the cdf") {
    const auto nm = NoiseModel::isotropic_gaussian({0.3, 0.3});
    for (double p : {0.1, 0.5, 0.99, 1.0 - 1e-10}) {
        const double x = nm.radial_max_quantile(2, p);
        CHECK(nm.radial_max_cdf(2, x) == doctest::Approx(p).epsilon(1e-6));
    }
    const auto grid = NoiseModel::gridded_empirical({0.0}, {1.0}, {2}, {0.5, 0.5});
    CHECK_THROWS_AS(grid.radial_max_cdf(1, 0.5), invalid_input);
}

TEST_CASE("degenerate noise rejects the radial law") {
    const auto nm = NoiseModel::degenerate_zero(2);
    CHECK_THROWS_AS(nm.radial_max_cdf(3, 0.5), invalid_input);
}

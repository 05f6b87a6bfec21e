#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nhpp/contact.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/stats.hpp"

#include <cmath>
#include <vector>

using namespace nhpp;

namespace {

const IntensityModel& unit_homog(double rate = 100.0) {
    static const IntensityModel m =
        IntensityModel::homogeneous(100.0, Domain::unit_square());
    (void)rate;
    return m;
}

} // namespace

TEST_CASE("berman cdf: k=1 analytic anchor") {
    const ContactQuery q{Point{0.5, 0.5}, 0.05, 1};
    const double got = berman_cdf(unit_homog(), q, 20000, 3);
    CHECK(got == doctest::Approx(1.0 - std::exp(-100.0 * M_PI * 0.0025)).epsilon(1e-9));
}

TEST_CASE("berman cdf: k=2 analytic and monotone in r") {
    double prev = -1.0;
    for (double r : {0.01, 0.03, 0.05, 0.1}) {
        const double m = 100.0 * M_PI * r * r;
        const ContactQuery q{Point{0.5, 0.5}, r, 2};
        const double got = berman_cdf(unit_homog(), q, 20000, 3);
        CHECK(got == doctest::Approx(1.0 - (1.0 + m) * std::exp(-m)).epsilon(1e-9));
        CHECK(got > prev);
        prev = got;
    }
    CHECK(berman_cdf(unit_homog(), {Point{0.5, 0.5}, 0.0, 1}, 100, 1) == 0.0);
    CHECK_THROWS_AS(berman_cdf(unit_homog(), {Point{0.5, 0.5}, -0.1, 1}, 100, 1),
                    invalid_input);
    CHECK_THROWS_AS(berman_cdf(unit_homog(), {Point{0.5, 0.5}, 0.1, 0}, 100, 1),
                    invalid_input);
}

TEST_CASE("noiseless collapse: degenerate noise reduces every bound to Berman") {
    const auto& m = unit_homog();
    const ContactQuery q{Point{0.4, 0.6}, 0.07, 2};
    const double berman = berman_cdf(m, q, 30000, 9);
    const auto nm = NoiseModel::degenerate_zero(2);
    const auto general = contact_bound(m, {nm, nm}, q, 50, 30000, 9);
    const auto iid = contact_bound_iid(m, nm, q, 8, 30000, 9);
    CHECK(general.value == doctest::Approx(berman).epsilon(1e-9));
    CHECK(iid.value == doctest::Approx(berman).epsilon(1e-9));
}

TEST_CASE("iid bound: independent quadrature oracle on a homogeneous model") {
    // With constant intensity the ball mass is analytic, so the bound is a 1D
    // integral of the Poisson tail against the max-of-chi density; Simpson it.
    const double rate = 100.0, sigma = 0.02, r = 0.05;
    const unsigned k = 2;
    Domain big({-5.0, -5.0}, {5.0, 5.0}, {1.0, 1.0});
    const auto m = IntensityModel::homogeneous(rate, big);
    const auto nm = NoiseModel::isotropic_gaussian({sigma, sigma});
    const ContactQuery q{Point{0.0, 0.0}, r, k};
    // the ball stays interior, so the inner MC is exact and the grid count
    // alone sets the accuracy
    const auto got = contact_bound_iid(m, nm, q, 2000, 2000, 21);

    auto tail = [&](double rr) {
        const double mass = rate * M_PI * rr * rr;
        return stats::poisson_tail(mass, k);
    };
    auto f = [&](double x) {
        return k * std::pow(stats::chi_cdf(x, 2, sigma), k - 1.0) *
               stats::chi_pdf(x, 2, sigma) * tail(r + x);
    };
    const double xmax = 8.0 * sigma;
    const int n = 20000;
    double simpson = f(0.0) + f(xmax);
    for (int i = 1; i < n; ++i) simpson += (i % 2 ? 4.0 : 2.0) * f(i * xmax / n);
    simpson *= xmax / (3.0 * n);
    CHECK(got.value == doctest::Approx(simpson).epsilon(5e-3));
}

TEST_CASE("iid and general bounds agree for shared isotropic noise") {
    const auto m = IntensityModel::reference_gaussian();
    const auto nm = NoiseModel::isotropic_gaussian({0.01, 0.01});
    const ContactQuery q{Point{0.6, 0.6}, 0.03, 2};
    const auto iid = contact_bound_iid(m, nm, q, 64, 4000, 31);
    const auto gen = contact_bound(m, {nm, nm}, q, 3000, 4000, 31);
    const double se = 3.0 * std::sqrt(iid.std_error * iid.std_error +
                                      gen.std_error * gen.std_error) + 5e-3;
    CHECK(std::fabs(iid.value - gen.value) < se);
}

TEST_CASE("bound argument validation") {
    const auto& m = unit_homog();
    const auto nm = NoiseModel::isotropic_gaussian({0.01, 0.01});
    CHECK_THROWS_AS(contact_bound(m, {nm}, {Point{0.5, 0.5}, 0.05, 2}, 10, 100, 1),
                    invalid_input);
    const auto grid = NoiseModel::gridded_empirical({0.0, 0.0}, {1.0, 1.0}, {1, 1}, {1.0});
    CHECK_THROWS_AS(contact_bound_iid(m, grid, {Point{0.5, 0.5}, 0.05, 2}, 8, 100, 1),
                    invalid_input);
}

TEST_CASE("simulate_pc: degenerate samplers reduce to one Berman value") {
    const auto& m = unit_homog();
    const std::vector<Point> cluster{Point{0.5, 0.5}, Point{0.54, 0.5}, Point{0.52, 0.53}};
    const Sphere s = min_bounding_sphere(cluster, m.domain());
    const double want = berman_cdf(m, {s.center, s.radius, 3}, 400000, 123);

    ModelSampler draw_model = [&m](Rng&) -> const IntensityModel& { return m; };
    std::vector<PointSampler> members;
    for (const auto& p : cluster)
        members.push_back([p](Rng&) { return p; });
    const auto pc = simulate_pc(draw_model, members, m.domain(), 40, 20000, 55, 2);
    REQUIRE(pc.replicates.size() == 40);
    CHECK(pc.median >= pc.ci_lo);
    CHECK(pc.ci_hi >= pc.median);
    // all replicates share the positions; spread comes only from the ball MC
    CHECK(pc.median == doctest::Approx(want).epsilon(0.05));
    for (double v : pc.replicates) CHECK(v == doctest::Approx(want).epsilon(0.2));

    CHECK_THROWS_AS(simulate_pc(draw_model, {members[0]}, m.domain(), 10, 100, 1),
                    invalid_input);
}

TEST_CASE("compare_with_previous arithmetic") {
    std::vector<ClusterPc> now{{"A", 1e-4, 2e-4}, {"B", 0.0, 1e-5}, {"C", 0.5, 0.6}};
    std::vector<PreviousPc> prev{{"A", 3e-1}, {"C", 0.25}, {"Z", 0.9}};
    const auto t = compare_with_previous(now, prev);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].id == "A");
    CHECK(t.rows[0].improvement == doctest::Approx(3000.0));
    CHECK(t.rows[1].id == "C");
    CHECK(t.rows[1].improvement == doctest::Approx(0.5));
    CHECK(t.n_improved == 1);
    CHECK(t.median_improvement == doctest::Approx(0.5 * (3000.0 + 0.5)));
    REQUIRE(t.unmatched.size() == 2);
    CHECK(t.unmatched[0] == "B");
    CHECK(t.unmatched[1] == "Z");
}

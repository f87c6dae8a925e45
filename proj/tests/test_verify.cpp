#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "coulreg/ballnorm.hpp"
#include "coulreg/jastrow.hpp"
#include "coulreg/oracle.hpp"
#include "coulreg/quadrature.hpp"
#include "coulreg/sampling.hpp"
#include "coulreg/stats.hpp"
#include "coulreg/verify.hpp"

using namespace coulreg;

namespace {

Configuration one(double x, double y, double z) { return Configuration({{x, y, z}}); }

std::vector<double> geometric_radii(double first, double last, int points) {
    std::vector<double> r(points);
    const double q = std::pow(last / first, 1.0 / (points - 1));
    r[0] = first;
    for (int i = 1; i < points; ++i) r[i] = r[i - 1] * q;
    return r;
}

}  // namespace

TEST_CASE("line fit and rank statistics") {
    std::vector<double> x = {0, 1, 2, 3, 4};
    std::vector<double> y = {1, 3, 5, 7, 9};
    auto f = fit_line(x, y);
    CHECK(f.slope == Catch::Approx(2.0));
    CHECK(f.intercept == Catch::Approx(1.0));
    CHECK(f.slope_stderr == Catch::Approx(0.0).margin(1e-12));

    CHECK(kendall_tau(x, y) == Catch::Approx(1.0));
    std::vector<double> y2 = {9, 7, 5, 3, 1};
    CHECK(kendall_tau(x, y2) == Catch::Approx(-1.0));
    std::vector<double> noise = {2.0, -1.0, 1.5, -0.5, 0.2};
    CHECK(std::abs(kendall_tau(x, noise)) < 0.5);

    CHECK(median({3.0, 1.0, 2.0}) == Catch::Approx(2.0));
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == Catch::Approx(2.5));
    CHECK(max_of({0.5, 2.5, 1.0}) == Catch::Approx(2.5));
}

TEST_CASE("quadrature basics") {
    CHECK(integrate([](double t) { return t * t; }, 0.0, 1.0) == Catch::Approx(1.0 / 3.0));
    CHECK(integrate([](double t) { return std::exp(-t); }, 0.0, 30.0) ==
          Catch::Approx(1.0).epsilon(1e-9));

    // g = 1 recovers the ball volume for any center.
    const double vol = 4.0 * M_PI / 3.0;
    CHECK(ball_integral_radial([](double) { return 1.0; }, 0.0, 1.0) == Catch::Approx(vol));
    CHECK(ball_integral_radial([](double) { return 1.0; }, 0.7, 1.0) ==
          Catch::Approx(vol).epsilon(1e-7));
    CHECK(ball_integral_radial([](double) { return 1.0; }, 3.0, 1.0) ==
          Catch::Approx(vol).epsilon(1e-7));
    // Centered moment: int_{B(0,R)} |y|^2 = 4 pi R^5 / 5.
    CHECK(ball_integral_radial([](double s) { return s * s; }, 0.0, 2.0) ==
          Catch::Approx(4.0 * M_PI * 32.0 / 5.0));
}

TEST_CASE("sampling utilities") {
    CHECK(unit_ball_volume(3) == Catch::Approx(4.0 * M_PI / 3.0));
    CHECK(unit_ball_volume(2) == Catch::Approx(M_PI));
    CHECK(unit_ball_volume(6) == Catch::Approx(std::pow(M_PI, 3) / 6.0));

    CHECK(substream_seed(1, 0) == substream_seed(1, 0));
    CHECK(substream_seed(1, 0) != substream_seed(1, 1));
    CHECK(substream_seed(1, 0) != substream_seed(2, 0));

    auto h = halton_point(10, 3);
    for (double c : h) {
        CHECK(c > 0.0);
        CHECK(c < 1.0);
    }
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        auto p = unit_ball_point(rng, 6);
        double n2 = 0;
        for (double c : p) n2 += c * c;
        CHECK(n2 <= 1.0);
    }
    // Ground-state radial law has mean 3/(2 rate).
    Orbital ground(OrbitalKind::GroundHydrogenic, 1.0);
    double mean_r = 0.0;
    const int ns = 20000;
    for (int i = 0; i < ns; ++i) mean_r += norm(sample_orbital_sq(rng, ground));
    mean_r /= ns;
    CHECK(mean_r == Catch::Approx(3.0).epsilon(0.03));
}

TEST_CASE("ball Lp norms against closed forms") {
    auto constant = [](const std::vector<double>&) { return 2.5; };
    std::vector<double> c0 = {0.0, 0.0, 0.0};
    auto est = ball_lp_norm(constant, c0, 1.0, 2.0, 4000, 11);
    CHECK(est.value == Catch::Approx(2.5 * std::sqrt(4.0 * M_PI / 3.0)).epsilon(1e-10));
    CHECK(est.std_error < 1e-10);
    auto esti = ball_lp_norm(constant, c0, 0.3, kPInfinity, 500, 11);
    CHECK(esti.value == Catch::Approx(2.5));

    // Hydrogen ground state, p = 2, against the radial reduction oracle.
    auto state = hydrogen_ground(1.0);
    CompiledPartial psi(state, MultiIndex::zero(1));
    std::vector<double> c1 = {0.8, 0.0, 0.0};
    const double R = 0.4;
    auto mc = ball_lp_norm([&](const std::vector<double>& y) { return psi.eval_flat(y); }, c1, R,
                           2.0, 60000, 13);
    const double exact = std::sqrt(
        ball_integral_radial([](double s) { return std::exp(-s); }, 0.8, R));
    CHECK(mc.value == Catch::Approx(exact).margin(4.0 * mc.std_error + 1e-4));

    CHECK_THROWS_AS(ball_lp_norm(constant, c0, -1.0, 2.0, 10, 1), Error);
    CHECK_THROWS_AS(ball_lp_norm(constant, c0, 1.0, 0.5, 10, 1), Error);
}

TEST_CASE("derivative bound ratios stay controlled for hydrogen") {
    auto state = hydrogen_ground(1.0);
    auto alpha = MultiIndex::on_electron(1, 1, {0, 2, 0});
    std::vector<Configuration> centers;
    for (double d : geometric_radii(0.5, 1e-3, 7)) centers.push_back(one(d, 0, 0));
    auto table = verify_main_theorem(state, alpha, 2.0, 0.25, 0.5, centers, 2000, 42);
    CHECK(table.ratio.size() == centers.size());
    CHECK(table.pass);
    CHECK(table.max_over_median <= 10.0);
    CHECK(std::abs(table.kendall) < 0.5);

    auto tinf = verify_main_theorem(state, alpha, kPInfinity, 0.25, 0.5, centers, 2000, 42);
    CHECK(tinf.pass);

    CHECK_THROWS_AS(
        verify_main_theorem(state, alpha, 2.0, 0.25, 0.5, {one(0, 0, 0)}, 100, 1),
        CenterOnSingularSet);
    CHECK_THROWS_AS(
        verify_main_theorem(state, alpha, 2.0, 0.5, 0.25, centers, 100, 1), Error);
}

TEST_CASE("pointwise ratio check") {
    auto state = hydrogen_ground(1.0);
    auto alpha = MultiIndex::on_electron(1, 1, {0, 2, 0});
    // Random orientations: the trend test needs centers that vary in more
    // than the distance alone.
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Configuration> centers;
    for (double d : geometric_radii(0.5, 1e-3, 12)) {
        Vec3 dir = {g(rng), g(rng), g(rng)};
        centers.push_back(Configuration({(d / norm(dir)) * dir}));
    }
    auto table = verify_pointwise(state, alpha, 0.5, centers, 3000, 3);
    CHECK(table.pass);

    CHECK_THROWS_AS(verify_pointwise(state, MultiIndex::zero(1), 0.5, centers, 100, 1),
                    InvalidAlpha);
    CHECK_THROWS_AS(verify_pointwise(state, alpha, 0.5, {one(0, 0, 0)}, 100, 1),
                    CenterOnSingularSet);
}

TEST_CASE("scaling exponents match the sharp orders") {
    auto state = hydrogen_ground(1.0);
    Ray axis{one(0, 0, 0), one(1, 0, 0)};
    auto radii = geometric_radii(1e-1, 1e-4, 10);

    auto r2 = scaling_exponent(state, MultiIndex::on_electron(1, 1, {0, 2, 0}), axis, radii);
    CHECK(r2.pass);
    CHECK(r2.slope == Catch::Approx(-1.0).margin(0.05));

    auto r3 = scaling_exponent(state, MultiIndex::on_electron(1, 1, {1, 2, 0}), axis, radii);
    CHECK(r3.pass);
    CHECK(r3.slope == Catch::Approx(-2.0).margin(0.05));

    auto r4 = scaling_exponent(state, MultiIndex::on_electron(1, 1, {0, 4, 0}), axis, radii);
    CHECK(r4.pass);
    CHECK(r4.slope == Catch::Approx(-3.0).margin(0.05));

    auto r1 = scaling_exponent(state, MultiIndex::on_electron(1, 1, {1, 0, 0}), axis, radii);
    CHECK(r1.pass);
    CHECK(r1.slope == Catch::Approx(0.0).margin(0.05));

    CHECK_THROWS_AS(scaling_exponent(state, MultiIndex::zero(1), axis, radii), InvalidAlpha);

    // Ray into the N = 2 triple point reaches two strata at the same rate.
    auto pair = product_state({Orbital(OrbitalKind::GroundHydrogenic, 1.0),
                               Orbital(OrbitalKind::GroundHydrogenic, 1.0)});
    Ray degen{Configuration({{0, 0, 0}, {0, 0, 0}}), Configuration({{1, 0, 0}, {0, 1, 0}})};
    CHECK_THROWS_AS(
        scaling_exponent(pair, MultiIndex::on_electron(2, 1, {1, 0, 0}), degen, radii),
        DegenerateRay);
}

TEST_CASE("cluster derivative ratio stays bounded at intra-cluster coalescence") {
    auto pair = product_state({Orbital(OrbitalKind::GroundHydrogenic, 1.0),
                               Orbital(OrbitalKind::GroundHydrogenic, 1.0)});
    ClusterSet Q({1, 2}, 2);
    std::vector<Configuration> centers;
    for (double eps : geometric_radii(1e-1, 1e-4, 6))
        centers.push_back(Configuration({{1.0, eps, 0.0}, {1.0, 0.0, 0.0}}));
    auto table = verify_parallel(pair, Q, {1, 0, 0}, 2.0, 0.25, 0.5, centers, 400, 8);
    CHECK(table.pass);
    for (double lam : table.lambda) CHECK(lam > 0.5);
}

TEST_CASE("sup over small ball controlled by L2 over larger ball") {
    auto state = hydrogen_ground(1.0);
    std::vector<Configuration> centers = {one(0, 0, 0), one(0.3, 0, 0), one(1, 1, 0),
                                          one(0, 0, 2)};
    auto table = apriori_sup_ratio(state, centers, 0.5, 1.0, 4000, 19);
    CHECK(table.pass);
    for (double r : table.ratio) {
        CHECK(std::isfinite(r));
        CHECK(r > 0.0);
    }
}

TEST_CASE("weighted square-integrability thresholds bracket correctly") {
    auto state = hydrogen_ground(1.0);
    std::vector<double> eps;
    for (double e = 0.5; e >= 1e-6; e *= 0.5) eps.push_back(e);

    auto alpha2 = MultiIndex::on_electron(1, 1, {0, 2, 0});
    auto scan2 = weighted_sobolev_scan(state, alpha2, {2.3, 2.7}, eps);
    REQUIRE(scan2.size() == 2);
    CHECK(scan2[0].verdict == IntegrabilityVerdict::Convergent);
    CHECK(scan2[1].verdict == IntegrabilityVerdict::Divergent);

    auto scan0 = weighted_sobolev_scan(state, MultiIndex::zero(1), {1.3, 1.7}, eps);
    CHECK(scan0[0].verdict == IntegrabilityVerdict::Convergent);
    CHECK(scan0[1].verdict == IntegrabilityVerdict::Divergent);

    auto pair = product_state({Orbital(OrbitalKind::GroundHydrogenic, 1.0),
                               Orbital(OrbitalKind::GroundHydrogenic, 1.0)});
    CHECK_THROWS_AS(weighted_sobolev_scan(pair, MultiIndex::zero(2), {1.0}, eps),
                    MethodUnavailable);
}

TEST_CASE("rescaled coefficient fields and explicit derivative bound") {
    auto alpha = MultiIndex::on_electron(2, 1, {1, 0, 0});
    auto spec = PotentialSpec::atomic(1.0, 2);
    RegularizedSystem sys(JastrowVariant::by_alpha(alpha), spec, -0.5);

    Configuration x0({{0.5, 0.0, 0.0}, {5.0, 0.0, 0.0}});
    auto rs = rescaled_coefficients(sys, x0, alpha);
    CHECK(rs.lambda == Catch::Approx(0.5));

    // V^lambda(0) = lambda V_part(x0).
    std::vector<double> origin(6, 0.0);
    const auto x0f = x0.flat();
    CHECK(rs.V(std::span<const double>(origin)) ==
          Catch::Approx(0.5 * sys.V_part()(std::span<const double>(x0f))));

    // Explicit constant: gamma = 0 gives 16 sqrt2, |gamma| = 1 scales by 16.
    auto rep0 = rescaled_derivative_bound(sys, rs, MultiIndex::zero(2), 0.5);
    CHECK(rep0.bound == Catch::Approx(16.0 * std::sqrt(2.0)));
    CHECK(rep0.pass);
    auto rep1 = rescaled_derivative_bound(sys, rs, alpha, 0.5);
    CHECK(rep1.bound == Catch::Approx(256.0 * std::sqrt(2.0)));
    CHECK(rep1.pass);

    // Rescaled K and H keep the vanishing property in the alpha directions.
    std::vector<Configuration> ys;
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
        auto u = unit_ball_point(rng, 6);
        ys.push_back(Configuration::from_flat(u));
    }
    CHECK(rescaled_vanishing_check(rs, alpha, alpha, ys) <= 1e-10);
    CHECK_THROWS_AS(rescaled_vanishing_check(rs, alpha, MultiIndex::zero(2), ys), InvalidAlpha);

    Configuration on_sigma({{0.0, 0.0, 0.0}, {5.0, 0.0, 0.0}});
    CHECK_THROWS_AS(rescaled_coefficients(sys, on_sigma, alpha), OnSingularSet);
}

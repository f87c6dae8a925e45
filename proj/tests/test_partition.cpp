#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "coulreg/partition.hpp"

using namespace coulreg;

namespace {

Configuration random_nonzero_center(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (true) {
        std::vector<Vec3> p(n);
        for (int j = 0; j < n; ++j) {
            p[j] = {g(rng), g(rng), g(rng)};
            // Spread magnitudes over decades so every partition branch fires.
            p[j] = std::pow(10.0, -2.0 + 4.0 * u(rng)) * p[j];
        }
        Configuration x(p);
        if (norm(x[0]) > 1e-9) return x;
    }
}

}  // namespace

TEST_CASE("cutoff pair basics") {
    CHECK(CutoffPair::chi1(0.1) == 1.0);
    CHECK(CutoffPair::chi1(0.25) == 1.0);
    CHECK(CutoffPair::chi1(0.75) == 0.0);
    CHECK(CutoffPair::chi1(2.0) == 0.0);
    for (double t : {0.0, 0.3, 0.5, 0.7, 1.0})
        CHECK(CutoffPair::chi1(t) + CutoffPair::chi2(t) == Catch::Approx(1.0));
    // Monotone decreasing on a grid.
    double prev = 2.0;
    for (double t = 0.0; t <= 1.0; t += 0.01) {
        double v = CutoffPair::chi1(t);
        CHECK(v <= prev + 1e-15);
        CHECK((v >= 0.0 && v <= 1.0));
        prev = v;
    }
}

TEST_CASE("cutoff derivatives closed form vs jets") {
    for (double t0 : {0.3, 0.45, 0.6, 0.72}) {
        Jet t = Jet::variable(1, 4, 0, t0);
        Jet c = CutoffPair::chi1(t);
        for (int k = 0; k <= 4; ++k) {
            std::vector<int> e = {k};
            CHECK(c.derivative(e) == Catch::Approx(CutoffPair::chi1_derivative(t0, k)).margin(1e-10));
        }
    }
    // C^3 junctions: derivatives up to 3 vanish at the interval ends. The
    // third derivative has a simple zero there, so probe very close.
    for (int k = 1; k <= 3; ++k) {
        CHECK(CutoffPair::chi1_derivative(0.25, k) == 0.0);
        CHECK(CutoffPair::chi1_derivative(0.75, k) == 0.0);
        CHECK(CutoffPair::chi1_derivative(0.25 + 1e-12, k) == Catch::Approx(0.0).margin(1e-7));
        CHECK(CutoffPair::chi1_derivative(0.75 - 1e-12, k) == Catch::Approx(0.0).margin(1e-7));
    }
}

TEST_CASE("factor absorption on a grid") {
    for (int s = 1; s <= 4; ++s) {
        const double f = std::pow(4.0, s);
        for (double t = 0.0; t <= 2.0; t += 0.003) {
            double lhs = CutoffPair::chi1(f * t) * CutoffPair::chi1(f / 4.0 * t);
            CHECK(lhs == Catch::Approx(CutoffPair::chi1(f * t)).margin(1e-15));
        }
    }
}

TEST_CASE("generate_partition structure") {
    auto p1 = generate_partition(1);
    REQUIRE(p1.size() == 1);
    CHECK(p1[0].J == 0);
    CHECK(p1[0].P.empty());

    auto p2 = generate_partition(2);
    REQUIRE(p2.size() == 2);
    bool saw_j0 = false, saw_j1 = false;
    for (const auto& idx : p2) {
        if (idx.J == 0) {
            saw_j0 = true;
            CHECK(idx.P == std::vector<int>{2});
        }
        if (idx.J == 1) {
            saw_j1 = true;
            CHECK(idx.P.empty());
            REQUIRE(idx.Q.size() == 1);
            CHECK(idx.Q[0] == std::vector<int>{2});
        }
    }
    CHECK((saw_j0 && saw_j1));

    for (int n : {2, 3, 4, 5})
        for (const auto& idx : generate_partition(n)) CHECK(idx.valid(n));
}

TEST_CASE("chi_I support examples") {
    auto p2 = generate_partition(2);
    const PartitionIndex* j0 = nullptr;
    const PartitionIndex* j1 = nullptr;
    for (const auto& idx : p2) (idx.J == 0 ? j0 : j1) = &idx;
    REQUIRE((j0 && j1));
    auto at_ratio = [](double rho) {
        return Configuration({{1, 0, 0}, {0, rho, 0}});
    };
    CHECK(chi_I(at_ratio(0.1), *j0) == 1.0);
    CHECK(chi_I(at_ratio(0.1), *j1) == 0.0);
    CHECK(chi_I(at_ratio(10.0), *j0) == 0.0);
    CHECK(chi_I(at_ratio(10.0), *j1) == 1.0);
    double a = chi_I(at_ratio(0.5), *j0), b = chi_I(at_ratio(0.5), *j1);
    CHECK((a > 0.0 && a < 1.0));
    CHECK(a + b == Catch::Approx(1.0));
}

TEST_CASE("x1 at the origin is a hard error") {
    auto p2 = generate_partition(2);
    CHECK_THROWS_AS(chi_I(Configuration({{0, 0, 0}, {1, 0, 0}}), p2[0]),
                    CenterElectronAtOrigin);
}

TEST_CASE("sum to one") {
    std::mt19937_64 rng(71);
    for (int n : {2, 3, 4, 5}) {
        auto terms = generate_partition(n);
        double worst = 0.0;
        for (int trial = 0; trial < 500; ++trial) {
            auto x = random_nonzero_center(rng, n);
            double s = 0.0;
            for (const auto& idx : terms) s += chi_I(x, idx);
            worst = std::max(worst, std::abs(s - 1.0));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("chi values in [0,1] and smooth away from x1=0") {
    std::mt19937_64 rng(73);
    auto terms = generate_partition(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto x = random_nonzero_center(rng, 3);
        for (const auto& idx : terms) {
            double v = chi_I(x, idx);
            CHECK((v >= 0.0 && v <= 1.0));
            // Order-4 jet evaluation must succeed at generic points.
            auto f = chi_I_field(idx);
            CHECK_NOTHROW(partial_alpha(f, x, MultiIndex({1, 1, 2, 0, 0, 0, 0, 0, 0})));
        }
    }
}

TEST_CASE("chi tilde substitution") {
    auto p2 = generate_partition(2);
    const PartitionIndex* j1 = nullptr;
    const PartitionIndex* j0 = nullptr;
    for (const auto& idx : p2) (idx.J == 1 ? j1 : j0) = &idx;
    // All electrons in P: no shift.
    Configuration x({{1, 0, 0}, {0.3, 0.2, 0}});
    CHECK(chi_I_tilde(x, *j0) == Catch::Approx(chi_I(x, *j0)));
    // x2 = -x1 + u: the shifted factor sees |u|/|x1|.
    Vec3 u = {0.05, 0.02, 0.0};
    Configuration y({{1, 0, 0}, Vec3{-1, 0, 0} + u});
    CHECK(chi_I_tilde(y, *j1) == Catch::Approx(CutoffPair::chi2(norm(u) / 1.0)));
}

TEST_CASE("support control ratios") {
    auto p2 = generate_partition(2);
    for (const auto& idx : p2) {
        auto rep = verify_support_control(idx, 2, 2000, 911);
        CHECK(rep.pass);
        CHECK(rep.samples == 2000);
    }
    for (const auto& idx : generate_partition(3)) {
        auto rep = verify_support_control(idx, 3, 800, 913);
        CHECK(rep.pass);
    }
}

TEST_CASE("chi tilde derivative bounds are finite and stable") {
    auto p2 = generate_partition(2);
    for (const auto& idx : p2) {
        auto r1 = verify_chi_tilde_derivative_bounds(idx, 2, {1, 0, 0}, 400, 1, 917);
        auto r2 = verify_chi_tilde_derivative_bounds(idx, 2, {1, 0, 0}, 800, 1, 919);
        CHECK(std::isfinite(r1.sup_weighted));
        CHECK(std::isfinite(r2.sup_weighted));
        // Stability under doubling: same order of magnitude.
        if (r1.sup_weighted > 0)
            CHECK(r2.sup_weighted <= 10.0 * r1.sup_weighted + 1.0);
        CHECK(std::isfinite(r2.sup_weighted_xj));
    }
    // beta = 0 gives back chi values, bounded by 1.
    auto r0 = verify_chi_tilde_derivative_bounds(p2[0], 2, {0, 0, 0}, 200, 0, 921);
    CHECK(r0.sup_weighted <= 1.0 + 1e-12);
}

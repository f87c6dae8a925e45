#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "coulreg/finite_diff.hpp"
#include "coulreg/oracle.hpp"

using namespace coulreg;

TEST_CASE("hydrogen ground state values and eigenvalue") {
    auto h = hydrogen_ground(1.0);
    CHECK(h.value(Configuration({{1, 0, 0}})) == Catch::Approx(std::exp(-0.5)));
    CHECK(h.energy() == Catch::Approx(-0.25));
    CHECK(hydrogen_ground(2.0).energy() == Catch::Approx(-1.0));
}

TEST_CASE("product state energies and values") {
    auto s2 = product_state({Orbital(OrbitalKind::GroundHydrogenic, 1.0),
                             Orbital(OrbitalKind::GroundHydrogenic, 1.0)});
    CHECK(s2.energy() == Catch::Approx(-0.5));
    CHECK(s2.value(Configuration({{1, 0, 0}, {0, 1, 0}})) == Catch::Approx(std::exp(-1.0)));

    auto s3 = product_state({Orbital(OrbitalKind::GroundHydrogenic, 1.0),
                             Orbital(OrbitalKind::GroundHydrogenic, 1.0),
                             Orbital(OrbitalKind::GroundHydrogenic, 1.0)});
    CHECK(s3.energy() == Catch::Approx(-0.75));
}

TEST_CASE("eigen-residual at random points") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<OracleState> states;
    states.push_back(hydrogen_ground(1.0));
    states.push_back(hydrogen_ground(2.0));
    states.push_back(product_state({Orbital(OrbitalKind::GroundHydrogenic, 1.0),
                                    Orbital(OrbitalKind::Excited2s, 2.0)}));
    for (const auto& st : states) {
        const int n = st.electron_count();
        int done = 0;
        while (done < 30) {
            std::vector<Vec3> p(n);
            for (auto& v : p) v = {g(rng), g(rng), g(rng)};
            Configuration x(p);
            if (dist_to_sigma(x, st.spec()) < 0.05) continue;
            ++done;
            // Jet-computed Laplacian of the field must satisfy the equation.
            auto psi = st.field();
            double res = -laplacian(psi, x) + potential_value(st.spec(), x) * psi(x) -
                         st.energy() * psi(x);
            CHECK(std::abs(res) <= 1e-8 * (1.0 + std::abs(psi(x))));
        }
    }
}

TEST_CASE("2s orbital is a genuine second profile") {
    Orbital o(OrbitalKind::Excited2s, 1.0);
    CHECK(o.energy() == Catch::Approx(-1.0 / 16));
    // Node at r = 4/Z.
    CHECK(o.radial_value(4.0) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("exact_partial matches jets and closed forms") {
    auto h = hydrogen_ground(1.0);
    Configuration x01({{0.1, 0, 0}});
    CHECK(h.exact_partial(x01, MultiIndex({0, 2, 0})) ==
          Catch::Approx(-0.5 * std::exp(-0.05) / 0.1));
    CHECK(h.exact_partial(Configuration({{1, 0, 0}}), MultiIndex({1, 0, 0})) ==
          Catch::Approx(-0.5 * std::exp(-0.5)));

    auto s2 = product_state({Orbital(OrbitalKind::GroundHydrogenic, 1.0),
                             Orbital(OrbitalKind::Excited2s, 1.0)});
    std::mt19937_64 rng(33);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<MultiIndex> alphas = {MultiIndex({0, 0, 0, 1, 0, 0}),
                                      MultiIndex({2, 0, 0, 0, 0, 0}),
                                      MultiIndex({1, 1, 0, 0, 0, 1}),
                                      MultiIndex({0, 2, 1, 1, 0, 0}),
                                      MultiIndex::zero(2)};
    auto psi = s2.field();
    int done = 0;
    while (done < 20) {
        Configuration x({{g(rng), g(rng), g(rng)}, {g(rng), g(rng), g(rng)}});
        if (dist_to_sigma(x, s2.spec()) < 0.1) continue;
        ++done;
        for (const auto& a : alphas) {
            double exact = s2.exact_partial(x, a);
            double jet = partial_alpha(psi, x, a);
            CHECK(exact == Catch::Approx(jet).epsilon(1e-9).margin(1e-12));
        }
    }
    // alpha supported on electron 2 only factorizes.
    Configuration x({{0.7, -0.3, 0.2}, {0.4, 1.0, -0.8}});
    auto a2 = MultiIndex({0, 0, 0, 0, 1, 0});
    double lhs = s2.exact_partial(x, a2);
    double rhs = s2.orbitals()[0].value(x[0]) * s2.orbitals()[1].partial(x[1], {0, 1, 0});
    CHECK(lhs == Catch::Approx(rhs));
}

TEST_CASE("closed-form squared norms") {
    // Ground orbital, Z=1: integral of e^{-r} over R^3 is 8 pi.
    Orbital o(OrbitalKind::GroundHydrogenic, 1.0);
    CHECK(o.squared_norm() == Catch::Approx(8.0 * M_PI));
    auto s2 = product_state({o, o});
    CHECK(s2.squared_norm() == Catch::Approx(64.0 * M_PI * M_PI));
}

TEST_CASE("Monte Carlo normalization agrees with the closed form") {
    auto h = hydrogen_ground(1.0);
    std::mt19937_64 rng(55);
    std::normal_distribution<double> g(0.0, 2.5);
    const long n = 400000;
    double acc = 0.0;
    const double s = 2.5;
    for (long i = 0; i < n; ++i) {
        Vec3 x = {g(rng), g(rng), g(rng)};
        double pdf = std::exp(-dot(x, x) / (2 * s * s)) / std::pow(2 * M_PI * s * s, 1.5);
        double v = h.value(Configuration({x}));
        acc += v * v / pdf;
    }
    CHECK(acc / n == Catch::Approx(8.0 * M_PI).epsilon(0.01));
}

TEST_CASE("decay witness") {
    auto s2 = product_state({Orbital(OrbitalKind::GroundHydrogenic, 1.0),
                             Orbital(OrbitalKind::Excited2s, 1.0)});
    const double c0 = s2.decay_rate();
    CHECK(c0 > 0.0);
    std::mt19937_64 rng(66);
    std::normal_distribution<double> g(0.0, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        Configuration x({{g(rng), g(rng), g(rng)}, {g(rng), g(rng), g(rng)}});
        double r = 0.0;
        for (int j = 0; j < 2; ++j) r += dot(x[j], x[j]);
        r = std::sqrt(r);
        worst = std::max(worst, std::abs(s2.value(x)) * std::exp(c0 * r));
    }
    CHECK(worst < 50.0);
}

TEST_CASE("oracle construction rejects bad input") {
    CHECK_THROWS(product_state({Orbital(OrbitalKind::GroundHydrogenic, 1.0)}));
    // Nonzero pair couplings: products are not eigenfunctions.
    CHECK_THROWS(OracleState({Orbital(OrbitalKind::GroundHydrogenic, 1.0),
                              Orbital(OrbitalKind::GroundHydrogenic, 1.0)},
                             PotentialSpec::atomic(1.0, 2)));
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "coulreg/jastrow.hpp"
#include "coulreg/oracle.hpp"

using namespace coulreg;

namespace {

std::vector<Configuration> off_sigma_samples(const PotentialSpec& spec, int count,
                                             std::uint64_t seed, double dmin = 0.05) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Configuration> out;
    while (static_cast<int>(out.size()) < count) {
        std::vector<Vec3> p(spec.electron_count());
        for (auto& v : p) v = {g(rng), g(rng), g(rng)};
        Configuration x(p);
        if (dist_to_sigma(x, spec) >= dmin) out.push_back(std::move(x));
    }
    return out;
}

}  // namespace

TEST_CASE("field construction examples") {
    // All-smoothed variant, one electron at the origin limit: F(0) = Z/2.
    auto sysT = build_system(JastrowVariant::tilde(), PotentialSpec::atomic(1.0, 1), -0.25);
    std::vector<double> zero = {1e-9, 0, 0};
    CHECK(sysT.F()(std::span<const double>(zero)) == Catch::Approx(0.5).margin(1e-8));

    auto spec2 = PotentialSpec::atomic(1.0, 2);
    auto sysA =
        build_system(JastrowVariant::by_alpha(MultiIndex({1, 0, 0, 0, 0, 0})), spec2, -0.5);
    Configuration x({{0.8, 0.1, -0.3}, {-0.5, 0.6, 0.4}});
    auto flat = x.flat();
    std::span<const double> xs(flat);
    const double r1 = norm(x[0]), r2 = norm(x[1]), r12 = norm(x[0] - x[1]);
    CHECK(sysA.V_part()(xs) == Catch::Approx(-1.0 / r1 + 1.0 / r12));
    // F carries only the smoothed non-selected single term.
    CHECK(sysA.F()(xs) ==
          Catch::Approx(-0.5 * (r2 - std::sqrt(r2 * r2 + 1))));

    auto sysQ = build_system(JastrowVariant::by_cluster(ClusterSet({1, 2}, 2)), spec2, -0.5);
    CHECK(sysQ.V_part()(xs) == Catch::Approx(-1.0 / r1 - 1.0 / r2));
    // The pair term moved into F.
    CHECK(sysQ.F()(xs) == Catch::Approx(0.25 * (r12 - std::sqrt(r12 * r12 + 1))));
}

TEST_CASE("decomposition identity G = V - V_part - Delta F") {
    auto spec = PotentialSpec::atomic(1.3, 3);
    std::vector<RegularizedSystem> systems;
    systems.push_back(build_system(JastrowVariant::tilde(), spec, -1.0));
    systems.push_back(build_system(
        JastrowVariant::by_alpha(MultiIndex({0, 1, 0, 0, 0, 0, 0, 0, 1})), spec, -1.0));
    systems.push_back(build_system(JastrowVariant::by_cluster(ClusterSet({1, 3}, 3)), spec, -1.0));
    for (const auto& sys : systems) {
        for (const auto& x : off_sigma_samples(spec, 25, 91)) {
            auto flat = x.flat();
            std::span<const double> xs(flat);
            const double lhs = sys.G()(xs);
            const double rhs =
                potential_value(spec, x) - sys.V_part()(xs) - laplacian(sys.F(), x);
            CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(lhs)));
        }
    }
}

TEST_CASE("smoothing kernel Laplacian bounded by 3") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 2.0);
    auto smoother = make_field([](auto const& x) {
        using std::sqrt;
        return sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + 1.0);
    });
    for (int i = 0; i < 200; ++i) {
        Configuration u({{g(rng), g(rng), g(rng)}});
        CHECK(std::abs(laplacian(smoother, u)) <= 3.0 + 1e-12);
    }
}

TEST_CASE("vanishing derivatives for the ByAlpha fields") {
    auto spec = PotentialSpec::atomic(1.0, 2);
    auto alpha = MultiIndex({1, 0, 0, 0, 0, 0});
    auto sys = build_system(JastrowVariant::by_alpha(alpha), spec, -0.5);
    auto samples = off_sigma_samples(spec, 40, 19);
    CHECK(vanishing_derivative_check(sys, alpha, samples) <= 1e-10);

    auto alpha2 = MultiIndex({2, 1, 0, 0, 0, 0});
    auto sys2 = build_system(JastrowVariant::by_alpha(alpha2), spec, -0.5);
    for (auto beta : {MultiIndex({1, 0, 0, 0, 0, 0}), MultiIndex({0, 1, 0, 0, 0, 0}),
                      MultiIndex({2, 1, 0, 0, 0, 0}), MultiIndex({1, 1, 0, 0, 0, 0})})
        CHECK(vanishing_derivative_check(sys2, beta, samples) <= 1e-10);

    CHECK_THROWS_AS(vanishing_derivative_check(sys, MultiIndex({0, 0, 0, 0, 1, 0}), samples),
                    InvalidAlpha);
}

TEST_CASE("vanishing cluster derivatives for the ByCluster fields") {
    auto spec = PotentialSpec::atomic(1.0, 3);
    auto sys = build_system(JastrowVariant::by_cluster(ClusterSet({1, 2}, 3)), spec, -0.5);
    auto samples = off_sigma_samples(spec, 40, 23);
    for (std::array<int, 3> beta : {std::array<int, 3>{1, 0, 0}, {0, 2, 0}, {1, 1, 1}})
        CHECK(vanishing_derivative_check(sys, beta, samples) <= 1e-10);
}

TEST_CASE("Tilde variant rejected for vanishing checks") {
    auto sys = build_system(JastrowVariant::tilde(), PotentialSpec::atomic(1.0, 2), -0.5);
    auto samples = off_sigma_samples(sys.spec(), 3, 29);
    CHECK_THROWS_AS(vanishing_derivative_check(sys, MultiIndex({1, 0, 0, 0, 0, 0}), samples),
                    InvalidVariant);
}

TEST_CASE("transformed equation residuals") {
    auto h = hydrogen_ground(1.0);
    auto sysT = build_system(JastrowVariant::tilde(), h.spec(), h.energy());
    Configuration x({{0.5, 0.2, 0}});
    CHECK(sysT.residual(h.field(), x) <= 1e-8);

    auto s2 = product_state({Orbital(OrbitalKind::GroundHydrogenic, 1.0),
                             Orbital(OrbitalKind::GroundHydrogenic, 2.0)});
    auto sysA = build_system(JastrowVariant::by_alpha(MultiIndex({1, 0, 0, 0, 0, 0})), s2.spec(),
                             s2.energy());
    for (const auto& y : off_sigma_samples(s2.spec(), 20, 37))
        CHECK(sysA.residual(s2.field(), y) <= 1e-8);

    // Negative control: wrong profile fails loudly.
    auto wrong = make_field([](auto const& x) {
        using std::exp;
        using std::sqrt;
        return exp(-sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    });
    CHECK(sysT.residual(wrong, x) > 0.01);
}

TEST_CASE("round trip psi = e^{F} psi_F") {
    auto h = hydrogen_ground(2.0);
    auto sys = build_system(JastrowVariant::tilde(), h.spec(), h.energy());
    auto psiF = sys.transformed(h.field());
    for (const auto& x : off_sigma_samples(h.spec(), 30, 41)) {
        auto flat = x.flat();
        std::span<const double> xs(flat);
        double rebuilt = std::exp(sys.F()(xs)) * psiF(xs);
        CHECK(rebuilt == Catch::Approx(h.value(x)).epsilon(1e-12));
    }
}

TEST_CASE("sup bounds hold on samples") {
    auto spec = PotentialSpec::atomic(2.0, 3);
    auto sys = build_system(JastrowVariant::tilde(), spec, -1.0);
    for (const auto& x : off_sigma_samples(spec, 300, 43, 1e-4)) {
        auto flat = x.flat();
        std::span<const double> xs(flat);
        CHECK(std::abs(sys.F()(xs)) <= sys.sup_bound_F() + 1e-12);
        auto g = sys.grad_F(x);
        double gn = 0.0;
        for (double c : g) gn += c * c;
        CHECK(std::sqrt(gn) <= sys.sup_bound_gradF() + 1e-12);
        CHECK(std::abs(sys.K()(xs)) <= sys.sup_bound_K() + 1e-12);
    }
}

TEST_CASE("complex eigenvalue parameter flows through the residual") {
    auto h = hydrogen_ground(1.0);
    auto sys = build_system(JastrowVariant::tilde(), h.spec(), {-0.25, 0.1});
    Configuration x({{0.5, 0.2, 0}});
    // psi is an eigenfunction for E = -1/4, so the imaginary shift leaves
    // exactly |Im E| * |psi_F| behind.
    auto flat = x.flat();
    double expect =
        0.1 * std::exp(-sys.F()(std::span<const double>(flat))) * h.value(x);
    CHECK(sys.residual(h.field(), x) == Catch::Approx(expect).margin(1e-8));
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "coulreg/geometry.hpp"

using namespace coulreg;

namespace {

Configuration random_config(std::mt19937_64& rng, int n, double sigma = 1.0) {
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<Vec3> p(n);
    for (auto& v : p) v = {g(rng), g(rng), g(rng)};
    return Configuration(p);
}

}  // namespace

TEST_CASE("dist_to_sigma examples") {
    CHECK(dist_to_sigma(Configuration({{0.3, 0, 0}})) == Catch::Approx(0.3));
    Configuration x({{1, 0, 0}, {0, 2, 0}});
    CHECK(dist_to_sigma(x) == Catch::Approx(1.0));
    CHECK(dist_to_sigma(Configuration({{1, 1, 1}, {1, 1, 1}})) == 0.0);
}

TEST_CASE("dist_to_selected examples") {
    Configuration x({{1, 0, 0}, {0, 2, 0}});
    auto alpha2 = MultiIndex({0, 0, 0, 1, 0, 0});
    CHECK(dist_to_selected(x, SingularSelector::by_alpha(alpha2)) ==
          Catch::Approx(std::sqrt(5.0) / std::sqrt(2.0)));
    CHECK(dist_to_selected(x, SingularSelector::parallel_cluster(ClusterSet({1}, 2))) ==
          Catch::Approx(1.0));
    // No complement: only the |x_j| terms remain.
    CHECK(dist_to_selected(x, SingularSelector::parallel_cluster(ClusterSet({1, 2}, 2))) ==
          Catch::Approx(1.0));
}

TEST_CASE("ByAlpha selector rejects zero alpha") {
    CHECK_THROWS_AS(SingularSelector::by_alpha(MultiIndex::zero(2)), InvalidSelector);
}

TEST_CASE("lambda and radial regularizations") {
    CHECK(lambda_reg(0.3) == 0.3);
    CHECK(lambda_reg(7.0) == 1.0);
    CHECK(lambda_reg(1.0) == 1.0);
    CHECK(radial_reg({0.2, 0, 0}) == Catch::Approx(0.2));
    CHECK(radial_reg({3, 4, 0}) == 1.0);
    CHECK(radial_reg({0, 0, 0}) == 0.0);
}

TEST_CASE("distances are 1-Lipschitz") {
    std::mt19937_64 rng(101);
    auto spec = PotentialSpec::atomic(1.0, 3);
    auto alpha = MultiIndex({0, 1, 0, 0, 0, 0, 2, 0, 0});
    std::vector<SingularSelector> sels = {
        SingularSelector::full(), SingularSelector::by_alpha(alpha),
        SingularSelector::by_cluster_union(ClusterSet({2, 3}, 3)),
        SingularSelector::parallel_cluster(ClusterSet({1, 2}, 3))};
    for (int trial = 0; trial < 500; ++trial) {
        auto x = random_config(rng, 3);
        auto y = random_config(rng, 3);
        double dxy = 0.0;
        for (int j = 0; j < 3; ++j) {
            Vec3 dv = x[j] - y[j];
            dxy += dot(dv, dv);
        }
        dxy = std::sqrt(dxy);
        for (const auto& sel : sels) {
            double a = dist_to_selected(x, sel, spec);
            double b = dist_to_selected(y, sel, spec);
            CHECK(std::abs(a - b) <= dxy + 1e-12);
        }
    }
}

TEST_CASE("chain |x| >= d_alpha >= d") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 500; ++trial) {
        auto x = random_config(rng, 3);
        auto alpha = MultiIndex({0, 1, 0, 0, 0, 0, 1, 0, 0});
        double da = dist_to_selected(x, SingularSelector::by_alpha(alpha));
        double d = dist_to_sigma(x);
        double xnorm = 0.0;
        for (int j = 0; j < 3; ++j) xnorm += dot(x[j], x[j]);
        xnorm = std::sqrt(xnorm);
        CHECK(da >= d - 1e-15);
        CHECK(xnorm >= da - 1e-15);
    }
}

TEST_CASE("full-support alpha reduces to the whole singular set") {
    std::mt19937_64 rng(303);
    auto alpha = MultiIndex({1, 0, 0, 0, 2, 0, 0, 0, 1});
    for (int trial = 0; trial < 200; ++trial) {
        auto x = random_config(rng, 3);
        CHECK(dist_to_selected(x, SingularSelector::by_alpha(alpha)) ==
              Catch::Approx(dist_to_sigma(x)));
    }
}

TEST_CASE("molecular distance uses nearest nucleus") {
    auto spec = PotentialSpec::molecular({{1.0, {0, 0, 0}}, {1.0, {4, 0, 0}}}, 1);
    CHECK(dist_to_sigma(Configuration({{3.5, 0, 0}}), spec) == Catch::Approx(0.5));
}

TEST_CASE("closed-form distance matches brute-force sampling of the variety") {
    std::mt19937_64 rng(404);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(trial % 2);
        auto x = random_config(rng, n);
        double d = dist_to_sigma(x);
        if (d < 1e-3) continue;
        // Sample points on each stratum of the variety, free coordinates
        // drawn near x so the minimum concentrates.
        double best = std::numeric_limits<double>::infinity();
        auto sample_near = [&](const Vec3& c, double s) -> Vec3 {
            return {c[0] + s * g(rng), c[1] + s * g(rng), c[2] + s * g(rng)};
        };
        for (int it = 0; it < 20000; ++it) {
            std::vector<Vec3> y(x.positions());
            double s = 0.3 * d * std::abs(g(rng));
            for (int j = 0; j < n; ++j) y[j] = sample_near(x[j], 0.2 * s);
            int stratum = static_cast<int>(rng() % (n + n * (n - 1) / 2));
            if (stratum < n) {
                y[stratum] = {0, 0, 0};
            } else {
                int k = stratum - n;
                int i = 0, j = 1;
                for (i = 0; i < n; ++i) {
                    int row = n - 1 - i;
                    if (k < row) {
                        j = i + 1 + k;
                        break;
                    }
                    k -= row;
                }
                Vec3 mid = 0.5 * (y[i] + y[j]);
                y[i] = sample_near(mid, 0.05 * s);
                y[j] = y[i];
            }
            double dist = 0.0;
            for (int j = 0; j < n; ++j) {
                Vec3 dv = x[j] - y[j];
                dist += dot(dv, dv);
            }
            best = std::min(best, std::sqrt(dist));
        }
        CHECK(best >= d - 1e-12);
        CHECK(best <= d * 1.08);
    }
}

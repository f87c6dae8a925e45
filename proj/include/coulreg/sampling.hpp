#ifndef COULREG_SAMPLING_HPP
#define COULREG_SAMPLING_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "coulreg/orbital.hpp"
#include "coulreg/types.hpp"

namespace coulreg {

/// Deterministic substream derivation: one master seed, stable per-task
/// streams regardless of evaluation order.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Uniform point in the unit ball of R^dim (Gaussian direction + radial law).
inline std::vector<double> unit_ball_point(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(dim);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (double& c : x) {
            c = g(rng);
            n2 += c * c;
        }
    } while (n2 == 0.0);
    const double r = std::pow(u(rng), 1.0 / dim) / std::sqrt(n2);
    for (double& c : x) c *= r;
    return x;
}

/// Volume of the unit ball in R^dim.
inline double unit_ball_volume(int dim) {
    return std::pow(M_PI, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

/// Halton low-discrepancy sequence point (index >= 0), dim <= 10.
inline std::vector<double> halton_point(long index, int dim) {
    static const int primes[10] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    if (dim > 10) throw Error("halton_point: dim too large");
    std::vector<double> x(dim);
    for (int d = 0; d < dim; ++d) {
        const int b = primes[d];
        double f = 1.0, r = 0.0;
        long i = index + 1;
        while (i > 0) {
            f /= b;
            r += f * (i % b);
            i /= b;
        }
        x[d] = r;
    }
    return x;
}

/// Quasi-random point in the unit ball of R^3 from a Halton triple.
inline Vec3 halton_ball3(long index) {
    auto h = halton_point(index, 3);
    const double r = std::cbrt(h[0]);
    const double ct = 2.0 * h[1] - 1.0;
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double ph = 2.0 * M_PI * h[2];
    return {r * st * std::cos(ph), r * st * std::sin(ph), r * ct};
}

/// Sample x in R^3 with density proportional to |phi(x)|^2 for a hydrogenic
/// orbital: gamma radial law for the ground state, rejection from a gamma
/// mixture for the 2s profile.
inline Vec3 sample_orbital_sq(std::mt19937_64& rng, const Orbital& o) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double c = 2.0 * o.rate();
    double r;
    if (o.kind() == OrbitalKind::GroundHydrogenic) {
        std::gamma_distribution<double> gamma(3.0, 1.0 / c);
        r = gamma(rng);
    } else {
        // |poly|^2 r^2 <= r^2 (1 + (b r)^2) with b = rate: mixture of
        // Gamma(3) and Gamma(5) envelopes, acceptance (1-br)^2/(1+(br)^2).
        const double b = o.rate();
        // Mixture weights from the envelope integrals against e^{-cr}.
        const double w3 = 2.0 / std::pow(c, 3);
        const double w5 = b * b * 24.0 / std::pow(c, 5);
        std::gamma_distribution<double> g3(3.0, 1.0 / c), g5(5.0, 1.0 / c);
        while (true) {
            r = (u(rng) * (w3 + w5) < w3) ? g3(rng) : g5(rng);
            const double br = b * r;
            const double accept = (1.0 - br) * (1.0 - br) / (1.0 + br * br);
            if (u(rng) < accept) break;
        }
    }
    Vec3 dir = {g(rng), g(rng), g(rng)};
    double n = norm(dir);
    if (n == 0.0) n = 1.0;
    return (r / n) * dir;
}

}  // namespace coulreg

#endif

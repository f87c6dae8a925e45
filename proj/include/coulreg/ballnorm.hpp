#ifndef COULREG_BALLNORM_HPP
#define COULREG_BALLNORM_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "coulreg/field.hpp"
#include "coulreg/sampling.hpp"

namespace coulreg {

inline constexpr double kPInfinity = std::numeric_limits<double>::infinity();

struct BallNormEstimate {
    std::vector<double> center;  // flat 3N
    double radius = 0.0;
    double p = 2.0;
    double value = 0.0;
    double std_error = 0.0;  // 0 for p = infinity (sample max, a lower bound)
    long samples = 0;
    std::uint64_t seed = 0;
};

/// L^p norm of |f| over the ball B(center, radius) in R^{3N} by Monte Carlo
/// volume quadrature (p < inf) or sample max (p = inf). Integrand evaluations
/// that land on the singular set are resampled.
inline BallNormEstimate ball_lp_norm(const std::function<double(const std::vector<double>&)>& f,
                                     const std::vector<double>& center, double radius, double p,
                                     long budget, std::uint64_t seed) {
    if (radius <= 0) throw Error("ball_lp_norm: radius > 0 required");
    if (!(p > 1.0)) throw Error("ball_lp_norm: p in (1, inf] required");
    const int dim = static_cast<int>(center.size());
    std::mt19937_64 rng(seed);
    BallNormEstimate est;
    est.center = center;
    est.radius = radius;
    est.p = p;
    est.seed = seed;
    double acc = 0.0, acc2 = 0.0, vmax = 0.0;
    long got = 0, rejected = 0;
    std::vector<double> y(dim);
    while (got < budget) {
        if (rejected > 100 * budget + 1000) throw BudgetExhausted("ball_lp_norm: resampling budget");
        auto u = unit_ball_point(rng, dim);
        for (int i = 0; i < dim; ++i) y[i] = center[i] + radius * u[i];
        double v;
        try {
            v = std::abs(f(y));
        } catch (const NonSmoothPoint&) {
            ++rejected;
            continue;
        } catch (const SingularEvaluation&) {
            ++rejected;
            continue;
        }
        ++got;
        if (p == kPInfinity) {
            vmax = std::max(vmax, v);
        } else {
            const double w = std::pow(v, p);
            acc += w;
            acc2 += w * w;
        }
    }
    est.samples = got;
    if (p == kPInfinity) {
        est.value = vmax;
        est.std_error = 0.0;
        return est;
    }
    const double vol = unit_ball_volume(dim) * std::pow(radius, dim);
    const double mean = acc / got;
    const double var = std::max(0.0, acc2 / got - mean * mean);
    const double integral = vol * mean;
    est.value = std::pow(integral, 1.0 / p);
    // First-order error propagation through t -> t^{1/p}.
    const double int_se = vol * std::sqrt(var / got);
    est.std_error = integral > 0 ? est.value * int_se / (p * integral) : int_se;
    return est;
}

inline BallNormEstimate ball_lp_norm(const ScalarField& f, const std::vector<double>& center,
                                     double radius, double p, long budget, std::uint64_t seed) {
    return ball_lp_norm(
        [&f](const std::vector<double>& y) { return f(std::span<const double>(y)); }, center,
        radius, p, budget, seed);
}

}  // namespace coulreg

#endif

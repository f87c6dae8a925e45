#ifndef COULREG_FINITE_DIFF_HPP
#define COULREG_FINITE_DIFF_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "coulreg/field.hpp"
#include "coulreg/geometry.hpp"

namespace coulreg {

struct FdEstimate {
    double value;
    double error;  // extrapolation-based error estimate
};

namespace detail {

/// Central stencil for the n-th derivative, second-order accurate:
/// offsets (n/2 - i)h, weights (-1)^i C(n,i), i = 0..n.
inline void central_stencil(int n, std::vector<double>& offsets, std::vector<double>& weights) {
    offsets.resize(n + 1);
    weights.resize(n + 1);
    double c = 1.0;
    for (int i = 0; i <= n; ++i) {
        offsets[i] = 0.5 * n - i;
        weights[i] = (i % 2 == 0) ? c : -c;
        c = c * (n - i) / (i + 1);
    }
}

inline double fd_once(const ScalarField& f, const std::vector<double>& x, const MultiIndex& alpha,
                      double h) {
    std::vector<int> coords;
    for (std::size_t c = 0; c < x.size(); ++c)
        if (alpha[c] > 0) coords.push_back(static_cast<int>(c));
    // Tensor product of per-coordinate stencils.
    std::vector<std::vector<double>> offs(coords.size()), wts(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
        central_stencil(alpha[coords[i]], offs[i], wts[i]);
    std::vector<double> y = x;
    double sum = 0.0;
    std::vector<std::size_t> idx(coords.size(), 0);
    while (true) {
        double w = 1.0;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            y[coords[i]] = x[coords[i]] + offs[i][idx[i]] * h;
            w *= wts[i][idx[i]];
        }
        sum += w * f(std::span<const double>(y));
        std::size_t k = 0;
        for (; k < coords.size(); ++k) {
            if (++idx[k] < offs[k].size()) break;
            idx[k] = 0;
        }
        if (k == coords.size()) break;
    }
    return sum / std::pow(h, alpha.order());
}

}  // namespace detail

/// Central finite differences with Richardson extrapolation over steps
/// {h0, h0/2, h0/4}. Independent of the jet engine; used as its oracle.
/// If a potential spec is given, the stencil is checked against the singular
/// set before any evaluation.
inline FdEstimate fd_cross_check(const ScalarField& f, const Configuration& x,
                                 const MultiIndex& alpha, double h0,
                                 const std::optional<PotentialSpec>& guard = std::nullopt) {
    if (alpha.order() == 0) {
        double v = f(x);
        return {v, 0.0};
    }
    if (guard) {
        int max_per_coord = 0;
        for (int v : alpha.entries()) max_per_coord = std::max(max_per_coord, v);
        const double reach = 0.5 * max_per_coord * h0 * std::sqrt(3.0 * alpha.support().size());
        if (dist_to_sigma(x, *guard) <= reach)
            throw StepTooLarge("fd_cross_check: stencil crosses the singular set");
    }
    const auto flat = x.flat();
    const double d1 = detail::fd_once(f, flat, alpha, h0);
    const double d2 = detail::fd_once(f, flat, alpha, h0 / 2);
    const double d3 = detail::fd_once(f, flat, alpha, h0 / 4);
    const double r1 = (4.0 * d2 - d1) / 3.0;
    const double r2 = (4.0 * d3 - d2) / 3.0;
    const double r3 = (16.0 * r2 - r1) / 15.0;
    const double scale = std::max({std::abs(d3), std::abs(r2), 1.0});
    const double err = std::abs(r2 - r1) / 15.0 + std::abs(r3 - r2) +
                       scale * 64.0 * 1e-16 / std::pow(h0 / 4, alpha.order());
    return {r3, err};
}

}  // namespace coulreg

#endif

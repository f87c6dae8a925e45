#ifndef COULREG_STATS_HPP
#define COULREG_STATS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "coulreg/errors.hpp"

namespace coulreg {

struct LineFit {
    double slope;
    double intercept;
    double slope_stderr;
};

/// Least-squares line through (x_i, y_i).
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw Error("fit_line: need at least two points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw Error("fit_line: degenerate abscissae");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - slope * x[i] - intercept;
        rss += r * r;
    }
    const double se = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
    return {slope, intercept, se};
}

/// Kendall rank correlation between two samples (O(n^2), n is small here).
inline double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw Error("kendall_tau: need at least two points");
    long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = (x[i] - x[j]) * (y[i] - y[j]);
            if (s > 0)
                ++concordant;
            else if (s < 0)
                ++discordant;
        }
    const double total = 0.5 * n * (n - 1);
    return (concordant - discordant) / total;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw Error("median: empty");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double max_of(const std::vector<double>& v) {
    if (v.empty()) throw Error("max_of: empty");
    return *std::max_element(v.begin(), v.end());
}

}  // namespace coulreg

#endif

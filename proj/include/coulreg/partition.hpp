#ifndef COULREG_PARTITION_HPP
#define COULREG_PARTITION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "coulreg/field.hpp"
#include "coulreg/types.hpp"

namespace coulreg {

/// chi1/chi2 cutoff pair: chi1 = 1 on t <= 1/4, 0 on t >= 3/4, degree-7
/// polynomial smoothstep in between (C^3 junctions, all derivatives closed
/// form), chi2 = 1 - chi1.
class CutoffPair {
  public:
    static constexpr double lo = 0.25;
    static constexpr double hi = 0.75;

    /// chi1 and its derivatives lifted through jets: polynomial composition
    /// with the scaled smoothstep on the transition interval.
    template <class T>
    static T chi1(const T& t) {
        const double t0 = value_of(t);
        if (t0 <= lo) return 0.0 * t + 1.0;
        if (t0 >= hi) return 0.0 * t;
        T u = (t - lo) / (hi - lo);
        // 1 - (35u^4 - 84u^5 + 70u^6 - 20u^7)
        T u2 = u * u;
        T u4 = u2 * u2;
        return 1.0 - u4 * (35.0 + u * (-84.0 + u * (70.0 - u * 20.0)));
    }

    template <class T>
    static T chi2(const T& t) {
        return 1.0 - chi1(t);
    }

    /// k-th derivative of chi1 at t (closed form; 0 outside the transition).
    static double chi1_derivative(double t, int k) {
        if (k == 0) return chi1(t);
        if (t <= lo || t >= hi) return 0.0;
        // chi1(t) = 1 - S((t-lo)/w); polynomial S of degree 7.
        static const double S[8] = {0, 0, 0, 0, 35, -84, 70, -20};
        const double w = hi - lo;
        const double u = (t - lo) / w;
        double s = 0.0;
        for (int p = k; p <= 7; ++p) {
            double c = S[p];
            for (int q = 0; q < k; ++q) c *= (p - q);
            s += c * std::pow(u, p - k);
        }
        return -s / std::pow(w, k);
    }

  private:
    static double value_of(double t) { return t; }
    static double value_of(const Jet& t) { return t.value(); }
};

/// One term of the Appendix-B partition: I = (J, P_J, Q_{J-1}, ..., Q_0).
/// The sets partition {2,..,N} (1-based electron labels).
struct PartitionIndex {
    int J = 0;
    std::vector<int> P;               // P_J, may be empty for J >= 1
    std::vector<std::vector<int>> Q;  // Q[s] = Q_s for s = 0..J-1

    int n() const {
        int m = 1 + static_cast<int>(P.size());
        for (const auto& q : Q) m += static_cast<int>(q.size());
        return m;
    }

    bool valid(int N) const {
        if (J < 0 || static_cast<int>(Q.size()) != J) return false;
        std::vector<int> seen;
        auto take = [&](const std::vector<int>& s) {
            for (int j : s) {
                if (j < 2 || j > N) return false;
                if (std::find(seen.begin(), seen.end(), j) != seen.end()) return false;
                seen.push_back(j);
            }
            return true;
        };
        if (!take(P)) return false;
        for (const auto& q : Q)
            if (!take(q)) return false;
        if (static_cast<int>(seen.size()) != N - 1) return false;
        if (J == 0 && static_cast<int>(P.size()) != N - 1) return false;
        return true;
    }
};

namespace detail {

inline void subsets_of(const std::vector<int>& s,
                       const std::function<void(std::vector<int>, std::vector<int>)>& visit) {
    const int m = static_cast<int>(s.size());
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> in, out;
        for (int i = 0; i < m; ++i)
            ((mask >> i) & 1u ? in : out).push_back(s[i]);
        visit(std::move(in), std::move(out));
    }
}

/// Recursion from the partition lemma's proof: repeatedly split the current
/// inner set p into (p_s, q_s); q_s = {} terminates with (s, p, ...), p_s = {}
/// terminates with (s+1, {}, q_s = p, ...).
inline void expand(int s, const std::vector<int>& p, const std::vector<std::vector<int>>& qs,
                   std::vector<PartitionIndex>& out) {
    subsets_of(p, [&](std::vector<int> ps, std::vector<int> q_s) {
        if (q_s.empty()) {
            PartitionIndex idx;
            idx.J = s;
            idx.P = p;
            idx.Q = qs;
            std::reverse(idx.Q.begin(), idx.Q.end());  // qs held newest-first
            out.push_back(std::move(idx));
            return;
        }
        if (ps.empty()) {
            PartitionIndex idx;
            idx.J = s + 1;
            idx.P = {};
            auto q = qs;
            q.insert(q.begin(), q_s);
            idx.Q = q;
            std::reverse(idx.Q.begin(), idx.Q.end());
            out.push_back(std::move(idx));
            return;
        }
        auto q = qs;
        q.insert(q.begin(), q_s);
        expand(s + 1, ps, q, out);
    });
}

}  // namespace detail

/// All partition terms for N electrons, generated by the constructive
/// recursion. N=1 yields the single empty-product term.
inline std::vector<PartitionIndex> generate_partition(int N) {
    if (N < 1) throw UnsupportedN("generate_partition: N >= 1 required");
    std::vector<PartitionIndex> out;
    if (N == 1) {
        out.push_back(PartitionIndex{});
        return out;
    }
    std::vector<int> all;
    for (int j = 2; j <= N; ++j) all.push_back(j);
    detail::expand(0, all, {}, out);
    for (const auto& idx : out)
        if (!idx.valid(N)) throw Error("generate_partition: invalid index generated");
    return out;
}

inline double value_of(double t) { return t; }
inline double value_of(const Jet& t) { return t.value(); }

/// chi_I(x): product over the prescribed cutoff factors in |x_j|/|x_1|.
/// Templated so jets pass through; x is the flat 3N coordinate list.
template <class T>
T chi_I_eval(std::span<const T> x, const PartitionIndex& I) {
    using std::sqrt;
    T r1 = sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (!(value_of(r1) > 0.0)) throw CenterElectronAtOrigin("chi_I: |x_1| = 0");
    T out = 0.0 * x[0] + 1.0;
    auto ratio = [&](int j) {  // |x_j|/|x_1|, j 1-based
        T rj = sqrt(x[3 * (j - 1)] * x[3 * (j - 1)] + x[3 * (j - 1) + 1] * x[3 * (j - 1) + 1] +
                    x[3 * (j - 1) + 2] * x[3 * (j - 1) + 2]);
        return rj / r1;
    };
    const double fourJ = std::pow(4.0, I.J);
    for (int j : I.P) out = out * CutoffPair::chi1(fourJ * ratio(j));
    for (int s = 0; s < static_cast<int>(I.Q.size()); ++s) {
        const double four_s = std::pow(4.0, s);
        for (int j : I.Q[s]) {
            T t = ratio(j);
            out = out * CutoffPair::chi2(four_s * t);
            if (s >= 1) out = out * CutoffPair::chi1((four_s / 4.0) * t);
        }
    }
    return out;
}

inline double chi_I(const Configuration& x, const PartitionIndex& I) {
    auto flat = x.flat();
    return chi_I_eval(std::span<const double>(flat), I);
}

inline ScalarField chi_I_field(const PartitionIndex& I) {
    return make_field([I](auto const& x) { return chi_I_eval(x, I); });
}

/// Shifted variant: chi_I evaluated at x~ with x~_j = x_1 + x_j for every
/// j outside {1} union P_J.
template <class T>
T chi_I_tilde_eval(std::span<const T> x, const PartitionIndex& I) {
    std::vector<T> shifted(x.begin(), x.end());
    const int n = static_cast<int>(x.size() / 3);
    for (int j = 2; j <= n; ++j) {
        if (std::find(I.P.begin(), I.P.end(), j) != I.P.end()) continue;
        for (int s = 0; s < 3; ++s) shifted[3 * (j - 1) + s] += x[s];
    }
    return chi_I_eval(std::span<const T>(shifted), I);
}

inline double chi_I_tilde(const Configuration& x, const PartitionIndex& I) {
    auto flat = x.flat();
    return chi_I_tilde_eval(std::span<const double>(flat), I);
}

inline ScalarField chi_I_tilde_field(const PartitionIndex& I) {
    return make_field([I](auto const& x) { return chi_I_tilde_eval(x, I); });
}

struct SupportControlReport {
    double max_center_over_xj = 0.0;       // |x_1| / |x_j|, j in any Q_s
    double max_center_over_diff1j = 0.0;   // |x_1| / |x_1 - x_j|
    double max_center_over_diffjk = 0.0;   // |x_1| / |x_j - x_k|, j in P, k in any Q
    double bound = 0.0;                    // 4^{N+1}
    bool pass = false;
    long samples = 0;
};

/// Rejection-sample supp chi_I and record the worst comparability ratios.
inline SupportControlReport verify_support_control(const PartitionIndex& I, int N, long samples,
                                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SupportControlReport rep;
    rep.bound = std::pow(4.0, N + 1);
    std::vector<int> inQ;
    for (const auto& q : I.Q) inQ.insert(inQ.end(), q.begin(), q.end());
    long got = 0, tries = 0;
    while (got < samples) {
        if (++tries > 1000000L + 100L * samples)
            throw EmptySupportSample("verify_support_control: rejection sampling failed");
        // Draw x_1 at random scale, others at ratios covering the support
        // window of their factors.
        std::vector<Vec3> p(N);
        const double scale = std::exp(2.0 * g(rng));
        Vec3 dir1 = {g(rng), g(rng), g(rng)};
        double n1 = norm(dir1);
        if (n1 == 0.0) continue;
        p[0] = (scale / n1) * dir1;
        for (int j = 2; j <= N; ++j) {
            double ratio;
            if (std::find(I.P.begin(), I.P.end(), j) != I.P.end()) {
                ratio = u(rng) * 0.8 * std::pow(4.0, -I.J);
            } else {
                int s = 0;
                for (int t = 0; t < static_cast<int>(I.Q.size()); ++t)
                    if (std::find(I.Q[t].begin(), I.Q[t].end(), j) != I.Q[t].end()) s = t;
                const double lo = 0.2 * std::pow(4.0, -s);
                const double hi = (s >= 1) ? 0.8 * std::pow(4.0, -(s - 1)) : 8.0;
                ratio = lo + u(rng) * (hi - lo);
            }
            Vec3 dj = {g(rng), g(rng), g(rng)};
            double nj = norm(dj);
            if (nj == 0.0) nj = 1.0;
            p[j - 1] = (ratio * scale / nj) * dj;
        }
        Configuration x(p);
        if (chi_I(x, I) <= 0.0) continue;
        ++got;
        ++rep.samples;
        const double r1 = norm(p[0]);
        for (int j : inQ) {
            rep.max_center_over_xj = std::max(rep.max_center_over_xj, r1 / norm(p[j - 1]));
            rep.max_center_over_diff1j =
                std::max(rep.max_center_over_diff1j, r1 / norm(p[0] - p[j - 1]));
        }
        for (int j : I.P) {
            rep.max_center_over_diff1j =
                std::max(rep.max_center_over_diff1j, r1 / norm(p[0] - p[j - 1]));
            for (int k : inQ)
                rep.max_center_over_diffjk =
                    std::max(rep.max_center_over_diffjk, r1 / norm(p[j - 1] - p[k - 1]));
        }
    }
    rep.pass = rep.max_center_over_xj <= rep.bound && rep.max_center_over_diff1j <= rep.bound &&
               rep.max_center_over_diffjk <= rep.bound;
    return rep;
}

struct ChiTildeDerivativeReport {
    double sup_weighted = 0.0;        // sup |d^beta_{x1} chi~_I| |x_1|^{|beta|}
    double sup_weighted_xj = 0.0;     // sup |d^beta_{x1} chi~_I| |x_j|^n |x_1|^{|beta|-n}
    long samples = 0;
};

/// Empirical sup of the Lemma-B.3-type weighted derivative bounds, sampled
/// over supp chi~_I with x_1 scales spread over several decades.
inline ChiTildeDerivativeReport verify_chi_tilde_derivative_bounds(const PartitionIndex& I, int N,
                                                                   const std::array<int, 3>& beta,
                                                                   long samples, int n_weight,
                                                                   std::uint64_t seed) {
    if (beta[0] + beta[1] + beta[2] > 4)
        throw InvalidAlpha("verify_chi_tilde_derivative_bounds: |beta| <= 4");
    if (n_weight > 3) throw InvalidAlpha("verify_chi_tilde_derivative_bounds: n <= 3");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ChiTildeDerivativeReport rep;
    const int border = beta[0] + beta[1] + beta[2];
    // Weighted electron: first shifted electron if one exists.
    int jw = 0;
    for (int j = 2; j <= N; ++j)
        if (std::find(I.P.begin(), I.P.end(), j) == I.P.end()) {
            jw = j;
            break;
        }
    long got = 0, tries = 0;
    while (got < samples) {
        if (++tries > 1000000L + 100L * samples)
            throw EmptySupportSample("verify_chi_tilde_derivative_bounds: sampling failed");
        std::vector<Vec3> p(N);
        const double scale = std::pow(10.0, -3.0 + 6.0 * u(rng));
        for (int j = 0; j < N; ++j) {
            p[j] = {g(rng), g(rng), g(rng)};
            double f = (j == 0) ? scale / norm(p[j]) : scale * std::exp(1.5 * g(rng));
            p[j] = f * p[j];
        }
        Configuration x(p);
        double v = chi_I_tilde(x, I);
        if (v <= 0.0 && u(rng) < 0.8) continue;  // mostly sample the support
        // d^beta in x_1 alone: the shifted coordinates depend on x_1, so the
        // multi-index lives on electron 1 of the tilde field.
        ScalarField f = chi_I_tilde_field(I);
        MultiIndex b = MultiIndex::on_electron(N, 1, beta);
        double der;
        try {
            der = partial_alpha(f, x, b);
        } catch (const NonSmoothPoint&) {
            continue;
        }
        ++got;
        ++rep.samples;
        const double r1 = norm(p[0]);
        rep.sup_weighted = std::max(rep.sup_weighted, std::abs(der) * std::pow(r1, border));
        if (jw > 0 && n_weight > 0) {
            const double rj = norm(p[jw - 1]);
            rep.sup_weighted_xj =
                std::max(rep.sup_weighted_xj,
                         std::abs(der) * std::pow(rj, n_weight) * std::pow(r1, border - n_weight));
        }
    }
    return rep;
}

}  // namespace coulreg

#endif

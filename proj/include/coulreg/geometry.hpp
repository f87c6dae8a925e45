#ifndef COULREG_GEOMETRY_HPP
#define COULREG_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "coulreg/types.hpp"

namespace coulreg {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// Which singular subset a distance refers to.
///  Full            the whole coalescence set
///  ByAlpha         singularities involving the support electrons of alpha
///  ByClusterUnion  same selection rule with an explicit electron set
///  ParallelCluster the parallel set: only cluster-vs-origin and
///                  cluster-vs-complement coalescences; intra-cluster
///                  coalescences excluded
class SingularSelector {
  public:
    enum class Kind { Full, ByAlpha, ByClusterUnion, ParallelCluster };

    static SingularSelector full() { return SingularSelector(Kind::Full, {}); }
    static SingularSelector by_alpha(const MultiIndex& alpha) {
        auto q = alpha.support();
        if (q.empty()) throw InvalidSelector("ByAlpha selector needs |alpha| >= 1");
        return SingularSelector(Kind::ByAlpha, std::move(q));
    }
    static SingularSelector by_cluster_union(const ClusterSet& Q) {
        return SingularSelector(Kind::ByClusterUnion, Q.members());
    }
    static SingularSelector parallel_cluster(const ClusterSet& Q) {
        return SingularSelector(Kind::ParallelCluster, Q.members());
    }

    Kind kind() const { return kind_; }
    const std::vector<int>& electrons() const { return q_; }
    bool contains(int j) const { return std::find(q_.begin(), q_.end(), j) != q_.end(); }

  private:
    SingularSelector(Kind k, std::vector<int> q) : kind_(k), q_(std::move(q)) {}
    Kind kind_;
    std::vector<int> q_;
};

namespace detail {

/// Distance from x_j to the nearest attractive center (origin, or nearest
/// nucleus in the molecular case).
inline double center_distance(const PotentialSpec& spec, const Vec3& xj) {
    if (spec.is_molecular()) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& nuc : std::get<MolecularPotential>(spec.variant()).nuclei)
            best = std::min(best, norm(xj - nuc.R));
        return best;
    }
    return norm(xj);
}

}  // namespace detail

/// d(x, Sigma): min over all |x_i| (or nearest-nucleus distances) and all
/// (1/sqrt2)|x_j - x_k|. Total function; 0 exactly on Sigma.
inline double dist_to_sigma(const Configuration& x, const PotentialSpec& spec) {
    const std::size_t n = x.electron_count();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, detail::center_distance(spec, x[i]));
        for (std::size_t j = i + 1; j < n; ++j)
            best = std::min(best, kInvSqrt2 * norm(x[i] - x[j]));
    }
    return best;
}

inline double dist_to_sigma(const Configuration& x) {
    return dist_to_sigma(x, PotentialSpec::atomic(1.0, static_cast<int>(x.electron_count())));
}

inline double dist_to_selected(const Configuration& x, const SingularSelector& sel,
                               const PotentialSpec& spec) {
    const int n = static_cast<int>(x.electron_count());
    if (sel.kind() == SingularSelector::Kind::Full) return dist_to_sigma(x, spec);
    double best = std::numeric_limits<double>::infinity();
    if (sel.kind() == SingularSelector::Kind::ParallelCluster) {
        for (int j : sel.electrons()) {
            best = std::min(best, detail::center_distance(spec, x[j - 1]));
            for (int k = 1; k <= n; ++k)
                if (!sel.contains(k))
                    best = std::min(best, kInvSqrt2 * norm(x[j - 1] - x[k - 1]));
        }
        return best;
    }
    // ByAlpha / ByClusterUnion: all singularities involving a selected electron.
    for (int k : sel.electrons()) {
        best = std::min(best, detail::center_distance(spec, x[k - 1]));
        for (int j = 1; j <= n; ++j)
            if (j != k) best = std::min(best, kInvSqrt2 * norm(x[k - 1] - x[j - 1]));
    }
    return best;
}

inline double dist_to_selected(const Configuration& x, const SingularSelector& sel) {
    return dist_to_selected(x, sel,
                            PotentialSpec::atomic(1.0, static_cast<int>(x.electron_count())));
}

/// lambda = min{1, d}.
inline double lambda_reg(double d) {
    if (d < 0) throw Error("lambda_reg: negative distance");
    return std::min(1.0, d);
}

/// r(x1) = min{1, |x1|}.
inline double radial_reg(const Vec3& x1) { return lambda_reg(norm(x1)); }

/// V(x) for the chosen potential. Throws at coalescence points.
inline double potential_value(const PotentialSpec& spec, const Configuration& x) {
    const int n = static_cast<int>(x.electron_count());
    if (n != spec.electron_count()) throw Error("potential_value: electron count mismatch");
    auto safe_inv = [](double r) {
        if (r == 0.0) throw SingularEvaluation("potential_value: zero denominator");
        return 1.0 / r;
    };
    double v = 0.0;
    if (spec.is_atomic()) {
        const double Z = std::get<AtomicPotential>(spec.variant()).Z;
        for (int j = 0; j < n; ++j) v -= Z * safe_inv(norm(x[j]));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) v += safe_inv(norm(x[i] - x[j]));
    } else if (spec.is_molecular()) {
        const auto& nuclei = std::get<MolecularPotential>(spec.variant()).nuclei;
        for (int j = 0; j < n; ++j)
            for (const auto& nuc : nuclei) v -= nuc.Z * safe_inv(norm(x[j] - nuc.R));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) v += safe_inv(norm(x[i] - x[j]));
    } else {
        const auto& w = std::get<GeneralWPotential>(spec.variant());
        for (int j = 0; j < n; ++j) v += w.b[j] * safe_inv(norm(x[j]));
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                const double c = spec.pair_coupling(i, j);
                if (c != 0.0) v += c * safe_inv(norm(x[i - 1] - x[j - 1]));
            }
    }
    return v;
}

}  // namespace coulreg

#endif

#ifndef COULREG_JASTROW_HPP
#define COULREG_JASTROW_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "coulreg/field.hpp"
#include "coulreg/geometry.hpp"
#include "coulreg/sampling.hpp"
#include "coulreg/types.hpp"

namespace coulreg {

/// Which part of the potential the Jastrow factor absorbs.
///   Tilde      everything smoothed (all electrons, all pairs)
///   ByAlpha    terms not touching the support electrons of alpha
///   ByCluster  as ByAlpha for the cluster set, plus intra-cluster pairs
class JastrowVariant {
  public:
    enum class Kind { Tilde, ByAlpha, ByCluster };

    static JastrowVariant tilde() { return JastrowVariant(Kind::Tilde, {}, std::nullopt); }
    static JastrowVariant by_alpha(const MultiIndex& alpha) {
        auto q = alpha.support();
        if (q.empty()) throw InvalidVariant("ByAlpha variant needs |alpha| >= 1");
        return JastrowVariant(Kind::ByAlpha, std::move(q), alpha);
    }
    static JastrowVariant by_cluster(const ClusterSet& Q) {
        return JastrowVariant(Kind::ByCluster, Q.members(), std::nullopt);
    }

    Kind kind() const { return kind_; }
    const std::vector<int>& selected() const { return q_; }
    bool selects(int j) const { return std::find(q_.begin(), q_.end(), j) != q_.end(); }
    const std::optional<MultiIndex>& alpha() const { return alpha_; }

  private:
    JastrowVariant(Kind k, std::vector<int> q, std::optional<MultiIndex> a)
        : kind_(k), q_(std::move(q)), alpha_(std::move(a)) {}
    Kind kind_;
    std::vector<int> q_;
    std::optional<MultiIndex> alpha_;
};

namespace detail {

struct SingleTerm {
    int j;        // 0-based electron
    double coef;  // b_j (atomic: -Z)
};
struct PairTerm {
    int i, j;     // 0-based, i < j
    double coef;  // c_ij (atomic: 1)
};

/// Term lists defining F, V_part and G for one variant.
struct JastrowData {
    int n;
    std::vector<SingleTerm> smoothed_singles;
    std::vector<PairTerm> smoothed_pairs;
    std::vector<SingleTerm> vpart_singles;
    std::vector<PairTerm> vpart_pairs;
};

template <class T>
T norm_at(std::span<const T> x, int j) {
    using std::sqrt;
    return sqrt(x[3 * j] * x[3 * j] + x[3 * j + 1] * x[3 * j + 1] + x[3 * j + 2] * x[3 * j + 2]);
}

template <class T>
T pair_norm_at(std::span<const T> x, int i, int j) {
    using std::sqrt;
    auto d0 = x[3 * i] - x[3 * j];
    auto d1 = x[3 * i + 1] - x[3 * j + 1];
    auto d2 = x[3 * i + 2] - x[3 * j + 2];
    return sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

template <class T>
T eval_F(const JastrowData& d, std::span<const T> x) {
    using std::sqrt;
    T s = 0.0 * x[0];
    for (const auto& t : d.smoothed_singles) {
        T r = norm_at(x, t.j);
        s += 0.5 * t.coef * (r - sqrt(r * r + 1.0));
    }
    for (const auto& t : d.smoothed_pairs) {
        T r = pair_norm_at(x, t.i, t.j);
        s += 0.25 * t.coef * (r - sqrt(r * r + 1.0));
    }
    return s;
}

template <class T>
T eval_Vpart(const JastrowData& d, std::span<const T> x) {
    T s = 0.0 * x[0];
    for (const auto& t : d.vpart_singles) s += t.coef / norm_at(x, t.j);
    for (const auto& t : d.vpart_pairs) s += t.coef / pair_norm_at(x, t.i, t.j);
    return s;
}

/// 3D Laplacian of sqrt(r^2+1) as a function of r.
template <class T>
T smoother_laplacian(const T& r) {
    using std::sqrt;
    T q = r * r + 1.0;
    return (2.0 * r * r + 3.0) / (q * sqrt(q));
}

/// G = V - V_part - Delta F in closed form: only the smooth remainders of
/// Delta F survive.
template <class T>
T eval_G(const JastrowData& d, std::span<const T> x) {
    T s = 0.0 * x[0];
    for (const auto& t : d.smoothed_singles) s += 0.5 * t.coef * smoother_laplacian(norm_at(x, t.j));
    for (const auto& t : d.smoothed_pairs) s += 0.5 * t.coef * smoother_laplacian(pair_norm_at(x, t.i, t.j));
    return s;
}

template <class T>
void eval_gradF(const JastrowData& d, std::span<const T> x, std::vector<T>& g) {
    using std::sqrt;
    g.assign(x.size(), 0.0 * x[0]);
    for (const auto& t : d.smoothed_singles) {
        T r = norm_at(x, t.j);
        T w = 0.5 * t.coef * (1.0 / r - 1.0 / sqrt(r * r + 1.0));
        for (int s = 0; s < 3; ++s) g[3 * t.j + s] += w * x[3 * t.j + s];
    }
    for (const auto& t : d.smoothed_pairs) {
        T r = pair_norm_at(x, t.i, t.j);
        T w = 0.25 * t.coef * (1.0 / r - 1.0 / sqrt(r * r + 1.0));
        for (int s = 0; s < 3; ++s) {
            T u = x[3 * t.i + s] - x[3 * t.j + s];
            g[3 * t.i + s] += w * u;
            g[3 * t.j + s] += -1.0 * (w * u);
        }
    }
}

template <class T>
T eval_K(const JastrowData& d, std::span<const T> x) {
    T s = eval_G(d, x);
    std::vector<T> g;
    eval_gradF(d, x, g);
    for (const auto& c : g) s += -1.0 * (c * c);
    return s;
}

}  // namespace detail

/// The transformed system: psi_F = e^{-F} psi solves
///   -Delta psi_F - 2 grad F . grad psi_F + (V_part + K - E) psi_F = 0.
class RegularizedSystem {
  public:
    RegularizedSystem(const JastrowVariant& variant, const PotentialSpec& spec,
                      std::complex<double> E)
        : variant_(variant), spec_(spec), E_(E) {
        build_data();
        const auto d = data_;
        F_ = make_field([d](auto const& x) { return detail::eval_F(d, x); });
        Vpart_ = make_field([d](auto const& x) { return detail::eval_Vpart(d, x); });
        G_ = make_field([d](auto const& x) { return detail::eval_G(d, x); });
        K_ = make_field([d](auto const& x) { return detail::eval_K(d, x); });
    }

    const JastrowVariant& variant() const { return variant_; }
    const PotentialSpec& spec() const { return spec_; }
    std::complex<double> E() const { return E_; }

    const ScalarField& F() const { return F_; }
    const ScalarField& V_part() const { return Vpart_; }
    const ScalarField& G() const { return G_; }
    const ScalarField& K() const { return K_; }

    std::vector<double> grad_F(const Configuration& x) const {
        auto flat = x.flat();
        std::vector<double> g;
        detail::eval_gradF(data_, std::span<const double>(flat), g);
        return g;
    }

    /// Conservative closed-form sup bounds (each smoothed single contributes
    /// |b|/2, each smoothed pair |c|/4 or |c|/2 depending on the quantity).
    double sup_bound_F() const {
        double s = 0.0;
        for (const auto& t : data_.smoothed_singles) s += 0.5 * std::abs(t.coef);
        for (const auto& t : data_.smoothed_pairs) s += 0.25 * std::abs(t.coef);
        return s;
    }
    double sup_bound_gradF() const {
        double s = 0.0;
        for (const auto& t : data_.smoothed_singles) s += 0.5 * std::abs(t.coef);
        for (const auto& t : data_.smoothed_pairs) s += 0.5 * std::abs(t.coef);
        return s;
    }
    double sup_bound_K() const {
        double s = 0.0;
        for (const auto& t : data_.smoothed_singles) s += 1.5 * std::abs(t.coef);
        for (const auto& t : data_.smoothed_pairs) s += 1.5 * std::abs(t.coef);
        return s + sup_bound_gradF() * sup_bound_gradF();
    }

    /// psi_F = e^{-F} psi as a jet-liftable field.
    ScalarField transformed(const ScalarField& psi) const {
        const auto d = data_;
        return ScalarField(
            [d, psi](std::span<const double> x) {
                return std::exp(-detail::eval_F(d, x)) * psi(x);
            },
            [d, psi](std::span<const Jet> x) {
                return exp(-1.0 * detail::eval_F(d, x)) * psi(x);
            });
    }

    /// |left side of the transformed equation| at x for an eigenfunction
    /// oracle psi with eigenvalue E (possibly complex).
    double residual(const ScalarField& psi, const Configuration& x) const {
        ScalarField psiF = transformed(psi);
        const double lap = laplacian(psiF, x);
        const auto gpsiF = gradient(psiF, x);
        const auto gF = grad_F(x);
        double cross = 0.0;
        for (std::size_t c = 0; c < gF.size(); ++c) cross += gF[c] * gpsiF[c];
        const auto flat = x.flat();
        std::span<const double> xs(flat);
        const double vpart = detail::eval_Vpart(data_, xs);
        const double k = detail::eval_K(data_, xs);
        const double val = psiF(xs);
        std::complex<double> res = -lap - 2.0 * cross + (vpart + k) * val - E_ * val;
        return std::abs(res);
    }

    const detail::JastrowData& data() const { return data_; }

  private:
    void build_data() {
        const int n = spec_.electron_count();
        data_.n = n;
        std::vector<double> b(n);
        std::vector<std::vector<double>> c(n, std::vector<double>(n, 0.0));
        if (spec_.is_atomic()) {
            const double Z = std::get<AtomicPotential>(spec_.variant()).Z;
            for (int j = 0; j < n; ++j) b[j] = -Z;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) c[i][j] = 1.0;
        } else if (spec_.is_general_w()) {
            b = std::get<GeneralWPotential>(spec_.variant()).b;
            for (int i = 1; i <= n; ++i)
                for (int j = i + 1; j <= n; ++j) c[i - 1][j - 1] = spec_.pair_coupling(i, j);
        } else {
            throw InvalidVariant("RegularizedSystem: molecular potentials not supported");
        }
        auto selected = [&](int j1) { return variant_.selects(j1); };  // 1-based
        const auto kind = variant_.kind();
        for (int j = 0; j < n; ++j) {
            const bool sel = kind != JastrowVariant::Kind::Tilde && selected(j + 1);
            if (sel)
                data_.vpart_singles.push_back({j, b[j]});
            else if (b[j] != 0.0)
                data_.smoothed_singles.push_back({j, b[j]});
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (c[i][j] == 0.0) continue;
                const bool si = selected(i + 1), sj = selected(j + 1);
                bool smooth;
                if (kind == JastrowVariant::Kind::Tilde)
                    smooth = true;
                else if (kind == JastrowVariant::Kind::ByAlpha)
                    smooth = !si && !sj;
                else  // ByCluster: intra-cluster pairs also smoothed
                    smooth = (!si && !sj) || (si && sj);
                if (smooth)
                    data_.smoothed_pairs.push_back({i, j, c[i][j]});
                else
                    data_.vpart_pairs.push_back({i, j, c[i][j]});
            }
    }

    JastrowVariant variant_;
    PotentialSpec spec_;
    std::complex<double> E_;
    detail::JastrowData data_;
    ScalarField F_, Vpart_, G_, K_;
};

inline RegularizedSystem build_system(const JastrowVariant& variant, const PotentialSpec& spec,
                                      std::complex<double> E) {
    return RegularizedSystem(variant, spec, E);
}

/// Max of |d^beta F| and |d^beta K| over the sample points; beta must be a
/// direction the variant annihilates (0 < beta <= alpha for ByAlpha, any
/// nonzero cluster triple for ByCluster). Rejects Tilde.
inline double vanishing_derivative_check(const RegularizedSystem& sys, const MultiIndex& beta,
                                         const std::vector<Configuration>& samples) {
    if (sys.variant().kind() != JastrowVariant::Kind::ByAlpha)
        throw InvalidVariant("vanishing_derivative_check: multi-index form needs ByAlpha");
    const auto& alpha = *sys.variant().alpha();
    if (beta.order() == 0 || !beta.leq(alpha))
        throw InvalidAlpha("vanishing_derivative_check: need 0 < beta <= alpha");
    double worst = 0.0;
    for (const auto& x : samples) {
        worst = std::max(worst, std::abs(partial_alpha(sys.F(), x, beta)));
        worst = std::max(worst, std::abs(partial_alpha(sys.K(), x, beta)));
    }
    return worst;
}

/// Coefficient fields of the transformed equation pulled back to the unit
/// ball around x0: y lives in B(0,1), x = x0 + lambda y.
struct RescaledSystem {
    double lambda = 0.0;
    std::vector<double> x0;        // flat 3N
    ScalarField V;                 // y -> lambda * V_part(x0 + lambda y)
    ScalarField K;                 // y -> K(x0 + lambda y)
    std::vector<ScalarField> H;    // components of (grad F)(x0 + lambda y)
};

inline RescaledSystem rescaled_coefficients(const RegularizedSystem& sys, const Configuration& x0,
                                            const MultiIndex& alpha) {
    const auto sel = SingularSelector::by_alpha(alpha);
    const double lam = lambda_reg(dist_to_selected(x0, sel, sys.spec()));
    if (lam <= 0.0) throw OnSingularSet("rescaled_coefficients: lambda_alpha = 0");
    RescaledSystem rs;
    rs.lambda = lam;
    rs.x0 = x0.flat();
    const auto d = sys.data();
    const auto x0f = rs.x0;
    auto shift = [x0f, lam](auto const& y) {
        using T = std::remove_cvref_t<decltype(y[0] * 1.0)>;
        std::vector<T> x;
        x.reserve(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) x.push_back(x0f[i] + lam * y[i]);
        return x;
    };
    rs.V = make_field([d, shift, lam](auto const& y) {
        auto x = shift(y);
        using T = typename decltype(x)::value_type;
        return lam * detail::eval_Vpart(d, std::span<const T>(x));
    });
    rs.K = make_field([d, shift](auto const& y) {
        auto x = shift(y);
        using T = typename decltype(x)::value_type;
        return detail::eval_K(d, std::span<const T>(x));
    });
    for (std::size_t c = 0; c < rs.x0.size(); ++c) {
        rs.H.push_back(make_field([d, shift, c](auto const& y) {
            auto x = shift(y);
            using T = typename decltype(x)::value_type;
            std::vector<T> g;
            detail::eval_gradF(d, std::span<const T>(x), g);
            return g[c];
        }));
    }
    return rs;
}

struct RescaledBoundReport {
    MultiIndex gamma;
    double R = 0.0;
    double empirical_sup = 0.0;
    double bound = 0.0;
    long samples = 0;
    bool pass = false;
};

/// Empirical sup of |d^gamma V^lambda| over B(0, R) against the explicit
/// constant (sqrt2/(1-R)) N (8/(1-R))^{|gamma|} gamma! (Z + 2N - 1). Sample
/// count doubles until the sup moves by less than 1%.
inline RescaledBoundReport rescaled_derivative_bound(const RegularizedSystem& sys,
                                                     const RescaledSystem& rs,
                                                     const MultiIndex& gamma, double R,
                                                     std::uint64_t seed = 7u) {
    if (!(R > 0.0 && R < 1.0)) throw Error("rescaled_derivative_bound: R in (0,1) required");
    const int n = sys.spec().electron_count();
    double Z = 0.0;
    if (sys.spec().is_atomic()) {
        Z = std::get<AtomicPotential>(sys.spec().variant()).Z;
    } else {
        for (double b : std::get<GeneralWPotential>(sys.spec().variant()).b)
            Z = std::max(Z, std::abs(b));
    }
    double gfact = 1.0;
    for (int e : gamma.entries())
        for (int k = 2; k <= e; ++k) gfact *= k;
    RescaledBoundReport rep{gamma, R, 0.0, 0.0, 0, false};
    rep.bound = (std::sqrt(2.0) / (1.0 - R)) * n *
                std::pow(8.0 / (1.0 - R), gamma.order()) * gfact * (Z + 2.0 * n - 1.0);
    const int dim = 3 * n;
    std::mt19937_64 rng(seed);
    double sup = 0.0;
    long count = 0, target = 64;
    double prev_sup = -1.0;
    while (true) {
        while (count < target) {
            auto u = unit_ball_point(rng, dim);
            for (double& c : u) c *= R;
            ++count;
            double v;
            try {
                if (gamma.order() == 0)
                    v = rs.V(std::span<const double>(u));
                else
                    v = partial_alpha(rs.V, Configuration::from_flat(u), gamma);
            } catch (const NonSmoothPoint&) {
                continue;
            }
            sup = std::max(sup, std::abs(v));
        }
        if (prev_sup >= 0.0 && sup <= 1.01 * prev_sup) break;
        if (target >= (1l << 14)) break;
        prev_sup = sup;
        target *= 2;
    }
    rep.samples = count;
    rep.empirical_sup = sup;
    rep.pass = sup <= rep.bound;
    return rep;
}

/// Max of |d^beta K^lambda| and |d^beta H^lambda_c| over sample points in
/// the unit ball; the rescaled coefficients inherit the vanishing property
/// for 0 < beta <= alpha.
inline double rescaled_vanishing_check(const RescaledSystem& rs, const MultiIndex& alpha,
                                       const MultiIndex& beta,
                                       const std::vector<Configuration>& samples) {
    if (beta.order() == 0 || !beta.leq(alpha))
        throw InvalidAlpha("rescaled_vanishing_check: need 0 < beta <= alpha");
    double worst = 0.0;
    for (const auto& y : samples) {
        worst = std::max(worst, std::abs(partial_alpha(rs.K, y, beta)));
        for (const auto& h : rs.H)
            worst = std::max(worst, std::abs(partial_alpha(h, y, beta)));
    }
    return worst;
}

inline double vanishing_derivative_check(const RegularizedSystem& sys,
                                         const std::array<int, 3>& beta,
                                         const std::vector<Configuration>& samples) {
    if (sys.variant().kind() != JastrowVariant::Kind::ByCluster)
        throw InvalidVariant("vanishing_derivative_check: cluster form needs ByCluster");
    if (beta[0] + beta[1] + beta[2] == 0)
        throw InvalidAlpha("vanishing_derivative_check: beta must be nonzero");
    ClusterSet Q(sys.variant().selected(), sys.spec().electron_count());
    double worst = 0.0;
    for (const auto& x : samples) {
        worst = std::max(worst, std::abs(cluster_partial(sys.F(), x, Q, beta)));
        worst = std::max(worst, std::abs(cluster_partial(sys.K(), x, Q, beta)));
    }
    return worst;
}

}  // namespace coulreg

#endif

#ifndef COULREG_FIELD_HPP
#define COULREG_FIELD_HPP

#include <functional>
#include <span>
#include <vector>

#include "coulreg/jet.hpp"
#include "coulreg/types.hpp"

namespace coulreg {

/// Real scalar field on R^{3N} evaluable on plain coordinates and on jets.
/// Construct from a generic callable via make_field so both evaluation paths
/// share one definition.
class ScalarField {
  public:
    using RealFn = std::function<double(std::span<const double>)>;
    using JetFn = std::function<Jet(std::span<const Jet>)>;

    ScalarField() = default;
    ScalarField(RealFn real, JetFn jet) : real_(std::move(real)), jet_(std::move(jet)) {}

    double operator()(std::span<const double> x) const { return real_(x); }
    double operator()(const Configuration& x) const {
        auto f = x.flat();
        return real_(std::span<const double>(f));
    }
    Jet operator()(std::span<const Jet> x) const { return jet_(x); }

    bool valid() const { return static_cast<bool>(real_); }

  private:
    RealFn real_;
    JetFn jet_;
};

template <class F>
ScalarField make_field(F f) {
    return ScalarField([f](std::span<const double> x) { return f(x); },
                       [f](std::span<const Jet> x) { return f(x); });
}

/// d^tau_t f(x + sum_i t_i dirs[i]) at t = 0, via jet propagation. Each
/// direction is a flat 3N vector; tau gives the derivative order per
/// direction. This is the single engine behind partial_alpha and
/// cluster_partial: jets carry only the directions actually used.
inline double directional_derivative(const ScalarField& f, const std::vector<double>& x,
                                     const std::vector<std::vector<double>>& dirs,
                                     const std::vector<int>& tau) {
    const int d = static_cast<int>(dirs.size());
    if (d == 0) {
        return f(std::span<const double>(x));
    }
    if (d > kMaxJetDims) throw Error("directional_derivative: too many directions");
    int m = 0;
    for (int t : tau) m += t;
    if (m > kMaxJetOrder) throw Error("directional_derivative: order above supported maximum");
    std::vector<Jet> in;
    in.reserve(x.size());
    std::vector<Jet> t(d);
    for (int i = 0; i < d; ++i) t[i] = Jet::variable(d, m, i, 0.0);
    for (std::size_t c = 0; c < x.size(); ++c) {
        Jet jc = Jet::constant(d, m, x[c]);
        for (int i = 0; i < d; ++i)
            if (dirs[i][c] != 0.0) jc += dirs[i][c] * t[i];
        in.push_back(jc);
    }
    Jet out = f(std::span<const Jet>(in));
    return out.derivative(tau);
}

/// d^alpha f(x), exact up to rounding, |alpha| <= 8.
inline double partial_alpha(const ScalarField& f, const Configuration& x, const MultiIndex& alpha) {
    const auto flat = x.flat();
    if (alpha.entries().size() != flat.size())
        throw InvalidAlpha("partial_alpha: multi-index length mismatch");
    std::vector<std::vector<double>> dirs;
    std::vector<int> tau;
    for (std::size_t c = 0; c < flat.size(); ++c) {
        if (alpha[c] == 0) continue;
        std::vector<double> e(flat.size(), 0.0);
        e[c] = 1.0;
        dirs.push_back(std::move(e));
        tau.push_back(alpha[c]);
    }
    return directional_derivative(f, flat, dirs, tau);
}

/// Cluster derivative d^alpha_{x_Q} f(x): alpha is a 3-component multi-index
/// in the collective translation direction of the cluster Q, each unit
/// direction being e_s/sqrt(|Q|) on every electron of Q.
inline double cluster_partial(const ScalarField& f, const Configuration& x, const ClusterSet& Q,
                              const std::array<int, 3>& alpha) {
    const auto flat = x.flat();
    const double w = 1.0 / std::sqrt(static_cast<double>(Q.size()));
    std::vector<std::vector<double>> dirs;
    std::vector<int> tau;
    for (int s = 0; s < 3; ++s) {
        if (alpha[s] == 0) continue;
        std::vector<double> v(flat.size(), 0.0);
        for (int j : Q.members()) v[3 * (j - 1) + s] = w;
        dirs.push_back(std::move(v));
        tau.push_back(alpha[s]);
    }
    return directional_derivative(f, flat, dirs, tau);
}

/// Gradient as 3N per-coordinate first derivatives (one 1-dim jet each).
inline std::vector<double> gradient(const ScalarField& f, const Configuration& x) {
    const auto flat = x.flat();
    std::vector<double> g(flat.size());
    for (std::size_t c = 0; c < flat.size(); ++c) {
        std::vector<double> e(flat.size(), 0.0);
        e[c] = 1.0;
        g[c] = directional_derivative(f, flat, {e}, {1});
    }
    return g;
}

inline double laplacian(const ScalarField& f, const Configuration& x) {
    const auto flat = x.flat();
    double sum = 0.0;
    for (std::size_t c = 0; c < flat.size(); ++c) {
        std::vector<double> e(flat.size(), 0.0);
        e[c] = 1.0;
        sum += directional_derivative(f, flat, {e}, {2});
    }
    return sum;
}

}  // namespace coulreg

#endif

#ifndef COULREG_ORACLE_HPP
#define COULREG_ORACLE_HPP

#include <cmath>
#include <random>
#include <vector>

#include "coulreg/field.hpp"
#include "coulreg/geometry.hpp"
#include "coulreg/orbital.hpp"

namespace coulreg {

/// Exact eigenstate of -Delta + V: a product of one-electron hydrogenic
/// orbitals. N=1 is the atomic case; N>=2 uses the non-interacting
/// potential (per-electron -Z_j/|x_j|, zero pair couplings).
class OracleState {
  public:
    OracleState(std::vector<Orbital> orbitals, PotentialSpec spec)
        : orbitals_(std::move(orbitals)), spec_(std::move(spec)) {
        if (orbitals_.empty()) throw Error("OracleState: no orbitals");
        if (static_cast<int>(orbitals_.size()) != spec_.electron_count())
            throw Error("OracleState: orbital/spec electron count mismatch");
        if (spec_.is_general_w()) {
            const int n = spec_.electron_count();
            for (int i = 1; i <= n; ++i)
                for (int j = i + 1; j <= n; ++j)
                    if (spec_.pair_coupling(i, j) != 0.0)
                        throw Error("OracleState: product states need zero pair couplings");
        } else if (!spec_.is_atomic() || spec_.electron_count() != 1) {
            throw Error("OracleState: unsupported potential for a product state");
        }
        energy_ = 0.0;
        for (const auto& o : orbitals_) energy_ += o.energy();
        verify_residual();
    }

    int electron_count() const { return static_cast<int>(orbitals_.size()); }
    const std::vector<Orbital>& orbitals() const { return orbitals_; }
    double energy() const { return energy_; }
    const PotentialSpec& spec() const { return spec_; }

    /// Decay witness rate for |psi| <= C exp(-c0 |x|).
    double decay_rate() const {
        double m = orbitals_[0].rate();
        for (const auto& o : orbitals_) m = std::min(m, o.rate());
        return m / std::sqrt(static_cast<double>(orbitals_.size()));
    }

    double value(const Configuration& x) const {
        double v = 1.0;
        for (int j = 0; j < electron_count(); ++j) v *= orbitals_[j].value(x[j]);
        return v;
    }

    /// psi as a jet-liftable field.
    ScalarField field() const {
        auto orbs = orbitals_;
        return make_field([orbs](auto const& x) {
            using std::exp;
            using std::sqrt;
            using T = std::remove_cvref_t<decltype(x[0] * x[0])>;
            T out = value_like(x[0], 1.0);
            for (std::size_t j = 0; j < orbs.size(); ++j) {
                T r = sqrt(x[3 * j] * x[3 * j] + x[3 * j + 1] * x[3 * j + 1] +
                           x[3 * j + 2] * x[3 * j + 2]);
                const auto& poly = orbs[j].radial_poly();
                T p = value_like(r, poly.back());
                for (int k = static_cast<int>(poly.size()) - 2; k >= 0; --k) p = p * r + poly[k];
                out = out * p * exp(-orbs[j].rate() * r);
            }
            return out;
        });
    }

    /// Closed-form d^alpha psi(x), product rule across electrons with the
    /// per-orbital term expansion; independent of the jet engine.
    double exact_partial(const Configuration& x, const MultiIndex& alpha) const {
        if (alpha.electron_count() != electron_count())
            throw InvalidAlpha("exact_partial: multi-index length mismatch");
        double v = 1.0;
        for (int j = 1; j <= electron_count(); ++j) {
            auto t = alpha.triple(j);
            if (t[0] + t[1] + t[2] == 0)
                v *= orbitals_[j - 1].value(x[j - 1]);
            else
                v *= orbitals_[j - 1].partial(x[j - 1], t);
        }
        return v;
    }

    /// Closed-form squared L2 norm over R^{3N}.
    double squared_norm() const {
        double s = 1.0;
        for (const auto& o : orbitals_) s *= o.squared_norm();
        return s;
    }

  private:
    static double value_like(double, double v) { return v; }
    static Jet value_like(const Jet& ref, double v) {
        return Jet::constant(ref.dims(), ref.order(), v);
    }

    void verify_residual() const {
        std::mt19937_64 rng(0x0c0ffee5u);
        std::normal_distribution<double> g(0.0, 1.0);
        const int n = electron_count();
        int done = 0;
        while (done < 20) {
            std::vector<Vec3> p(n);
            for (auto& v : p) v = {g(rng), g(rng), g(rng)};
            Configuration x(p);
            if (dist_to_sigma(x, spec_) < 0.05) continue;
            ++done;
            double lap = 0.0;
            for (int j = 0; j < n; ++j) {
                double orb_lap = 0.0;
                for (int axis = 0; axis < 3; ++axis) {
                    std::array<int, 3> a2 = {0, 0, 0};
                    a2[axis] = 2;
                    orb_lap += orbitals_[j].partial(x[j], a2);
                }
                double rest = 1.0;
                for (int k = 0; k < n; ++k)
                    if (k != j) rest *= orbitals_[k].value(x[k]);
                lap += orb_lap * rest;
            }
            const double v = value(x);
            const double res = -lap + potential_value(spec_, x) * v - energy_ * v;
            if (std::abs(res) > 1e-8 * (1.0 + std::abs(v)))
                throw ResidualTooLarge("OracleState: eigen-residual check failed");
        }
    }

    std::vector<Orbital> orbitals_;
    PotentialSpec spec_;
    double energy_;
};

/// d^alpha psi precompiled once so Monte Carlo loops pay only term
/// evaluation, not re-differentiation.
class CompiledPartial {
  public:
    CompiledPartial(const OracleState& state, const MultiIndex& alpha) {
        const int n = state.electron_count();
        if (alpha.electron_count() != n)
            throw InvalidAlpha("CompiledPartial: multi-index length mismatch");
        exprs_.reserve(n);
        for (int j = 1; j <= n; ++j)
            exprs_.push_back(state.orbitals()[j - 1].expr().derivative(alpha.triple(j)));
    }

    double operator()(const Configuration& x) const {
        double v = 1.0;
        for (std::size_t j = 0; j < exprs_.size(); ++j) v *= exprs_[j].eval(x[j]);
        return v;
    }

    double eval_flat(const std::vector<double>& flat) const {
        double v = 1.0;
        for (std::size_t j = 0; j < exprs_.size(); ++j)
            v *= exprs_[j].eval({flat[3 * j], flat[3 * j + 1], flat[3 * j + 2]});
        return v;
    }

  private:
    std::vector<detail::RadialExpr> exprs_;
};

/// |grad psi| with all 3N coordinate derivatives precompiled.
class CompiledGradientNorm {
  public:
    explicit CompiledGradientNorm(const OracleState& state) {
        const int n = state.electron_count();
        for (int j = 1; j <= n; ++j)
            for (int s = 0; s < 3; ++s) {
                std::array<int, 3> a = {0, 0, 0};
                a[s] = 1;
                parts_.emplace_back(state, MultiIndex::on_electron(n, j, a));
            }
    }

    double eval_flat(const std::vector<double>& flat) const {
        double s = 0.0;
        for (const auto& p : parts_) {
            const double v = p.eval_flat(flat);
            s += v * v;
        }
        return std::sqrt(s);
    }

  private:
    std::vector<CompiledPartial> parts_;
};

inline OracleState hydrogen_ground(double Z) {
    return OracleState({Orbital(OrbitalKind::GroundHydrogenic, Z)}, PotentialSpec::atomic(Z, 1));
}

inline OracleState product_state(std::vector<Orbital> orbitals) {
    const int n = static_cast<int>(orbitals.size());
    if (n < 2) throw Error("product_state: N >= 2 required");
    std::vector<double> b(n);
    for (int j = 0; j < n; ++j) b[j] = -orbitals[j].Z();
    return OracleState(std::move(orbitals), PotentialSpec::general_w(std::move(b), {}, n));
}

}  // namespace coulreg

#endif

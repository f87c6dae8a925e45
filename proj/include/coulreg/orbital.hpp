#ifndef COULREG_ORBITAL_HPP
#define COULREG_ORBITAL_HPP

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "coulreg/errors.hpp"
#include "coulreg/types.hpp"

namespace coulreg {

namespace detail {

/// Closed-form expression class sum of c * x^A * r^m * e^{-lambda r}
/// (A in N0^3, m in Z, r = |x|), closed under partial differentiation.
/// This is the derivative oracle for radial orbitals: exact mixed partials
/// of any order without series arithmetic.
class RadialExpr {
  public:
    using Key = std::array<int, 4>;  // A1, A2, A3, m

    explicit RadialExpr(double lambda) : lambda_(lambda) {}

    static RadialExpr from_radial_poly(const std::vector<double>& poly, double lambda) {
        RadialExpr e(lambda);
        for (int k = 0; k < static_cast<int>(poly.size()); ++k)
            if (poly[k] != 0.0) e.terms_[{0, 0, 0, k}] = poly[k];
        return e;
    }

    double lambda() const { return lambda_; }

    RadialExpr derivative(int axis) const {
        RadialExpr out(lambda_);
        for (const auto& [key, c] : terms_) {
            auto [a1, a2, a3, m] = key;
            std::array<int, 3> A = {a1, a2, a3};
            if (A[axis] > 0) {
                Key k1 = key;
                k1[axis] -= 1;
                out.terms_[k1] += c * A[axis];
            }
            if (m != 0) {
                Key k2 = key;
                k2[axis] += 1;
                k2[3] = m - 2;
                out.terms_[k2] += c * m;
            }
            Key k3 = key;
            k3[axis] += 1;
            k3[3] = m - 1;
            out.terms_[k3] += -lambda_ * c;
        }
        return out;
    }

    RadialExpr derivative(const std::array<int, 3>& alpha) const {
        RadialExpr out = *this;
        for (int axis = 0; axis < 3; ++axis)
            for (int k = 0; k < alpha[axis]; ++k) out = out.derivative(axis);
        return out;
    }

    double eval(const Vec3& x) const {
        const double r = norm(x);
        if (r < 1e-300) {
            for (const auto& [key, c] : terms_)
                if (key[3] < 0) throw NonSmoothPoint("RadialExpr at origin");
        }
        double s = 0.0;
        for (const auto& [key, c] : terms_) {
            double t = c;
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < key[i]; ++k) t *= x[i];
            t *= std::pow(r, key[3]);
            s += t;
        }
        return s * std::exp(-lambda_ * r);
    }

  private:
    std::map<Key, double> terms_;
    double lambda_;
};

}  // namespace detail

enum class OrbitalKind { GroundHydrogenic, Excited2s };

/// One-electron hydrogenic state for -Delta - Z/|x|:
/// ground: e^{-Z r/2} with eigenvalue -Z^2/4; 2s: (1 - Z r/4) e^{-Z r/4}.
/// Eigenvalues are residual-verified at construction.
class Orbital {
  public:
    Orbital(OrbitalKind kind, double Z) : kind_(kind), Z_(Z) {
        if (Z <= 0) throw Error("Orbital: Z must be positive");
        if (kind == OrbitalKind::GroundHydrogenic) {
            lambda_ = Z / 2;
            poly_ = {1.0};
            energy_ = -Z * Z / 4;
        } else {
            lambda_ = Z / 4;
            poly_ = {1.0, -Z / 4};
            energy_ = -Z * Z / 16;
        }
        verify_eigenpair();
    }

    OrbitalKind kind() const { return kind_; }
    double Z() const { return Z_; }
    double energy() const { return energy_; }
    double rate() const { return lambda_; }
    const std::vector<double>& radial_poly() const { return poly_; }

    double value(const Vec3& x) const { return radial_value(norm(x)); }

    double radial_value(double r) const {
        double p = 0.0;
        for (int k = static_cast<int>(poly_.size()) - 1; k >= 0; --k) p = p * r + poly_[k];
        return p * std::exp(-lambda_ * r);
    }

    /// Exact d^alpha phi(x) via the closed-form term expansion.
    double partial(const Vec3& x, const std::array<int, 3>& alpha) const {
        return expr().derivative(alpha).eval(x);
    }

    /// Integral of |phi|^2 over R^3, closed form from gamma integrals.
    double squared_norm() const {
        double s = 0.0;
        const double c = 2.0 * lambda_;
        for (std::size_t i = 0; i < poly_.size(); ++i)
            for (std::size_t j = 0; j < poly_.size(); ++j) {
                int k = static_cast<int>(i + j) + 2;
                double fact = 1.0;
                for (int t = 2; t <= k; ++t) fact *= t;
                s += poly_[i] * poly_[j] * fact / std::pow(c, k + 1);
            }
        return 4.0 * M_PI * s;
    }

    detail::RadialExpr expr() const { return detail::RadialExpr::from_radial_poly(poly_, lambda_); }

  private:
    void verify_eigenpair() const {
        // -Delta phi - Z/r phi = E phi, checked off the origin.
        auto e = expr();
        auto dxx = e.derivative(0).derivative(0);
        auto dyy = e.derivative(1).derivative(1);
        auto dzz = e.derivative(2).derivative(2);
        for (const Vec3& x : {Vec3{0.3, 0.1, -0.2}, Vec3{1.5, 0, 0.4}, Vec3{-0.7, 2.1, 0.9}}) {
            const double lap = dxx.eval(x) + dyy.eval(x) + dzz.eval(x);
            const double v = e.eval(x);
            const double res = -lap - Z_ / norm(x) * v - energy_ * v;
            if (std::abs(res) > 1e-10 * (1.0 + std::abs(v)))
                throw ResidualTooLarge("Orbital: eigenpair residual check failed");
        }
    }

    OrbitalKind kind_;
    double Z_;
    double lambda_;
    double energy_;
    std::vector<double> poly_;
};

}  // namespace coulreg

#endif

#ifndef COULREG_JET_HPP
#define COULREG_JET_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "coulreg/errors.hpp"

namespace coulreg {

/// Truncated multivariate Taylor series ("jet") in up to 16 formal directions,
/// total degree capped at kMaxJetOrder. Coefficients are normalized Taylor
/// coefficients d^e f / e!. Arithmetic propagates exact derivatives through
/// +, -, *, /, sqrt, exp and polynomial composition.
inline constexpr int kMaxJetOrder = 8;
inline constexpr int kMaxJetDims = 16;
inline constexpr double kNonSmoothEps = 1e-12;

namespace detail {

/// Coefficient layout for (dims, order): graded ordering of all exponent
/// tuples e in N0^dims with |e| <= order, plus index lookup and degree table.
struct JetLayout {
    int dims;
    int order;
    std::vector<std::vector<int>> exps;   // exponent tuples, graded order
    std::vector<int> degree;              // |e| per slot
    std::unordered_map<std::uint64_t, int> index;  // packed exponent -> slot

    static std::uint64_t pack(const std::vector<int>& e) {
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < e.size(); ++i) k |= (std::uint64_t(e[i]) & 0xF) << (4 * i);
        return k;
    }

    JetLayout(int d, int m) : dims(d), order(m) {
        std::vector<int> e(d, 0);
        for (int deg = 0; deg <= m; ++deg) enumerate(e, 0, deg);
        for (int i = 0; i < static_cast<int>(exps.size()); ++i) index[pack(exps[i])] = i;
    }

    int slot(const std::vector<int>& e) const {
        auto it = index.find(pack(e));
        return it == index.end() ? -1 : it->second;
    }

  private:
    void enumerate(std::vector<int>& e, int pos, int remaining) {
        if (pos == dims - 1) {
            e[pos] = remaining;
            exps.push_back(e);
            degree.push_back(order_of(e));
            e[pos] = 0;
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            e[pos] = v;
            enumerate(e, pos + 1, remaining - v);
        }
        e[pos] = 0;
    }
    static int order_of(const std::vector<int>& e) {
        int s = 0;
        for (int v : e) s += v;
        return s;
    }
};

inline std::shared_ptr<const JetLayout> layout_for(int dims, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dims, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto p = std::make_shared<JetLayout>(dims, order);
    cache.emplace(key, p);
    return p;
}

}  // namespace detail

class Jet {
  public:
    Jet() : Jet(1, 0, 0.0) {}

    Jet(int dims, int order, double value) {
        if (dims < 1 || dims > kMaxJetDims) throw Error("Jet: dims out of range");
        if (order < 0 || order > kMaxJetOrder) throw Error("Jet: order above supported maximum");
        lay_ = detail::layout_for(dims, order);
        c_.assign(lay_->exps.size(), 0.0);
        c_[0] = value;
    }

    static Jet constant(int dims, int order, double value) { return Jet(dims, order, value); }

    /// Formal variable number i (0-based): value + t_i.
    static Jet variable(int dims, int order, int i, double value) {
        Jet j(dims, order, value);
        if (order >= 1) {
            std::vector<int> e(dims, 0);
            e[i] = 1;
            j.c_[j.lay_->slot(e)] = 1.0;
        }
        return j;
    }

    int dims() const { return lay_->dims; }
    int order() const { return lay_->order; }
    double value() const { return c_[0]; }

    /// Normalized Taylor coefficient at exponent e (0 if |e| > order).
    double coeff(const std::vector<int>& e) const {
        int deg = 0;
        for (int v : e) deg += v;
        if (deg > order()) return 0.0;
        int s = lay_->slot(e);
        return s < 0 ? 0.0 : c_[s];
    }

    /// d^e f at the base point: e! * coeff(e).
    double derivative(const std::vector<int>& e) const {
        double f = 1.0;
        for (int v : e)
            for (int k = 2; k <= v; ++k) f *= k;
        return f * coeff(e);
    }

    Jet& operator+=(const Jet& o) {
        check_compat(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        check_compat(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Jet& operator*=(double s) {
        for (double& v : c_) v *= s;
        return *this;
    }
    Jet& operator+=(double s) {
        c_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a += -s; }
    friend Jet operator-(double s, const Jet& a) {
        Jet r = -a;
        return r += s;
    }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a *= (1.0 / s); }
    Jet operator-() const {
        Jet r = *this;
        for (double& v : r.c_) v = -v;
        return r;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        a.check_compat(b);
        const auto& L = *a.lay_;
        Jet r(a.dims(), a.order(), 0.0);
        const int n = static_cast<int>(a.c_.size());
        std::vector<int> sum(a.dims());
        for (int i = 0; i < n; ++i) {
            if (a.c_[i] == 0.0) continue;
            const int di = L.degree[i];
            for (int j = 0; j < n; ++j) {
                if (b.c_[j] == 0.0) continue;
                if (di + L.degree[j] > a.order()) continue;
                for (int d = 0; d < a.dims(); ++d) sum[d] = L.exps[i][d] + L.exps[j][d];
                r.c_[L.slot(sum)] += a.c_[i] * b.c_[j];
            }
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }
    friend Jet operator/(double s, const Jet& b) { return s * recip(b); }

    /// sum_k coeffs[k] * e^k where e has zero constant term; Horner evaluation.
    static Jet compose_series(const Jet& e, const std::vector<double>& coeffs) {
        Jet r = Jet::constant(e.dims(), e.order(), coeffs.back());
        for (int k = static_cast<int>(coeffs.size()) - 2; k >= 0; --k) {
            r = r * e;
            r += coeffs[k];
        }
        return r;
    }

    friend Jet recip(const Jet& b) {
        const double b0 = b.value();
        if (std::abs(b0) < kNonSmoothEps) throw NonSmoothPoint("jet division at zero");
        Jet e = b / b0;
        e += -1.0;
        std::vector<double> a(b.order() + 1);
        double s = 1.0;
        for (int k = 0; k <= b.order(); ++k, s = -s) a[k] = s;
        return compose_series(e, a) / b0;
    }

    friend Jet sqrt(const Jet& b) {
        const double b0 = b.value();
        if (b0 < kNonSmoothEps * kNonSmoothEps) throw NonSmoothPoint("jet sqrt at zero");
        Jet e = b / b0;
        e += -1.0;
        std::vector<double> a(b.order() + 1);
        a[0] = 1.0;
        double binom = 1.0;  // product form of C(1/2, k)
        for (int k = 1; k <= b.order(); ++k) {
            binom *= (0.5 - (k - 1)) / k;
            a[k] = binom;
        }
        return compose_series(e, a) * std::sqrt(b0);
    }

    friend Jet exp(const Jet& b) {
        Jet e = b;
        e += -b.value();
        std::vector<double> a(b.order() + 1);
        double f = 1.0;
        a[0] = 1.0;
        for (int k = 1; k <= b.order(); ++k) {
            f /= k;
            a[k] = f;
        }
        return compose_series(e, a) * std::exp(b.value());
    }

    /// Integer power by repeated multiplication (n may be negative).
    friend Jet pow_i(const Jet& b, int n) {
        if (n < 0) return recip(pow_i(b, -n));
        Jet r = Jet::constant(b.dims(), b.order(), 1.0);
        for (int k = 0; k < n; ++k) r = r * b;
        return r;
    }

  private:
    void check_compat(const Jet& o) const {
        if (lay_ != o.lay_) throw Error("Jet: mixed layouts");
    }

    std::shared_ptr<const detail::JetLayout> lay_;
    std::vector<double> c_;
};

/// Euclidean norm of a 3-vector of jets; the |.| lift. Non-smooth at 0.
inline Jet norm3(const Jet& x, const Jet& y, const Jet& z) {
    Jet s = x * x + y * y + z * z;
    if (s.value() < kNonSmoothEps * kNonSmoothEps) throw NonSmoothPoint("|.| lifted at zero");
    return sqrt(s);
}

}  // namespace coulreg

#endif

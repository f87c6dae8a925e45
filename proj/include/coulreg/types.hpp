#ifndef COULREG_TYPES_HPP
#define COULREG_TYPES_HPP

#include <array>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <variant>
#include <vector>

#include "coulreg/errors.hpp"

namespace coulreg {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

/// Point in R^{3N}: N electron positions.
class Configuration {
  public:
    Configuration() = default;
    explicit Configuration(std::vector<Vec3> positions) : pos_(std::move(positions)) {
        for (const auto& p : pos_)
            for (double c : p)
                if (!std::isfinite(c)) throw Error("Configuration: non-finite coordinate");
    }

    std::size_t electron_count() const { return pos_.size(); }
    const Vec3& operator[](std::size_t j) const { return pos_[j]; }
    const std::vector<Vec3>& positions() const { return pos_; }

    /// Flat 3N coordinate view.
    std::vector<double> flat() const {
        std::vector<double> out;
        out.reserve(3 * pos_.size());
        for (const auto& p : pos_) out.insert(out.end(), p.begin(), p.end());
        return out;
    }

    static Configuration from_flat(const std::vector<double>& c) {
        if (c.size() % 3 != 0) throw Error("from_flat: length not a multiple of 3");
        std::vector<Vec3> p(c.size() / 3);
        for (std::size_t j = 0; j < p.size(); ++j) p[j] = {c[3 * j], c[3 * j + 1], c[3 * j + 2]};
        return Configuration(std::move(p));
    }

  private:
    std::vector<Vec3> pos_;
};

/// Non-empty subset of {1,..,N} (1-based electron labels).
class ClusterSet {
  public:
    ClusterSet(std::initializer_list<int> members, int n) : ClusterSet(std::vector<int>(members), n) {}
    ClusterSet(std::vector<int> members, int n) : n_(n) {
        std::set<int> uniq(members.begin(), members.end());
        if (uniq.empty()) throw Error("ClusterSet: empty");
        if (uniq.size() != members.size()) throw Error("ClusterSet: duplicate member");
        for (int m : uniq)
            if (m < 1 || m > n) throw Error("ClusterSet: member out of range");
        members_.assign(uniq.begin(), uniq.end());
    }

    int ambient_n() const { return n_; }
    std::size_t size() const { return members_.size(); }
    const std::vector<int>& members() const { return members_; }
    bool contains(int j) const {
        return std::binary_search(members_.begin(), members_.end(), j);
    }

  private:
    std::vector<int> members_;
    int n_ = 0;
};

/// 3N-vector of non-negative integers, grouped as N triples.
class MultiIndex {
  public:
    explicit MultiIndex(std::vector<int> entries) : e_(std::move(entries)) {
        if (e_.empty() || e_.size() % 3 != 0) throw InvalidAlpha("MultiIndex: length must be 3N");
        for (int v : e_)
            if (v < 0) throw InvalidAlpha("MultiIndex: negative entry");
    }
    static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(3 * n, 0)); }

    /// alpha with the given triple on electron j (1-based), zeros elsewhere.
    static MultiIndex on_electron(int n, int j, std::array<int, 3> triple) {
        std::vector<int> e(3 * n, 0);
        for (int s = 0; s < 3; ++s) e[3 * (j - 1) + s] = triple[s];
        return MultiIndex(std::move(e));
    }

    int electron_count() const { return static_cast<int>(e_.size() / 3); }
    int operator[](std::size_t i) const { return e_[i]; }
    const std::vector<int>& entries() const { return e_; }
    std::array<int, 3> triple(int j) const {
        return {e_[3 * (j - 1)], e_[3 * (j - 1) + 1], e_[3 * (j - 1) + 2]};
    }

    int order() const { return std::accumulate(e_.begin(), e_.end(), 0); }

    /// Q_alpha = { k : alpha_k != 0 }; empty vector when alpha = 0.
    std::vector<int> support() const {
        std::vector<int> q;
        for (int j = 1; j <= electron_count(); ++j) {
            auto t = triple(j);
            if (t[0] + t[1] + t[2] > 0) q.push_back(j);
        }
        return q;
    }

    bool operator==(const MultiIndex& o) const { return e_ == o.e_; }

    /// Componentwise beta <= alpha.
    bool leq(const MultiIndex& a) const {
        if (e_.size() != a.e_.size()) return false;
        for (std::size_t i = 0; i < e_.size(); ++i)
            if (e_[i] > a.e_[i]) return false;
        return true;
    }

  private:
    std::vector<int> e_;
};

inline int multiindex_order(const MultiIndex& a) { return a.order(); }
inline std::vector<int> multiindex_support(const MultiIndex& a) { return a.support(); }

struct AtomicPotential {
    double Z;
};

struct Nucleus {
    double Z;
    Vec3 R;
};

struct MolecularPotential {
    std::vector<Nucleus> nuclei;
};

/// W = sum_j b_j/|x_j| + sum_{i<j} c_ij/|x_i-x_j|, constant coefficients only.
struct GeneralWPotential {
    std::vector<double> b;                 // per electron, length N
    std::vector<std::vector<double>> c;    // c[i][j] for 0 <= i < j < N; ragged upper triangle
};

class PotentialSpec {
  public:
    using Variant = std::variant<AtomicPotential, MolecularPotential, GeneralWPotential>;

    PotentialSpec(Variant v, int n) : v_(std::move(v)), n_(n) {
        if (n_ < 1) throw Error("PotentialSpec: N >= 1 required");
        if (auto* a = std::get_if<AtomicPotential>(&v_)) {
            if (a->Z <= 0) throw Error("PotentialSpec: atomic Z must be positive");
        } else if (auto* m = std::get_if<MolecularPotential>(&v_)) {
            if (m->nuclei.empty()) throw Error("PotentialSpec: no nuclei");
            for (std::size_t i = 0; i < m->nuclei.size(); ++i) {
                if (m->nuclei[i].Z <= 0) throw Error("PotentialSpec: nuclear charge must be positive");
                for (std::size_t j = i + 1; j < m->nuclei.size(); ++j)
                    if (norm(m->nuclei[i].R - m->nuclei[j].R) == 0.0)
                        throw Error("PotentialSpec: coincident nuclei");
            }
        } else {
            const auto& w = std::get<GeneralWPotential>(v_);
            if (static_cast<int>(w.b.size()) != n_)
                throw Error("PotentialSpec: GeneralW b size mismatch");
            if (!w.c.empty() && static_cast<int>(w.c.size()) != n_)
                throw Error("PotentialSpec: GeneralW c size mismatch");
        }
    }

    static PotentialSpec atomic(double Z, int n) { return PotentialSpec(AtomicPotential{Z}, n); }
    static PotentialSpec molecular(std::vector<Nucleus> nuclei, int n) {
        return PotentialSpec(MolecularPotential{std::move(nuclei)}, n);
    }
    static PotentialSpec general_w(std::vector<double> b, std::vector<std::vector<double>> c, int n) {
        return PotentialSpec(GeneralWPotential{std::move(b), std::move(c)}, n);
    }

    int electron_count() const { return n_; }
    const Variant& variant() const { return v_; }

    bool is_atomic() const { return std::holds_alternative<AtomicPotential>(v_); }
    bool is_molecular() const { return std::holds_alternative<MolecularPotential>(v_); }
    bool is_general_w() const { return std::holds_alternative<GeneralWPotential>(v_); }

    double pair_coupling(int i, int j) const {  // 1-based, i < j
        if (is_general_w()) {
            const auto& w = std::get<GeneralWPotential>(v_);
            if (w.c.empty()) return 0.0;
            return w.c[i - 1][j - 1];
        }
        return 1.0;
    }

  private:
    Variant v_;
    int n_;
};

}  // namespace coulreg

#endif

#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kpgive/dual.hpp"
#include "kpgive/errors.hpp"
#include "kpgive/rational.hpp"

namespace kpgive {

// One time variable x^{(color)}_{level}: color in 1..n, level >= 1.
// The weight of the variable is its level.
struct VarIndex {
    int color = 1;
    int level = 1;
    auto operator<=>(const VarIndex&) const = default;
};

// Product of variables with positive exponents, factors sorted by
// (color, level). The empty product is the monomial 1.
struct Monomial {
    std::vector<std::pair<VarIndex, int>> f;

    static Monomial one() { return Monomial{}; }

    bool is_one() const { return f.empty(); }

    int weight() const {
        int w = 0;
        for (const auto& [v, e] : f) w += v.level * e;
        return w;
    }

    int degree() const {
        int d = 0;
        for (const auto& [v, e] : f) d += e;
        return d;
    }

    int exponent_of(VarIndex v) const {
        for (const auto& [u, e] : f)
            if (u == v) return e;
        return 0;
    }

    Monomial times_var(VarIndex v, int e) const {
        Monomial r = *this;
        auto it = std::lower_bound(r.f.begin(), r.f.end(), v,
                                   [](const auto& p, const VarIndex& w) { return p.first < w; });
        if (it != r.f.end() && it->first == v) {
            it->second += e;
            if (it->second == 0) r.f.erase(it);
        } else if (e != 0) {
            r.f.insert(it, {v, e});
        }
        return r;
    }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial r;
        r.f.reserve(a.f.size() + b.f.size());
        auto ia = a.f.begin(), ib = b.f.begin();
        while (ia != a.f.end() && ib != b.f.end()) {
            if (ia->first < ib->first) r.f.push_back(*ia++);
            else if (ib->first < ia->first) r.f.push_back(*ib++);
            else {
                r.f.push_back({ia->first, ia->second + ib->second});
                ++ia; ++ib;
            }
        }
        r.f.insert(r.f.end(), ia, a.f.end());
        r.f.insert(r.f.end(), ib, b.f.end());
        return r;
    }

    auto operator<=>(const Monomial&) const = default;
};

// Canonical wire key: "x[i,k]^e*..." with factors in (color, level) order,
// "^e" omitted for exponent one, "1" for the empty product.
inline std::string monomial_key(const Monomial& m) {
    if (m.is_one()) return "1";
    std::string out;
    for (std::size_t i = 0; i < m.f.size(); ++i) {
        if (i) out += "*";
        out += "x[" + std::to_string(m.f[i].first.color) + "," +
               std::to_string(m.f[i].first.level) + "]";
        if (m.f[i].second > 1) out += "^" + std::to_string(m.f[i].second);
    }
    return out;
}

// Inverse of monomial_key. Accepts any factor order and repeated variables;
// the result is renormalized to the canonical sorted form.
inline Monomial parse_monomial_key(const std::string& key, int n_colors) {
    Monomial m = Monomial::one();
    auto fail = [&](const std::string& why) {
        throw InconsistentInput("monomial '" + key + "': " + why);
    };
    if (key == "1") return m;
    if (key.empty()) fail("empty key");
    std::size_t pos = 0;
    auto read_int = [&]() {
        std::size_t start = pos;
        while (pos < key.size() && std::isdigit(static_cast<unsigned char>(key[pos]))) ++pos;
        if (pos == start) fail("expected a number");
        return std::stoi(key.substr(start, pos - start));
    };
    while (pos < key.size()) {
        if (key.compare(pos, 2, "x[") != 0) fail("expected 'x['");
        pos += 2;
        int color = read_int();
        if (pos >= key.size() || key[pos] != ',') fail("expected ','");
        ++pos;
        int level = read_int();
        if (pos >= key.size() || key[pos] != ']') fail("expected ']'");
        ++pos;
        int exp = 1;
        if (pos < key.size() && key[pos] == '^') {
            ++pos;
            exp = read_int();
        }
        if (color < 1 || color > n_colors) fail("color out of range");
        if (level < 1) fail("level out of range");
        if (exp < 1) fail("exponent out of range");
        m = m.times_var(VarIndex{color, level}, exp);
        if (pos < key.size()) {
            if (key[pos] != '*') fail("expected '*'");
            ++pos;
            if (pos >= key.size()) fail("dangling '*'");
        }
    }
    return m;
}

// Polynomial truncated by weight. Every monomial of weight <= trust is
// carried exactly; nothing of higher weight is stored. Coefficients are
// never zero. Arithmetic propagates trust by the min rule.
template <class R>
struct TruncPoly {
    int nc = 1;     // number of colors the variable alphabet ranges over
    int trust = 0;  // trusted weight
    std::map<Monomial, R> c;

    TruncPoly() = default;
    TruncPoly(int n_colors, int trust_weight) : nc(n_colors), trust(trust_weight) {}

    static TruncPoly constant(int n_colors, int trust_weight, const R& v) {
        TruncPoly p(n_colors, trust_weight);
        if (!v.is_zero()) p.c.emplace(Monomial::one(), v);
        return p;
    }

    static TruncPoly variable(int n_colors, int trust_weight, VarIndex v) {
        TruncPoly p(n_colors, trust_weight);
        if (v.color < 1 || v.color > n_colors || v.level < 1)
            throw StructuralError("TruncPoly: variable index out of range");
        if (v.level <= trust_weight)
            p.c.emplace(Monomial::one().times_var(v, 1), R::one());
        return p;
    }

    bool is_zero() const { return c.empty(); }

    R coeff(const Monomial& m) const {
        auto it = c.find(m);
        return it == c.end() ? R::zero() : it->second;
    }

    R constant_term() const { return coeff(Monomial::one()); }

    void add_term(const Monomial& m, const R& v) {
        if (v.is_zero() || m.weight() > trust) return;
        auto [it, fresh] = c.emplace(m, v);
        if (!fresh) {
            it->second += v;
            if (it->second.is_zero()) c.erase(it);
        }
    }

    // Lowering trust discards now-untrusted monomials; raising it is not
    // allowed because the discarded tail cannot be recovered.
    void clamp_trust(int t) {
        if (t > trust) throw StructuralError("TruncPoly: cannot raise trust");
        trust = t;
        std::erase_if(c, [t](const auto& kv) { return kv.first.weight() > t; });
    }

    TruncPoly& operator+=(const TruncPoly& o) {
        require_same_space(o);
        int t = std::min(trust, o.trust);
        clamp_trust(t);
        for (const auto& [m, v] : o.c) add_term(m, v);
        return *this;
    }
    TruncPoly& operator-=(const TruncPoly& o) {
        require_same_space(o);
        int t = std::min(trust, o.trust);
        clamp_trust(t);
        for (const auto& [m, v] : o.c) add_term(m, -v);
        return *this;
    }
    friend TruncPoly operator+(TruncPoly a, const TruncPoly& b) { return a += b; }
    friend TruncPoly operator-(TruncPoly a, const TruncPoly& b) { return a -= b; }
    TruncPoly operator-() const {
        TruncPoly r(nc, trust);
        for (const auto& [m, v] : c) r.c.emplace(m, -v);
        return r;
    }

    TruncPoly& operator*=(const R& s) {
        if (s.is_zero()) { c.clear(); return *this; }
        for (auto it = c.begin(); it != c.end();) {
            it->second *= s;
            if (it->second.is_zero()) it = c.erase(it);
            else ++it;
        }
        return *this;
    }
    friend TruncPoly operator*(TruncPoly a, const R& s) { return a *= s; }
    friend TruncPoly operator*(const R& s, TruncPoly a) { return a *= s; }

    friend bool operator==(const TruncPoly& a, const TruncPoly& b) {
        return a.nc == b.nc && a.trust == b.trust && a.c == b.c;
    }

    void require_same_space(const TruncPoly& o) const {
        if (nc != o.nc) throw StructuralError("TruncPoly: color count mismatch");
    }
};

template <class R>
TruncPoly<R> poly_mul(const TruncPoly<R>& a, const TruncPoly<R>& b) {
    a.require_same_space(b);
    TruncPoly<R> r(a.nc, std::min(a.trust, b.trust));
    for (const auto& [ma, va] : a.c) {
        int wa = ma.weight();
        if (wa > r.trust) continue;
        for (const auto& [mb, vb] : b.c) {
            if (wa + mb.weight() > r.trust) continue;
            r.add_term(ma * mb, va * vb);
        }
    }
    return r;
}

// Multiplicative inverse of a series whose constant term is invertible.
// Factor p = c0 (1 + v) with v of positive minimal weight, then invert the
// geometric tail exactly within trust.
template <class R>
TruncPoly<R> poly_invert(const TruncPoly<R>& p) {
    R c0 = p.constant_term();
    if (!c0.is_invertible())
        throw NonUnitConstantTerm("poly_invert: constant term is not invertible");
    R ic0 = c0.inverse();
    TruncPoly<R> negv = -(p * ic0);
    negv.add_term(Monomial::one(), R::one());
    // negv = 1 - p/c0 has zero constant term (for dual coefficients the eps
    // part of the constant also cancels), so powers die past weight trust.
    TruncPoly<R> acc = TruncPoly<R>::constant(p.nc, p.trust, R::one());
    TruncPoly<R> term = acc;
    for (int k = 1; k <= p.trust && !term.is_zero(); ++k) {
        term = poly_mul(term, negv);
        acc += term;
    }
    return acc * ic0;
}

// Formal derivative with respect to one variable. Differentiating by a
// level-k variable exposes weight-(w-k) data of weight-w monomials, so the
// result is trusted only to trust - k.
template <class R>
TruncPoly<R> poly_derivative(const TruncPoly<R>& p, VarIndex v) {
    TruncPoly<R> r(p.nc, p.trust - v.level);
    for (const auto& [m, val] : p.c) {
        int e = m.exponent_of(v);
        if (e == 0) continue;
        r.add_term(m.times_var(v, -1), val * ring_from_rational<R>(Scalar(e)));
    }
    return r;
}

enum class VarFilter {
    OddLevelsOnly,  // set all even-level variables to zero
    LevelOneOnly,   // set all variables of level >= 2 to zero
};

template <class R>
TruncPoly<R> restrict_vars(const TruncPoly<R>& p, VarFilter filter) {
    TruncPoly<R> r(p.nc, p.trust);
    for (const auto& [m, val] : p.c) {
        bool keep = true;
        for (const auto& [v, e] : m.f) {
            bool ok = filter == VarFilter::OddLevelsOnly ? (v.level % 2 == 1)
                                                         : (v.level == 1);
            if (!ok) { keep = false; break; }
        }
        if (keep) r.c.emplace(m, val);
    }
    return r;
}

template <class R>
bool poly_depends_on(const TruncPoly<R>& p, VarIndex v) {
    for (const auto& [m, val] : p.c)
        if (m.exponent_of(v) != 0) return true;
    return false;
}

namespace detail {
inline int floor_div(long a, long b) {
    long q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return static_cast<int>(q);
}
} // namespace detail

// Substitute series with zero constant term for every variable of f.
// Exactness bound: a dropped weight-w monomial of f (w > f.trust) maps to
// terms of weight >= w * min_v(valuation(image_v)/level(v)), so the result
// is trusted to min(image trusts, floor(f.trust * min ratio)); asking for
// more is refused.
template <class R>
TruncPoly<R> substitute_series(const TruncPoly<R>& f,
                               const std::map<VarIndex, TruncPoly<R>>& images,
                               int target_nc, int target_trust) {
    int achievable = target_trust;
    long ratio_num = 1, ratio_den = 1;  // min over images of valuation/level
    bool have_ratio = false;
    for (const auto& [v, img] : images) {
        if (img.nc != target_nc)
            throw StructuralError("substitute_series: image color count mismatch");
        if (!img.constant_term().is_zero())
            throw StructuralError("substitute_series: image has nonzero constant term");
        achievable = std::min(achievable, img.trust);
        int val = img.trust + 1;  // valuation: min weight of a present monomial
        for (const auto& [m, coeff] : img.c) val = std::min(val, m.weight());
        if (!have_ratio || static_cast<long>(val) * ratio_den < ratio_num * v.level) {
            ratio_num = val;
            ratio_den = v.level;
            have_ratio = true;
        }
    }
    if (have_ratio)
        achievable = std::min(achievable,
                              detail::floor_div(static_cast<long>(f.trust) * ratio_num, ratio_den));
    else
        achievable = std::min(achievable, f.trust);
    if (target_trust > achievable)
        throw TrustExceeded("substitute_series: requested trust " + std::to_string(target_trust) +
                            " exceeds achievable " + std::to_string(achievable));

    TruncPoly<R> out(target_nc, target_trust);
    for (const auto& [m, val] : f.c) {
        TruncPoly<R> term = TruncPoly<R>::constant(target_nc, target_trust, val);
        bool dead = false;
        for (const auto& [v, e] : m.f) {
            auto it = images.find(v);
            if (it == images.end())
                throw StructuralError("substitute_series: no image for a variable of f");
            for (int k = 0; k < e && !dead; ++k) {
                term = poly_mul(term, it->second);
                dead = term.is_zero();
            }
            if (dead) break;
        }
        if (!dead) out += term;
    }
    return out;
}

// Invert a flat coordinate change t^i = L x + N(x) (level-one variables,
// zero constant terms, same color count on both sides). Returns x^i as
// series in t to the requested trust via the fixed point
// x <- L^{-1} (t - N(x)), which stabilizes one weight per pass.
template <class R>
std::vector<TruncPoly<R>> invert_coordinate_map(const std::vector<TruncPoly<R>>& tmap,
                                                int trust) {
    int n = static_cast<int>(tmap.size());
    if (n == 0) throw StructuralError("invert_coordinate_map: empty map");
    int nc = tmap[0].nc;
    for (const auto& p : tmap) {
        if (p.nc != nc) throw StructuralError("invert_coordinate_map: mixed color counts");
        if (!p.constant_term().is_zero())
            throw StructuralError("invert_coordinate_map: nonzero constant term");
        for (const auto& [m, v] : p.c)
            for (const auto& [var, e] : m.f)
                if (var.level != 1)
                    throw StructuralError("invert_coordinate_map: variable of level >= 2");
    }
    if (nc != n)
        throw StructuralError("invert_coordinate_map: map must be square over its colors");

    // Linear part L[i][j] = coefficient of x^{(j)}_1 in tmap[i].
    std::vector<std::vector<R>> L(n, std::vector<R>(n, R::zero()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            L[i][j] = tmap[i].coeff(Monomial::one().times_var({j + 1, 1}, 1));

    // Gauss-Jordan inverse of L; pivots must be invertible in R.
    std::vector<std::vector<R>> inv(n, std::vector<R>(n, R::zero()));
    for (int i = 0; i < n; ++i) inv[i][i] = R::one();
    std::vector<std::vector<R>> A = L;
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (A[r][col].is_invertible()) { piv = r; break; }
        if (piv < 0) throw NonInvertibleFlatMap("invert_coordinate_map: singular linear part");
        std::swap(A[piv], A[col]);
        std::swap(inv[piv], inv[col]);
        R d = A[col][col].inverse();
        for (int j = 0; j < n; ++j) { A[col][j] *= d; inv[col][j] *= d; }
        for (int r = 0; r < n; ++r) {
            if (r == col || A[r][col].is_zero()) continue;
            R f = A[r][col];
            for (int j = 0; j < n; ++j) {
                A[r][j] -= f * A[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }

    // Nonlinear part N = tmap - L x, kept as polynomials in x.
    std::vector<TruncPoly<R>> N = tmap;
    for (int i = 0; i < n; ++i) {
        N[i].clamp_trust(std::min(N[i].trust, trust));
        for (int j = 0; j < n; ++j)
            N[i].add_term(Monomial::one().times_var({j + 1, 1}, 1), -L[i][j]);
    }

    // Iterate x_i <- sum_j inv[i][j] (t_j - N_j(x)) in the t alphabet.
    std::vector<TruncPoly<R>> x(n, TruncPoly<R>(n, trust));
    for (int pass = 0; pass <= trust; ++pass) {
        std::map<VarIndex, TruncPoly<R>> img;
        for (int j = 0; j < n; ++j) img[{j + 1, 1}] = x[j];
        std::vector<TruncPoly<R>> next(n, TruncPoly<R>(n, trust));
        for (int i = 0; i < n; ++i) {
            TruncPoly<R> rhs(n, trust);
            for (int j = 0; j < n; ++j) {
                TruncPoly<R> tj = TruncPoly<R>::variable(n, trust, {j + 1, 1});
                tj -= substitute_series(N[j], img, n, trust);
                rhs += tj * inv[i][j];
            }
            next[i] = rhs;
        }
        if (next == x) break;
        x = next;
    }
    return x;
}

} // namespace kpgive

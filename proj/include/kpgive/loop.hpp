#pragma once

#include <set>
#include <vector>

#include "kpgive/gamma.hpp"

namespace kpgive {

// Scalar n x n matrices over R with the few operations the loop layer needs.
template <class R>
using Mat = std::vector<std::vector<R>>;

template <class R>
Mat<R> mat_zero(int n) {
    return Mat<R>(n, std::vector<R>(n, R::zero()));
}

template <class R>
Mat<R> mat_identity(int n) {
    Mat<R> m = mat_zero<R>(n);
    for (int i = 0; i < n; ++i) m[i][i] = R::one();
    return m;
}

template <class R>
Mat<R> mat_add(const Mat<R>& a, const Mat<R>& b) {
    Mat<R> r = a;
    for (size_t i = 0; i < r.size(); ++i)
        for (size_t j = 0; j < r.size(); ++j) r[i][j] += b[i][j];
    return r;
}

template <class R>
Mat<R> mat_mul(const Mat<R>& a, const Mat<R>& b) {
    int n = static_cast<int>(a.size());
    Mat<R> r = mat_zero<R>(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (a[i][k].is_zero()) continue;
            for (int j = 0; j < n; ++j) r[i][j] += a[i][k] * b[k][j];
        }
    return r;
}

template <class R>
Mat<R> mat_scale(const Mat<R>& a, const R& s) {
    Mat<R> r = a;
    for (auto& row : r)
        for (auto& x : row) x *= s;
    return r;
}

template <class R>
Mat<R> mat_transpose(const Mat<R>& a) {
    int n = static_cast<int>(a.size());
    Mat<R> r = mat_zero<R>(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i][j] = a[j][i];
    return r;
}

template <class R>
bool mat_is_zero(const Mat<R>& a) {
    for (const auto& row : a)
        for (const auto& x : row)
            if (!x.is_zero()) return false;
    return true;
}

// One homogeneous piece r_l of a loop algebra element, attached to the
// loop-parameter power dir * l with l = level >= 1.
template <class R>
struct LoopTerm {
    int level = 1;
    Mat<R> m;
};

// Twisted loop algebra element supported on one sign of loop powers:
// a = sum_l r_l zeta^{dir l}. The twist a(-zeta)^t + a(zeta) = 0 forces
// r_l^t = (-1)^{l+1} r_l per level.
template <class R>
struct LoopAlg {
    int n = 1;
    int dir = 1;  // +1: raising (positive powers), -1: lowering
    std::vector<LoopTerm<R>> terms;

    int max_level() const {
        int l = 0;
        for (const auto& t : terms) l = std::max(l, t.level);
        return l;
    }
};

// Ordered product of exponentials exp(a_1) ... exp(a_m).
template <class R>
struct LoopGrp {
    int n = 1;
    std::vector<LoopAlg<R>> factors;
};

using LoopAlgebraElement = LoopAlg<Scalar>;
using LoopGroupElement = LoopGrp<Scalar>;

template <class R>
bool is_twisted_algebra(const LoopAlg<R>& a) {
    for (const auto& t : a.terms) {
        Mat<R> d = t.m;
        Mat<R> tr = mat_transpose(t.m);
        R sg = (t.level % 2 == 1) ? R::one() : -R::one();
        for (size_t i = 0; i < d.size(); ++i)
            for (size_t j = 0; j < d.size(); ++j)
                if (!(tr[i][j] - sg * t.m[i][j]).is_zero()) return false;
    }
    return true;
}

template <class R>
void require_twisted(const LoopAlg<R>& a) {
    if (!is_twisted_algebra(a))
        throw NotTwisted("loop algebra element violates r_l^t = (-1)^{l+1} r_l");
}

template <class R>
void require_twisted(const LoopGrp<R>& g) {
    for (const auto& f : g.factors) require_twisted(f);
}

inline bool coeff_eps_only(const Scalar& v) { return v.is_zero(); }
inline bool coeff_eps_only(const DualScalar& v) { return v.value().is_zero(); }

// A factor with eps-only coefficients exponentiates to 1 + eps a exactly, so
// it shifts energy at most once by a bounded amount instead of an unbounded
// geometric tail.
template <class R>
bool is_eps_factor(const LoopAlg<R>& f) {
    bool any = false;
    for (const auto& t : f.terms)
        for (const auto& row : t.m)
            for (const auto& v : row) {
                if (v.is_zero()) continue;
                if (!coeff_eps_only(v)) return false;
                any = true;
            }
    return any;
}

// Fock pairings of a group element are finite sums only when every raising
// factor stands left of every lowering factor: the rightmost factors act
// first, lowering directions terminate on any finite vector, and a raising
// truncation is final once nothing can map dropped states back down. Any
// other order has tau coefficients that are infinite series (already
// <0|exp(s)exp(r)|0> = exp(<s,r>)), which exact truncation would silently
// misreport. Eps-only factors are exempt but must sit rightmost: applied
// first, on vectors far below the cut, their single bounded shift never
// drops states.
template <class R>
void require_factor_order(const LoopGrp<R>& g) {
    bool seen_lowering = false;
    bool seen_eps = false;
    for (const auto& f : g.factors) {
        if (is_eps_factor(f)) {
            seen_eps = true;
            continue;
        }
        if (seen_eps)
            throw InconsistentInput(
                "eps-direction factors must be the rightmost group factors");
        if (f.dir == -1) seen_lowering = true;
        else if (seen_lowering)
            throw InconsistentInput(
                "group factors must place raising exponentials before lowering ones");
    }
}

// ring_mul: multiply a Fock coefficient by a matrix entry of the acting
// element (the entry ring embeds into polynomial coefficients directly).
inline Scalar ring_mul(const Scalar& c, const Scalar& r) { return c * r; }
inline DualScalar ring_mul(const DualScalar& c, const DualScalar& r) { return c * r; }
template <class R>
TruncPoly<R> ring_mul(const TruncPoly<R>& c, const R& r) {
    return c * r;
}

// Derivation action of one homogeneous piece on one basis state: replace
// each present wedge factor v^{(i)} at slot m2 by sum_j entry(j,i) v^{(j)}
// at slot m2 + 2 l dir. A replacement survives only if the source slot is
// occupied and the target slot is free, which limits candidate sources to
// particles, slots adjacent to holes, and (when raising) the sea surface.
template <class R, class C>
void apply_loop_term(const LoopTerm<R>& term, int dir, const FockVec<C>& v, FockVec<C>& out) {
    int shift = 2 * term.level * dir;
    int n = v.n;
    for (const auto& [s, c] : v.t) {
        for (int i = 1; i <= n; ++i) {       // source color
            std::set<int> cand;
            for (int m2 : s.part[i - 1]) cand.insert(m2);
            if (dir > 0)
                for (int m2 = -2 * term.level + 1; m2 <= -1; m2 += 2) cand.insert(m2);
            for (int j = 1; j <= n; ++j) {   // target color
                const R& entry = term.m[j - 1][i - 1];
                if (entry.is_zero()) continue;
                std::set<int> srcs = cand;
                for (int h2 : s.hole[j - 1]) srcs.insert(h2 - shift);
                for (int m2s : srcs) {
                    FockState ns = s;
                    int sg1 = apply_psi_state(-1, i, m2s, ns);
                    if (sg1 == 0) continue;
                    int sg2 = apply_psi_state(+1, j, -(m2s + shift), ns);
                    if (sg2 == 0) continue;
                    C val = ring_mul(c, entry);
                    out.add(ns, (sg1 * sg2) > 0 ? val : -val);
                }
            }
        }
    }
}

template <class R, class C>
FockVec<C> apply_loop_algebra(const LoopAlg<R>& a, const FockVec<C>& v) {
    FockVec<C> out;
    out.n = v.n;
    out.cut = v.cut;
    for (const auto& t : a.terms) apply_loop_term(t, a.dir, v, out);
    return out;
}

// exp(a) v as a terminating series: lowering elements strictly decrease
// doubled energy (floor 0), raising ones are clamped by the cutoff.
template <class R, class C>
FockVec<C> apply_loop_group_factor(const LoopAlg<R>& a, const FockVec<C>& v) {
    FockVec<C> acc = v;
    FockVec<C> term = v;
    for (int p = 1; !term.is_zero(); ++p) {
        FockVec<C> next = apply_loop_algebra(a, term);
        Scalar invp(1, p);
        for (auto it = next.t.begin(); it != next.t.end();) {
            it->second = coeff_scale_rat(it->second, invp);
            if (it->second.is_zero()) it = next.t.erase(it);
            else ++it;
        }
        term = std::move(next);
        acc += term;
    }
    return acc;
}

template <class R, class C>
FockVec<C> apply_loop_group(const LoopGrp<R>& g, const FockVec<C>& v) {
    FockVec<C> out = v;
    for (auto it = g.factors.rbegin(); it != g.factors.rend(); ++it)
        out = apply_loop_group_factor(*it, out);
    return out;
}

// Matrix series of exp(a) in powers of zeta^{dir}: coefficients 0..Z of
// exp(sum_l r_l X^l) with X = zeta^{dir}.
template <class R>
std::vector<Mat<R>> factor_series(const LoopAlg<R>& a, int Z) {
    std::vector<Mat<R>> acc(Z + 1, mat_zero<R>(a.n)), term = acc;
    acc[0] = mat_identity<R>(a.n);
    term[0] = mat_identity<R>(a.n);
    for (int p = 1; p <= Z; ++p) {
        std::vector<Mat<R>> next(Z + 1, mat_zero<R>(a.n));
        bool nonzero = false;
        for (int k = 0; k <= Z; ++k) {
            if (mat_is_zero(term[k])) continue;
            for (const auto& t : a.terms) {
                if (k + t.level > Z) continue;
                Mat<R> prod = mat_scale(mat_mul(term[k], t.m),
                                        ring_from_rational<R>(Scalar(1, p)));
                next[k + t.level] = mat_add(next[k + t.level], prod);
                nonzero = true;
            }
        }
        term = std::move(next);
        for (int k = 0; k <= Z; ++k) acc[k] = mat_add(acc[k], term[k]);
        if (!nonzero) break;
    }
    return acc;
}

// Common direction of a group's factors: +1, -1, or 0 when mixed.
template <class R>
int group_direction(const LoopGrp<R>& g) {
    int d = 0;
    for (const auto& f : g.factors) {
        if (f.terms.empty()) continue;
        if (d == 0) d = f.dir;
        else if (d != f.dir) return 0;
    }
    return d == 0 ? 1 : d;
}

// Series of the whole product in powers of zeta^{dir}; only defined when
// all factors share one direction.
template <class R>
std::vector<Mat<R>> group_series(const LoopGrp<R>& g, int Z) {
    int d = group_direction(g);
    if (d == 0)
        throw StructuralError("group_series: factors mix loop-parameter directions");
    std::vector<Mat<R>> acc(Z + 1, mat_zero<R>(g.n));
    acc[0] = mat_identity<R>(g.n);
    for (const auto& f : g.factors) {
        auto fs = factor_series(f, Z);
        std::vector<Mat<R>> next(Z + 1, mat_zero<R>(g.n));
        for (int p = 0; p <= Z; ++p)
            for (int q = 0; p + q <= Z; ++q)
                next[p + q] = mat_add(next[p + q], mat_mul(acc[p], fs[q]));
        acc = std::move(next);
    }
    return acc;
}

// Group twist law R(-zeta)^t R(zeta) = Id, checked on the series through
// order Z when the product has one direction; mixed-direction products are
// certified factor by factor (each factor is the exponential of a twisted
// element, which implies the law for the product).
template <class R>
bool is_twisted_group(const LoopGrp<R>& g, int Z) {
    for (const auto& f : g.factors)
        if (!is_twisted_algebra(f)) return false;
    if (group_direction(g) == 0) return true;
    auto s = group_series(g, Z);
    for (int k = 0; k <= Z; ++k) {
        Mat<R> sum = mat_zero<R>(g.n);
        for (int p = 0; p <= k; ++p) {
            Mat<R> piece = mat_mul(mat_transpose(s[p]), s[k - p]);
            if (p % 2 == 1) piece = mat_scale(piece, -R::one());
            sum = mat_add(sum, piece);
        }
        if (k == 0) sum = mat_add(sum, mat_scale(mat_identity<R>(g.n), -R::one()));
        if (!mat_is_zero(sum)) return false;
    }
    return true;
}

// Single-factor logarithm of a series Id + sum_{k>=1} M_k X^k, truncated at
// level Z. The result is checked against the twist law.
template <class R>
LoopAlg<R> algebra_from_series(int n, int dir, const std::vector<Mat<R>>& series, int Z) {
    std::vector<Mat<R>> u(Z + 1, mat_zero<R>(n));  // series - Id
    for (int k = 1; k <= Z && k < static_cast<int>(series.size()); ++k) u[k] = series[k];
    std::vector<Mat<R>> logm(Z + 1, mat_zero<R>(n));
    std::vector<Mat<R>> pw = u;
    for (int p = 1; p <= Z; ++p) {
        Scalar c(p % 2 == 1 ? 1 : -1, p);
        for (int k = 0; k <= Z; ++k)
            logm[k] = mat_add(logm[k], mat_scale(pw[k], ring_from_rational<R>(c)));
        std::vector<Mat<R>> next(Z + 1, mat_zero<R>(n));
        for (int a = 1; a <= Z; ++a)
            for (int b = 1; a + b <= Z; ++b)
                next[a + b] = mat_add(next[a + b], mat_mul(pw[a], u[b]));
        pw = std::move(next);
    }
    LoopAlg<R> out;
    out.n = n;
    out.dir = dir;
    for (int l = 1; l <= Z; ++l)
        if (!mat_is_zero(logm[l])) out.terms.push_back({l, logm[l]});
    require_twisted(out);
    return out;
}

template <class R>
LoopAlg<R> scale_algebra(LoopAlg<R> a, const R& s) {
    for (auto& t : a.terms) t.m = mat_scale(t.m, s);
    return a;
}

// Lift rational elements into the dual-number ring, optionally along eps.
inline LoopAlg<DualScalar> lift_algebra(const LoopAlg<Scalar>& a, bool along_eps) {
    LoopAlg<DualScalar> out;
    out.n = a.n;
    out.dir = a.dir;
    for (const auto& t : a.terms) {
        LoopTerm<DualScalar> nt;
        nt.level = t.level;
        nt.m = mat_zero<DualScalar>(a.n);
        for (int i = 0; i < a.n; ++i)
            for (int j = 0; j < a.n; ++j)
                nt.m[i][j] = along_eps ? DualScalar::eps(t.m[i][j]) : DualScalar(t.m[i][j]);
        out.terms.push_back(std::move(nt));
    }
    return out;
}

inline LoopGrp<DualScalar> lift_group(const LoopGrp<Scalar>& g) {
    LoopGrp<DualScalar> out;
    out.n = g.n;
    for (const auto& f : g.factors) out.factors.push_back(lift_algebra(f, false));
    return out;
}

} // namespace kpgive

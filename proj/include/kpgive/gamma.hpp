#pragma once

#include <climits>
#include <map>
#include <vector>

#include "kpgive/fock.hpp"

namespace kpgive {

// Uniform coefficient products so exponential loops work for plain ring
// coefficients and for truncated-polynomial coefficients alike.
inline Scalar coeff_mul(const Scalar& a, const Scalar& b) { return a * b; }
inline DualScalar coeff_mul(const DualScalar& a, const DualScalar& b) { return a * b; }
template <class R>
TruncPoly<R> coeff_mul(const TruncPoly<R>& a, const TruncPoly<R>& b) {
    return poly_mul(a, b);
}

inline Scalar coeff_scale_rat(const Scalar& a, const Scalar& s) { return a * s; }
inline DualScalar coeff_scale_rat(const DualScalar& a, const Scalar& s) {
    return a * DualScalar(s);
}
template <class R>
TruncPoly<R> coeff_scale_rat(const TruncPoly<R>& a, const Scalar& s) {
    return a * ring_from_rational<R>(s);
}

template <class C>
FockVec<C> mul_coeff(const FockVec<C>& v, const C& f) {
    FockVec<C> r;
    r.n = v.n;
    r.cut = v.cut;
    for (const auto& [s, c] : v.t) r.add(s, coeff_mul(c, f));
    return r;
}

// Formal Laurent object: z-power slots holding Fock vectors. Slots outside
// a caller-chosen window are dropped by the operations below; the window is
// part of the trust region.
template <class C>
using ZGraded = std::map<int, FockVec<C>>;

template <class C>
void zg_add(ZGraded<C>& acc, int zp, const FockVec<C>& v, int zlo, int zhi) {
    if (v.is_zero() || zp < zlo || zp > zhi) return;
    auto it = acc.find(zp);
    if (it == acc.end()) acc.emplace(zp, v);
    else {
        it->second += v;
        if (it->second.is_zero()) acc.erase(it);
    }
}

// exp( sum_{k=1..K} coeff[k-1] z^{ez k} alpha^{(ci cj)}_{e k} ) applied to a
// z-graded vector. e = +1 applications strictly lower doubled energy, so
// the series terminates on its own; e = -1 applications raise it and are
// clamped by the vectors' cutoff. States below floor_e2 are discarded
// (callers pass a floor only when later operators cannot raise energy).
template <class C>
ZGraded<C> alpha_exp_z(int ci, int cj, int e, int ez, const std::vector<C>& coeff,
                       const ZGraded<C>& v, int zlo, int zhi, int floor_e2 = INT_MIN / 2) {
    ZGraded<C> acc = v;
    ZGraded<C> term = v;
    int K = static_cast<int>(coeff.size());
    for (int p = 1; !term.empty(); ++p) {
        ZGraded<C> next;
        Scalar invp = Scalar(1, p);
        for (const auto& [zp, vec] : term) {
            for (int k = 1; k <= K; ++k) {
                if (coeff[k - 1].is_zero()) continue;
                FockVec<C> w = apply_alpha(ci, cj, e * k, vec);
                if (w.is_zero()) continue;
                w = mul_coeff(w, coeff[k - 1]);
                for (auto it = w.t.begin(); it != w.t.end();) {
                    it->second = coeff_scale_rat(it->second, invp);
                    if (it->second.is_zero() || it->first.energy2() < floor_e2)
                        it = w.t.erase(it);
                    else
                        ++it;
                }
                zg_add(next, zp + ez * k, w, zlo, zhi);
            }
        }
        term = std::move(next);
        for (const auto& [zp, vec] : term) zg_add(acc, zp, vec, zlo, zhi);
    }
    return acc;
}

// Plain (z-independent) exponential on a single Fock vector.
template <class C>
FockVec<C> alpha_exp(int ci, int cj, int e, const std::vector<C>& coeff, const FockVec<C>& v,
                     int floor_e2 = INT_MIN / 2) {
    ZGraded<C> zin;
    zin.emplace(0, v);
    ZGraded<C> zout = alpha_exp_z(ci, cj, e, 0, coeff, zin, 0, 0, floor_e2);
    auto it = zout.find(0);
    if (it != zout.end()) return it->second;
    FockVec<C> empty;
    empty.n = v.n;
    empty.cut = v.cut;
    return empty;
}

template <class R>
FockVec<TruncPoly<R>> to_poly_vec(const FockVec<R>& v, int nc, int trust) {
    FockVec<TruncPoly<R>> r;
    r.n = v.n;
    r.cut = v.cut;
    for (const auto& [s, c] : v.t) r.t.emplace(s, TruncPoly<R>::constant(nc, trust, c));
    return r;
}

// Gamma_+(x): the product over colors j of exp(sum_k x^{(j)}_k alpha^{(j)}_k),
// with the time variables as polynomial coefficients trusted to weight W.
// All factors lower energy, so states below floor_e2 cannot contribute to
// extractions at or above the floor and are pruned eagerly.
template <class R>
FockVec<TruncPoly<R>> gamma_plus_x(const FockVec<TruncPoly<R>>& v, int W,
                                   int floor_e2 = INT_MIN / 2) {
    FockVec<TruncPoly<R>> r = v;
    int nc = 0;
    for (const auto& [s, c] : v.t) { nc = c.nc; break; }
    if (nc == 0) return r;
    for (int j = 1; j <= v.n; ++j) {
        std::vector<TruncPoly<R>> coeff;
        for (int k = 1; k <= W; ++k)
            coeff.push_back(TruncPoly<R>::variable(nc, W, {j, k}));
        r = alpha_exp(j, j, +1, coeff, r, floor_e2);
    }
    return r;
}

// z^{e alpha_0^{(color)}}: shifts each slot by e times the color charge.
template <class C>
ZGraded<C> zpow_charge(int color, int e, const ZGraded<C>& v, int zlo, int zhi) {
    ZGraded<C> out;
    for (const auto& [zp, vec] : v)
        for (const auto& [s, c] : vec.t) {
            FockVec<C> one;
            one.n = vec.n;
            one.cut = vec.cut;
            one.t.emplace(s, c);
            zg_add(out, zp + e * s.charge(color), one, zlo, zhi);
        }
    return out;
}

template <class C>
ZGraded<C> zg_apply_Q(int i, int e, const ZGraded<C>& v) {
    ZGraded<C> out;
    for (const auto& [zp, vec] : v) {
        FockVec<C> w = apply_Q(i, e, vec);
        if (!w.is_zero()) out.emplace(zp, std::move(w));
    }
    return out;
}

// Left side of the fermion-boson vertex identity: the mode expansion
// psi^{+-(i)}(z) w = sum_l (psi at doubled mode -2l-1) w z^l.
template <class C>
ZGraded<C> vertex_lhs(int sign, int i, const FockVec<C>& w, int zlo, int zhi) {
    ZGraded<C> out;
    for (int l = zlo; l <= zhi; ++l)
        zg_add(out, l, apply_psi(sign, i, -2 * l - 1, w), zlo, zhi);
    return out;
}

// Right side: Q_i^{+-1} z^{+-alpha_0^{(i)}} exp(+-sum [z]_k alpha_{-k})
// exp(-+sum [z^{-1}]_k alpha_{+k}) w, with [z]_k = z^k / k. The vector's
// cutoff must carry enough slack for the intermediate energy excursion.
template <class C>
ZGraded<C> vertex_rhs(int sign, int i, const FockVec<C>& w, int zlo, int zhi) {
    int K = (w.cut + 1) / 2 + std::max(std::abs(zlo), std::abs(zhi)) + 1;
    std::vector<C> cminus, cplus;
    for (int k = 1; k <= K; ++k) {
        Scalar t(1, k);
        cminus.push_back(ring_from_rational<C>(sign > 0 ? -t : t));  // pairs with alpha_{+k}
        cplus.push_back(ring_from_rational<C>(sign > 0 ? t : -t));   // pairs with alpha_{-k}
    }
    ZGraded<C> v;
    v.emplace(0, w);
    int zslack_lo = zlo - w.cut - 2, zslack_hi = zhi + w.cut + 2;
    v = alpha_exp_z(i, i, +1, -1, cminus, v, zslack_lo, zslack_hi);
    v = alpha_exp_z(i, i, -1, +1, cplus, v, zslack_lo, zslack_hi);
    v = zpow_charge(i, sign, v, zslack_lo, zslack_hi);
    v = zg_apply_Q(i, sign > 0 ? +1 : -1, v);
    ZGraded<C> out;
    for (const auto& [zp, vec] : v) zg_add(out, zp, vec, zlo, zhi);
    return out;
}

} // namespace kpgive

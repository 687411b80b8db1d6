// Genus-zero tangent flows: theta-form and Psi-form derivative formulas for
// the action of twisted loop-algebra elements, the exact dual-number oracle,
// and the equivalence checker tying them together.
#pragma once

#include "kpgive/frobenius.hpp"

#include <optional>
#include <sstream>
#include <string>

namespace kpgive {

namespace detail {

inline std::string monomial_label(const Monomial& m) { return monomial_key(m); }

// First coefficient present in exactly one of the polynomials, or present in
// both with different values. Empty when the polynomials agree.
template <class R>
std::optional<std::string> poly_diff_probe(const TruncPoly<R>& a, const TruncPoly<R>& b) {
    TruncPoly<R> d = a;
    d -= b;
    if (d.is_zero()) return std::nullopt;
    return monomial_label(d.c.begin()->first);
}

template <class R>
std::optional<std::string> series_diff_probe(const MatrixSeries<R>& a,
                                             const MatrixSeries<R>& b) {
    int zt = std::min(a.ztrust, b.ztrust);
    for (int l = 0; l <= zt; ++l)
        for (int i = 0; i < a.n; ++i)
            for (int j = 0; j < a.n; ++j)
                if (auto p = poly_diff_probe(a.a[l].at(i, j), b.a[l].at(i, j))) {
                    std::ostringstream os;
                    os << "z^" << l << " entry (" << i + 1 << "," << j + 1 << ") at "
                       << *p;
                    return os.str();
                }
    return std::nullopt;
}

// Constant matrix lifted into the polynomial-matrix alphabet.
template <class R>
PolyMat<R> const_mat(const Mat<Scalar>& m, int nc, int trust) {
    int n = static_cast<int>(m.size());
    PolyMat<R> out(n, nc, trust);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!m[i][j].is_zero())
                out.at(i, j) = TruncPoly<R>::constant(nc, trust,
                                                      ring_from_rational<R>(m[i][j]));
    return out;
}

inline Mat<Scalar> level_matrix(const LoopAlg<Scalar>& a, int level) {
    for (const auto& t : a.terms)
        if (t.level == level) return t.m;
    return Mat<Scalar>(a.n, std::vector<Scalar>(a.n, Scalar(0)));
}

} // namespace detail

// theta^{(a)} s theta^{(b)t} contraction of two theta rows through a constant
// matrix.
template <class R>
TruncPoly<R> theta_bilinear(const std::vector<TruncPoly<R>>& left,
                            const Mat<Scalar>& mid,
                            const std::vector<TruncPoly<R>>& right) {
    int n = static_cast<int>(left.size());
    TruncPoly<R> out(left[0].nc, std::min(left[0].trust, right[0].trust));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (mid[i][j].is_zero()) continue;
            out += poly_mul(left[i], right[j]) * ring_from_rational<R>(mid[i][j]);
        }
    return out;
}

// Lowering-direction flow of the potential in flat coordinates:
// s.F = -1/2 theta^0 s3 theta^0t + theta^0 s2 theta^1t - theta^0 s1 theta^2t
//       + 1/2 theta^1 s1 theta^1t.
// Levels beyond 3 cannot contribute and are ignored.
template <class R>
TruncPoly<R> lee_sF(const LoopAlg<Scalar>& s, const FrobeniusData<R>& f) {
    if (s.dir != -1) throw StructuralError("lee_sF: expects a lowering element");
    require_twisted(s);
    if (f.D < 2) throw TrustExceeded("lee_sF: theta depth below 2");
    Mat<Scalar> s1 = detail::level_matrix(s, 1);
    Mat<Scalar> s2 = detail::level_matrix(s, 2);
    Mat<Scalar> s3 = detail::level_matrix(s, 3);
    const auto& th = f.theta_t;
    TruncPoly<R> out = theta_bilinear(th[0], s3, th[0]) *
                       ring_from_rational<R>(Scalar(-1, 2));
    out += theta_bilinear(th[0], s2, th[1]);
    out -= theta_bilinear(th[0], s1, th[2]);
    out += theta_bilinear(th[1], s1, th[1]) * ring_from_rational<R>(Scalar(1, 2));
    return out;
}

// Raising-direction flow of the potential in flat coordinates, summed over
// the levels of r:
// (r_l zeta^l).F = -theta^{(l+3)} r_l theta^{(0)t} + theta^{(l+2)} r_l theta^{(1)t}
//   + 1/2 sum_{m+m'=l-1} (-1)^{m'+1} theta^{(m+2)} r_l theta^{(m'+2)t}.
template <class R>
TruncPoly<R> lee_rF(const LoopAlg<Scalar>& r, const FrobeniusData<R>& f) {
    if (r.dir != +1) throw StructuralError("lee_rF: expects a raising element");
    require_twisted(r);
    const auto& th = f.theta_t;
    TruncPoly<R> out(f.n, f.trust);
    for (const auto& term : r.terms) {
        int l = term.level;
        if (f.D < l + 3) throw TrustExceeded("lee_rF: theta depth below level+3");
        out -= theta_bilinear(th[l + 3], term.m, th[0]);
        out += theta_bilinear(th[l + 2], term.m, th[1]);
        for (int m = 0; m < l; ++m) {
            int m2 = l - 1 - m;
            TruncPoly<R> piece = theta_bilinear(th[m + 2], term.m, th[m2 + 2]) *
                                 ring_from_rational<R>(Scalar(m2 % 2 == 0 ? -1 : 1, 2));
            out += piece;
        }
    }
    return out;
}

// The same flows expressed through the wave matrix in the level-one regime,
// [M] denoting the sum of all matrix entries:
//   s-case: 1/2 [Psi_0^t (sum_{w,i+j=3-w} (-1)^{j+1} Psi_i s_w Psi_j^t) Psi_0]
//   r-case: -1/2 [Psi_0^t (sum_{i=0}^{l+3} (-1)^i Psi_{l+3-i} r_l Psi_i^t) Psi_0]
template <class R>
TruncPoly<R> lee_dF_psi(const LoopAlg<Scalar>& a, const MatrixSeries<R>& psi_full) {
    require_twisted(a);
    MatrixSeries<R> psi = restrict_series_vars(psi_full, VarFilter::LevelOneOnly);
    int n = psi.n, nc = psi.nc, W = psi.wtrust();
    PolyMat<R> mid(n, nc, W);
    Scalar pref;
    if (a.dir == -1) {
        if (psi.ztrust < 3)
            throw TrustExceeded("lee_dF_psi: needs z-orders through 3");
        for (int w = 1; w <= 3; ++w) {
            PolyMat<R> sw = detail::const_mat<R>(detail::level_matrix(a, w), nc, W);
            if (sw.is_zero()) continue;
            for (int i = 0; i + w <= 3; ++i) {
                int j = 3 - w - i;
                PolyMat<R> t = psi.a[i] * sw * psi.a[j].transpose();
                if (j % 2 == 0)
                    mid = mid - t;
                else
                    mid = mid + t;
            }
        }
        pref = Scalar(1, 2);
    } else {
        for (const auto& term : a.terms) {
            int l = term.level;
            if (psi.ztrust < l + 3)
                throw TrustExceeded("lee_dF_psi: needs z-orders through level+3");
            PolyMat<R> rl = detail::const_mat<R>(term.m, nc, W);
            for (int i = 0; i <= l + 3; ++i) {
                PolyMat<R> t = psi.a[l + 3 - i] * rl * psi.a[i].transpose();
                if (i % 2 == 0)
                    mid = mid + t;
                else
                    mid = mid - t;
            }
        }
        pref = Scalar(-1, 2);
    }
    return (psi.a[0].transpose() * mid * psi.a[0]).bracket_sum() *
           ring_from_rational<R>(pref);
}

// KP-side first-order flow of the wave matrix.
//   s-case (any regime): s.Psi_k = sum_{i=0}^{k-1} Psi_i s_{k-i}.
//   r-case (odd regime): (r zeta^l).Psi_k = Psi_{l+k} r
//     - sum_{p=1}^{l} sum_{q=0}^{l-p} (-1)^{l-p-q} Psi_q r Psi_{l-p-q}^t Psi_{p+k}.
// Multi-level r acts by summing the per-level flows.
template <class R>
MatrixSeries<R> kp_dPsi(const LoopAlg<Scalar>& a, const MatrixSeries<R>& psi) {
    require_twisted(a);
    int n = psi.n, nc = psi.nc, W = psi.wtrust();
    if (a.dir == -1) {
        MatrixSeries<R> out(n, nc, psi.ztrust, W);
        for (int k = 0; k <= psi.ztrust; ++k)
            for (const auto& term : a.terms) {
                int i = k - term.level;
                if (i < 0) continue;
                out.a[k] = out.a[k] + psi.a[i] * detail::const_mat<R>(term.m, nc, W);
            }
        return out;
    }
    // The raising formula is derived in the odd-restricted regime; refuse
    // input that still carries even-level variables.
    for (const auto& pm : psi.a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (const auto& [m, v] : pm.at(i, j).c)
                    for (const auto& [var, e] : m.f)
                        if (var.level % 2 == 0)
                            throw StructuralError(
                                "kp_dPsi: raising flow needs the odd-restricted regime");
    int lmax = a.max_level();
    if (psi.ztrust < lmax)
        throw TrustExceeded("kp_dPsi: z-trust below the top level of r");
    int zt = psi.ztrust - lmax;
    MatrixSeries<R> out(n, nc, zt, W);
    for (const auto& term : a.terms) {
        int l = term.level;
        PolyMat<R> r = detail::const_mat<R>(term.m, nc, W);
        // Negative-order slots of Psi r z^{-l} Psi(-z)^t, indexed by p = -order.
        std::vector<PolyMat<R>> neg(l + 1, PolyMat<R>(n, nc, W));
        for (int p = 1; p <= l; ++p)
            for (int q = 0; q + p <= l; ++q) {
                PolyMat<R> t = psi.a[q] * r * psi.a[l - p - q].transpose();
                if ((l - p - q) % 2 == 0)
                    neg[p] = neg[p] + t;
                else
                    neg[p] = neg[p] - t;
            }
        for (int k = 0; k <= zt; ++k) {
            out.a[k] = out.a[k] + psi.a[l + k] * r;
            for (int p = 1; p <= l; ++p) out.a[k] = out.a[k] - neg[p] * psi.a[p + k];
        }
    }
    return out;
}

// Derivative of the potential at frozen flat coordinates, from the wave
// matrix and its flow:
// dF = 1/2 [Psi_0^t (-dPsi_3 Psi_0^t + dPsi_2 Psi_1^t - dPsi_1 Psi_2^t
//                    + dPsi_0 Psi_3^t) Psi_0].
template <class R>
TruncPoly<R> flat_derivative(const MatrixSeries<R>& psi_full,
                             const MatrixSeries<R>& dpsi_full) {
    MatrixSeries<R> psi = restrict_series_vars(psi_full, VarFilter::LevelOneOnly);
    MatrixSeries<R> dpsi = restrict_series_vars(dpsi_full, VarFilter::LevelOneOnly);
    if (psi.ztrust < 3 || dpsi.ztrust < 3)
        throw TrustExceeded("flat_derivative: needs z-orders through 3");
    int n = psi.n, nc = psi.nc;
    int W = std::min(psi.wtrust(), dpsi.wtrust());
    PolyMat<R> mid(n, nc, W);
    for (int i = 0; i <= 3; ++i) {
        PolyMat<R> t = dpsi.a[3 - i] * psi.a[i].transpose();
        if (i % 2 == 0)
            mid = mid - t;
        else
            mid = mid + t;
    }
    PolyMat<R> out = psi.a[0].transpose() * mid * psi.a[0];
    return out.bracket_sum() * ring_from_rational<R>(Scalar(1, 2));
}

// Exact epsilon-derivative of the wave matrix: recompute Psi(A exp(eps a))
// over the dual numbers and return the epsilon part.
inline MatrixSeries<Scalar> dual_derivative(const LoopGrp<Scalar>& A,
                                            const LoopAlg<Scalar>& a,
                                            const Cutoffs& c) {
    LoopGrp<DualScalar> lifted = lift_group(A);
    lifted.factors.push_back(lift_algebra(a, true));
    MatrixSeries<DualScalar> psi = wave_matrix(lifted, +1, c);
    MatrixSeries<Scalar> out(psi.n, psi.nc, psi.ztrust, psi.wtrust());
    for (int l = 0; l <= psi.ztrust; ++l)
        for (int i = 0; i < psi.n; ++i)
            for (int j = 0; j < psi.n; ++j)
                for (const auto& [m, v] : psi.a[l].at(i, j).c)
                    out.a[l].at(i, j).add_term(m, v.eps_part());
    return out;
}

struct ResidualFlag {
    std::string name;
    bool zero = false;
    std::string first_nonzero;  // empty when zero
};

struct DerivativeReport {
    std::string side;
    TruncPoly<Scalar> dF_x{1, 0};
    TruncPoly<Scalar> dF_t{1, 0};
    MatrixSeries<Scalar> dPsi{1, 1, 0, 0};
    std::vector<ResidualFlag> residuals;

    bool all_zero() const {
        for (const auto& r : residuals)
            if (!r.zero) return false;
        return true;
    }
};

namespace detail {

inline MatrixSeries<Scalar> slice_orders(const MatrixSeries<Scalar>& m, int zt) {
    MatrixSeries<Scalar> out(m.n, m.nc, zt, m.wtrust());
    for (int l = 0; l <= zt; ++l) out.a[l] = m.a[l];
    return out;
}

template <class Probe>
void push_residual(DerivativeReport& rep, const std::string& name, Probe&& probe) {
    ResidualFlag f;
    f.name = name;
    if (auto d = probe()) {
        f.zero = false;
        f.first_nonzero = *d;
    } else {
        f.zero = true;
    }
    rep.residuals.push_back(std::move(f));
}

} // namespace detail

// Runs every derivative route for the pair (A, a) and cross-checks them:
//  1. kp_dPsi against the dual-number oracle (odd-restricted for raising a);
//  2. flat_derivative of the exact flow against lee_dF_psi;
//  3. lee_sF / lee_rF composed with the flat coordinate map against
//     lee_dF_psi.
// The epsilon part of the recomputed potential is deliberately not a
// residual: the flat chart itself moves along the deformation, so the
// coefficientwise derivative of F_t differs from the frozen-frame value by
// chart-motion terms. Throws VerificationFailed on the first nonzero
// residual.
inline DerivativeReport verify_main_theorem(const LoopGrp<Scalar>& A,
                                            const LoopAlg<Scalar>& a,
                                            const Cutoffs& c) {
    require_twisted(a);
    if (!is_twisted_group(A, std::max(c.Z, 2)))
        throw NotTwisted("verify_main_theorem: group element is not twisted");
    int D = c.D > 0 ? c.D : c.Z;

    DerivativeReport rep;
    rep.side = "all";

    MatrixSeries<Scalar> psi = wave_matrix(A, +1, c);
    MatrixSeries<Scalar> dual = dual_derivative(A, a, c);

    // Leg 1: the algebraic flow formula against the epsilon oracle.
    MatrixSeries<Scalar> psiK = psi, dualK = dual;
    if (a.dir == +1) {
        psiK = restrict_series_vars(psi, VarFilter::OddLevelsOnly);
        dualK = restrict_series_vars(dual, VarFilter::OddLevelsOnly);
    }
    MatrixSeries<Scalar> kp = kp_dPsi(a, psiK);
    rep.dPsi = kp;
    MatrixSeries<Scalar> dualS = detail::slice_orders(dualK, kp.ztrust);
    detail::push_residual(rep, "kp_vs_dual",
                          [&] { return detail::series_diff_probe(kp, dualS); });

    // Leg 2: frozen-coordinate derivative from the flow vs the Psi-form flow.
    TruncPoly<Scalar> flat = flat_derivative(psi, dual);
    TruncPoly<Scalar> leepsi = lee_dF_psi(a, psi);
    detail::push_residual(rep, "flat_vs_lee_psi",
                          [&] { return detail::poly_diff_probe(flat, leepsi); });
    rep.dF_x = leepsi;

    // Legs 3 and 4 work in the recentered flat coordinates.
    ThetaData<Scalar> th = theta_series(psi, D);
    int T = c.T > 0 ? c.T : th.trust;
    FrobeniusData<Scalar> f = potential(th, T);
    TruncPoly<Scalar> leetheta =
        a.dir == -1 ? lee_sF(a, f) : lee_rF(a, f);
    rep.dF_t = leetheta;

    std::map<VarIndex, TruncPoly<Scalar>> tmap;
    int n = A.n;
    for (int i = 0; i < n; ++i) {
        TruncPoly<Scalar> rec = th.flat_map[i];
        rec.add_term(Monomial::one(), -f.t0[i]);
        rec.clamp_trust(f.trust);
        tmap.emplace(VarIndex{i + 1, 1}, rec);
    }
    TruncPoly<Scalar> lt = leetheta;
    lt.clamp_trust(f.trust);
    TruncPoly<Scalar> composed = substitute_series(lt, tmap, n, f.trust);
    TruncPoly<Scalar> leepsi_cl = leepsi;
    leepsi_cl.clamp_trust(composed.trust);
    detail::push_residual(rep, "lee_theta_vs_lee_psi", [&] {
        return detail::poly_diff_probe(composed, leepsi_cl);
    });

    for (const auto& r : rep.residuals)
        if (!r.zero)
            throw VerificationFailed("residual " + r.name + " nonzero at " +
                                     r.first_nonzero);
    return rep;
}

} // namespace kpgive

#pragma once

#include <utility>

#include "kpgive/loop.hpp"
#include "kpgive/parallel.hpp"
#include "kpgive/zseries.hpp"

namespace kpgive {

// Truncation parameters shared by the series pipeline.
//   E: doubled Fock energy cutoff        W: time-variable weight trust
//   Z: z-series order trust              T: flat-coordinate trust
//   D: number of theta derivative slots
struct Cutoffs {
    int W = 4;
    int Z = 4;
    int T = 4;
    int D = 4;
    int E = -1;  // negative: use the derived default

    int effective_E() const { return E >= 0 ? E : 2 * (W + Z + 1) + 4; }
};

// Component <0|Q^{-charges} Gamma_+(x) A |0> of the tau vector A|0>.
// Coefficient of a weight-w monomial needs A|0> states of doubled energy
// E_bra + 2w, so the result is trusted to min(W, (E - E_bra)/2).
template <class R>
TruncPoly<R> tau_component(const LoopGrp<R>& A, const std::vector<int>& charge, int E, int W) {
    require_factor_order(A);
    int n = A.n;
    auto [bra, bra_sign] = charged_vacuum(n, charge);
    int ebra = bra.energy2();
    int trust = std::min(W, (E - ebra) / 2);
    if (trust < 0)
        throw InconsistentInput("tau_component: energy cutoff below the charge sector floor");

    FockVec<R> v = FockVec<R>::vacuum_vec(n, E, R::one());
    v = apply_loop_group(A, v);
    std::vector<int> want = charge;
    v = filter_states(v, [&](const FockState& s) {
        return s.charges() == want && s.energy2() >= ebra && s.energy2() <= ebra + 2 * trust;
    });
    FockVec<TruncPoly<R>> w = to_poly_vec(v, n, trust);
    w = gamma_plus_x(w, trust, ebra);
    TruncPoly<R> out = extract_coefficient(w, bra, TruncPoly<R>(n, trust));
    if (bra_sign < 0) out = -out;
    return out;
}

// Wave matrix Psi^{sign}(A, x, z) (sign = +1 or -1): entry (i,k) at z^l is
//   <0| Gamma_+(x) Q_i^{-sign} psi^{sign (k)}_{-l-1/2} A |0> / tau_0.
// All entries share trust weight min(W, (E-1)/2) and z-orders 0..Z.
template <class R>
MatrixSeries<R> wave_matrix(const LoopGrp<R>& A, int sign, const Cutoffs& c) {
    int n = A.n;
    int E = c.effective_E();
    int trust = std::min(c.W, (E - 1) / 2);

    TruncPoly<R> tau0 = tau_component(A, std::vector<int>(n, 0), E, trust);
    // The deformation factor 1 + eps a may shift the constant by a pure
    // eps term; anything else signals an input outside the exact domain.
    if (!coeff_eps_only(tau0.constant_term() - R::one()))
        throw InconsistentInput("wave: tau_0 constant term is not one");
    TruncPoly<R> itau0 = poly_invert(tau0);

    std::vector<FockState> bra(n);
    std::vector<int> bra_sign(n);
    for (int i = 1; i <= n; ++i) {
        std::vector<int> ch(n, 0);
        ch[i - 1] = sign;
        auto [s, sg] = charged_vacuum(n, ch);
        bra[i - 1] = s;
        bra_sign[i - 1] = sg;
    }

    // Each (k, l) slot is independent and writes disjoint entries.
    MatrixSeries<R> psi(n, n, c.Z, trust);
    parallel_for(static_cast<long>(n) * (c.Z + 1), [&](long idx) {
        int k = 1 + static_cast<int>(idx / (c.Z + 1));
        int l = static_cast<int>(idx % (c.Z + 1));
        FockVec<R> u = FockVec<R>::vacuum_vec(n, E, R::one());
        u = apply_psi(sign, k, -2 * l - 1, u);
        u = apply_loop_group(A, u);
        u = filter_states(u, [&](const FockState& s) {
            if (s.energy2() < 1 || s.energy2() > 1 + 2 * trust) return false;
            int nonzero = 0;
            for (int j = 1; j <= n; ++j) {
                int cj = s.charge(j);
                if (cj == 0) continue;
                if (cj != sign) return false;
                ++nonzero;
            }
            return nonzero == 1;
        });
        FockVec<TruncPoly<R>> w = to_poly_vec(u, n, trust);
        w = gamma_plus_x(w, trust, 1);
        for (int i = 1; i <= n; ++i) {
            TruncPoly<R> num =
                extract_coefficient(w, bra[i - 1], TruncPoly<R>(n, trust));
            if (bra_sign[i - 1] < 0) num = -num;
            psi.a[l].at(i - 1, k - 1) = poly_mul(num, itau0);
        }
    });
    return psi;
}

// Laurent-windowed matrix of truncated polynomials, powers zmin..zmax.
template <class R>
struct LaurentMatrix {
    int n = 0;
    int zmin = 0;
    int zmax = -1;
    std::vector<PolyMat<R>> a;

    const PolyMat<R>& at_z(int l) const { return a[l - zmin]; }
    PolyMat<R>& at_z(int l) { return a[l - zmin]; }
};

// Companion matrix Phi^{sign}(A, x, z), with the fermion field applied
// after A, so negative z-powers appear. Exact orders are those whose
// extraction window stays under the energy cutoff: l >= W - floor(E/2).
template <class R>
LaurentMatrix<R> wave_phi(const LoopGrp<R>& A, int sign, const Cutoffs& c) {
    int n = A.n;
    int E = c.effective_E();
    int trust = std::min(c.W, (E - 1) / 2);
    int zmin = trust - E / 2;

    TruncPoly<R> tau0 = tau_component(A, std::vector<int>(n, 0), E, trust);
    // The deformation factor 1 + eps a may shift the constant by a pure
    // eps term; anything else signals an input outside the exact domain.
    if (!coeff_eps_only(tau0.constant_term() - R::one()))
        throw InconsistentInput("wave: tau_0 constant term is not one");
    TruncPoly<R> itau0 = poly_invert(tau0);

    std::vector<FockState> bra(n);
    std::vector<int> bra_sign(n);
    for (int i = 1; i <= n; ++i) {
        std::vector<int> ch(n, 0);
        ch[i - 1] = sign;
        auto [s, sg] = charged_vacuum(n, ch);
        bra[i - 1] = s;
        bra_sign[i - 1] = sg;
    }

    FockVec<R> base = FockVec<R>::vacuum_vec(n, E, R::one());
    base = apply_loop_group(A, base);

    LaurentMatrix<R> phi;
    phi.n = n;
    phi.zmin = zmin;
    phi.zmax = c.Z;
    phi.a.assign(c.Z - zmin + 1, PolyMat<R>(n, n, trust));
    for (int k = 1; k <= n; ++k)
        for (int l = zmin; l <= c.Z; ++l) {
            FockVec<R> u = apply_psi(sign, k, -2 * l - 1, base);
            u = filter_energy(u, 1, 1 + 2 * trust);
            FockVec<TruncPoly<R>> w = to_poly_vec(u, n, trust);
            w = gamma_plus_x(w, trust, 1);
            for (int i = 1; i <= n; ++i) {
                TruncPoly<R> num =
                    extract_coefficient(w, bra[i - 1], TruncPoly<R>(n, trust));
                if (bra_sign[i - 1] < 0) num = -num;
                phi.at_z(l).at(i - 1, k - 1) = poly_mul(num, itau0);
            }
        }
    return phi;
}

// Group element as a Laurent matrix in z via zeta = z^{-1}: a factor
// direction of +1 contributes negative z powers, -1 positive ones.
template <class R>
LaurentMatrix<R> group_z_series(const LoopGrp<R>& g, int nc, int trust, int zwin) {
    LaurentMatrix<R> out;
    out.n = g.n;
    out.zmin = -zwin;
    out.zmax = zwin;
    out.a.assign(2 * zwin + 1, PolyMat<R>(g.n, nc, trust));
    out.at_z(0) = PolyMat<R>::identity(g.n, nc, trust);
    for (const auto& f : g.factors) {
        auto fs = factor_series(f, 2 * zwin);  // coefficients of zeta^{dir k}
        LaurentMatrix<R> next = out;
        for (auto& m : next.a) m = PolyMat<R>(g.n, nc, trust);
        for (int l = -zwin; l <= zwin; ++l) {
            for (int k = 0; k <= 2 * zwin; ++k) {
                int src = l + f.dir * k;  // out slot feeding l via zeta^{dir k} = z^{-dir k}
                if (src < -zwin || src > zwin) continue;
                PolyMat<R> fk = PolyMat<R>::from_scalars(fs[k], nc, trust);
                next.at_z(l) = next.at_z(l) + out.at_z(src) * fk;
            }
        }
        out = std::move(next);
    }
    return out;
}

template <class R>
LaurentMatrix<R> laurent_mul(const LaurentMatrix<R>& x, const LaurentMatrix<R>& y, int zmin,
                             int zmax) {
    if (x.n != y.n) throw StructuralError("laurent_mul: size mismatch");
    LaurentMatrix<R> r;
    r.n = x.n;
    r.zmin = zmin;
    r.zmax = zmax;
    int nc = x.a.at(0).e.at(0).nc;
    int trust = std::min(x.a.at(0).e.at(0).trust, y.a.at(0).e.at(0).trust);
    r.a.assign(zmax - zmin + 1, PolyMat<R>(x.n, nc, trust));
    for (int l = zmin; l <= zmax; ++l)
        for (int p = x.zmin; p <= x.zmax; ++p) {
            int q = l - p;
            if (q < y.zmin || q > y.zmax) continue;
            r.at_z(l) = r.at_z(l) + x.at_z(p) * y.at_z(q);
        }
    return r;
}

// Orthogonality defect Psi(x, z) Psi(x, -z)^t - Id with all even-level
// times set to zero; exactly zero within trust for a twisted group element.
template <class R>
MatrixSeries<R> orthogonality_defect(const LoopGrp<R>& A, const Cutoffs& c) {
    MatrixSeries<R> psi = wave_matrix(A, +1, c);
    MatrixSeries<R> m = restrict_series_vars(psi, VarFilter::OddLevelsOnly);
    MatrixSeries<R> prod = matrix_mul(m, negate_z_transpose(m));
    return prod - MatrixSeries<R>::identity(prod.n, prod.nc, prod.ztrust, prod.wtrust());
}

// Bilinear pairing sum_{color, mode} psi^{+} tau (x) psi^{-} tau over the
// region where the truncated tau vector determines it exactly: pairs of
// output states with added doubled energies <= E - 1. Zero for group orbits.
template <class R>
std::map<std::pair<FockState, FockState>, R> bilinear_defect_vec(const FockVec<R>& tau,
                                                                 int E) {
    std::map<std::pair<FockState, FockState>, R> out;
    auto accumulate = [&](const FockVec<R>& left, const FockVec<R>& right) {
        for (const auto& [s1, c1] : left.t) {
            if (s1.energy2() > E - 1) continue;
            for (const auto& [s2, c2] : right.t) {
                if (s1.energy2() + s2.energy2() > E - 1) continue;
                auto key = std::make_pair(s1, s2);
                auto [it, fresh] = out.emplace(key, c1 * c2);
                if (!fresh) {
                    it->second += c1 * c2;
                    if (it->second.is_zero()) out.erase(it);
                }
            }
        }
    };
    for (int k = 1; k <= tau.n; ++k)
        for (int a2 = -(E + 1) | 1; a2 <= E + 1; a2 += 2) {
            FockVec<R> left = apply_psi(+1, k, a2, tau);
            if (left.is_zero()) continue;
            FockVec<R> right = apply_psi(-1, k, -a2, tau);
            if (right.is_zero()) continue;
            accumulate(left, right);
        }
    return out;
}

template <class R>
std::map<std::pair<FockState, FockState>, R> bilinear_defect(const LoopGrp<R>& A, int E) {
    FockVec<R> tau = FockVec<R>::vacuum_vec(A.n, E, R::one());
    tau = apply_loop_group(A, tau);
    return bilinear_defect_vec(tau, E);
}

} // namespace kpgive

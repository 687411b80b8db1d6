// Theta vectors, flat coordinates, and the WDVV potential extracted from a
// wave matrix in the level-one-variable regime.
#pragma once

#include "kpgive/wave.hpp"

namespace kpgive {

// Theta data in the level-one variables x^{(i)}_1. theta[d][i] is the i-th
// component of the z^d coefficient of (1,...,1) Psi_0^t Psi(z); flat_map is
// theta[1], whose constant-free part serves as the coordinate change to t.
template <class R>
struct ThetaData {
    int n = 0;
    int D = 0;
    int trust = 0;
    std::vector<std::vector<TruncPoly<R>>> theta;
    std::vector<TruncPoly<R>> flat_map;
    std::vector<std::vector<TruncPoly<R>>> jacobian;
};

// Potential data. F_x lives in the x1 alphabet; F_t and theta_t live in the
// recentered flat coordinates (the same level-one variable slots reused for
// t - t(0)); x_of_t inverts the recentered flat map.
template <class R>
struct FrobeniusData {
    int n = 0;
    int D = 0;
    int trust = 0;
    TruncPoly<R> F_x;
    TruncPoly<R> F_t;
    std::vector<std::vector<TruncPoly<R>>> theta_t;
    std::vector<TruncPoly<R>> x_of_t;
    std::vector<R> t0;
};

// theta^{(d)} = (1,...,1) Psi_0^t Psi_d for d = 0..D, restricted to the
// level-one variables. theta^{(0)} must come out as the all-ones vector;
// anything else signals a non-twisted element or a trust violation.
template <class R>
ThetaData<R> theta_series(const MatrixSeries<R>& psi, int D) {
    if (D > psi.ztrust)
        throw TrustExceeded("theta_series: D exceeds the trusted z-order");
    MatrixSeries<R> p = restrict_series_vars(psi, VarFilter::LevelOneOnly);
    int n = p.n, W = p.wtrust();

    ThetaData<R> th;
    th.n = n;
    th.D = D;
    th.trust = W;

    // Row sums of Psi_0 contract the (1,...,1) Psi_0^t prefix.
    std::vector<TruncPoly<R>> u(n, TruncPoly<R>(n, W));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) u[j] += p.a[0].at(j, k);

    th.theta.assign(D + 1, std::vector<TruncPoly<R>>(n, TruncPoly<R>(n, W)));
    for (int d = 0; d <= D; ++d)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                th.theta[d][i] += poly_mul(u[j], p.a[d].at(j, i));

    TruncPoly<R> one = TruncPoly<R>::constant(n, W, R::one());
    for (int i = 0; i < n; ++i)
        if (!(th.theta[0][i] == one))
            throw InconsistentInput(
                "theta_series: theta^{(0)} is not the all-ones vector");

    th.flat_map = th.theta[1];
    th.jacobian.assign(n, std::vector<TruncPoly<R>>(n, TruncPoly<R>(n, W)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            th.jacobian[i][j] = poly_derivative(th.flat_map[i], {j + 1, 1});
    return th;
}

// F = 1/2 sum_i (t^i theta^{(2)}_i - theta^{(3)}_i), then re-expressed in the
// recentered flat coordinates by inverting t - t(0) as a series in x1.
template <class R>
FrobeniusData<R> potential(const ThetaData<R>& th, int T) {
    if (th.D < 3)
        throw StructuralError("potential: needs theta levels through 3");
    int n = th.n;
    int trust_t = std::min(th.trust, T);

    FrobeniusData<R> f;
    f.n = n;
    f.D = th.D;
    f.trust = trust_t;

    f.F_x = TruncPoly<R>(n, th.trust);
    for (int i = 0; i < n; ++i) {
        f.F_x += poly_mul(th.flat_map[i], th.theta[2][i]);
        f.F_x -= th.theta[3][i];
    }
    f.F_x = f.F_x * ring_from_rational<R>(Scalar(1, 2));

    std::vector<TruncPoly<R>> recentered(n);
    f.t0.reserve(n);
    for (int i = 0; i < n; ++i) {
        R c = th.flat_map[i].constant_term();
        f.t0.push_back(c);
        recentered[i] = th.flat_map[i];
        recentered[i].add_term(Monomial::one(), -c);
        recentered[i].clamp_trust(trust_t);
    }
    f.x_of_t = invert_coordinate_map(recentered, trust_t);
    std::map<VarIndex, TruncPoly<R>> images;
    for (int i = 0; i < n; ++i) images.emplace(VarIndex{i + 1, 1}, f.x_of_t[i]);

    TruncPoly<R> fx = f.F_x;
    fx.clamp_trust(trust_t);
    f.F_t = substitute_series(fx, images, n, trust_t);
    f.theta_t.assign(th.D + 1,
                     std::vector<TruncPoly<R>>(n, TruncPoly<R>(n, trust_t)));
    for (int d = 0; d <= th.D; ++d)
        for (int i = 0; i < n; ++i) {
            TruncPoly<R> g = th.theta[d][i];
            g.clamp_trust(trust_t);
            f.theta_t[d][i] = substitute_series(g, images, n, trust_t);
        }
    return f;
}

// Third partials of F_t, indexed [k][l][m] with k <= l <= m not assumed
// (full cube kept for direct indexing).
template <class R>
std::vector<std::vector<std::vector<TruncPoly<R>>>> third_partials(
    const FrobeniusData<R>& f) {
    int n = f.n;
    std::vector<std::vector<std::vector<TruncPoly<R>>>> c(
        n, std::vector<std::vector<TruncPoly<R>>>(
               n, std::vector<TruncPoly<R>>(n, TruncPoly<R>(n, 0))));
    for (int k = 0; k < n; ++k) {
        TruncPoly<R> dk = poly_derivative(f.F_t, {k + 1, 1});
        for (int l = k; l < n; ++l) {
            TruncPoly<R> dkl = poly_derivative(dk, {l + 1, 1});
            for (int m = l; m < n; ++m) {
                TruncPoly<R> dklm = poly_derivative(dkl, {m + 1, 1});
                c[k][l][m] = c[k][m][l] = c[l][k][m] = dklm;
                c[l][m][k] = c[m][k][l] = c[m][l][k] = dklm;
            }
        }
    }
    return c;
}

// WDVV associativity defects with the identity metric:
// sum_m F_klm F_mpq - F_plm F_mkq for every index quadruple.
template <class R>
std::vector<TruncPoly<R>> wdvv_defect(const FrobeniusData<R>& f) {
    int n = f.n;
    auto c = third_partials(f);
    int dtrust = std::max(f.trust - 3, 0);
    std::vector<TruncPoly<R>> out;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    TruncPoly<R> d(n, dtrust);
                    for (int m = 0; m < n; ++m) {
                        d += poly_mul(c[k][l][m], c[m][p][q]);
                        d -= poly_mul(c[p][l][m], c[m][k][q]);
                    }
                    out.push_back(d);
                }
    return out;
}

// Topological recursion defect at level s >= 2:
// d^2 theta^{(s)}_i / dt^k dt^l - sum_m F_klm d theta^{(s-1)}_i / dt^m.
template <class R>
std::vector<TruncPoly<R>> trr_defect(const FrobeniusData<R>& f, int s) {
    if (s < 2) throw StructuralError("trr_defect: level must be at least 2");
    if (s > f.D) throw TrustExceeded("trr_defect: theta depth insufficient");
    int n = f.n;
    auto c = third_partials(f);
    std::vector<TruncPoly<R>> out;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i) {
                TruncPoly<R> lhs = poly_derivative(
                    poly_derivative(f.theta_t[s][i], {k + 1, 1}), {l + 1, 1});
                for (int m = 0; m < n; ++m)
                    lhs -= poly_mul(
                        c[k][l][m],
                        poly_derivative(f.theta_t[s - 1][i], {m + 1, 1}));
                out.push_back(lhs);
            }
    return out;
}

} // namespace kpgive

#pragma once

#include <vector>

#include "kpgive/poly.hpp"

namespace kpgive {

// Square matrix of truncated polynomials sharing one color count and one
// trust weight. Used for single z-order slices and scalar matrices.
template <class R>
struct PolyMat {
    int n = 0;
    std::vector<TruncPoly<R>> e;  // row-major, n*n entries

    PolyMat() = default;
    PolyMat(int size, int n_colors, int trust)
        : n(size), e(static_cast<size_t>(size) * size, TruncPoly<R>(n_colors, trust)) {}

    static PolyMat identity(int size, int n_colors, int trust) {
        PolyMat m(size, n_colors, trust);
        for (int i = 0; i < size; ++i)
            m.at(i, i) = TruncPoly<R>::constant(n_colors, trust, R::one());
        return m;
    }

    static PolyMat from_scalars(const std::vector<std::vector<R>>& a, int n_colors, int trust) {
        int size = static_cast<int>(a.size());
        PolyMat m(size, n_colors, trust);
        for (int i = 0; i < size; ++i) {
            if (static_cast<int>(a[i].size()) != size)
                throw StructuralError("PolyMat: ragged scalar matrix");
            for (int j = 0; j < size; ++j)
                m.at(i, j) = TruncPoly<R>::constant(n_colors, trust, a[i][j]);
        }
        return m;
    }

    TruncPoly<R>& at(int i, int j) { return e[static_cast<size_t>(i) * n + j]; }
    const TruncPoly<R>& at(int i, int j) const { return e[static_cast<size_t>(i) * n + j]; }

    bool is_zero() const {
        for (const auto& p : e)
            if (!p.is_zero()) return false;
        return true;
    }

    PolyMat transpose() const {
        PolyMat r = *this;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r.at(i, j) = at(j, i);
        return r;
    }

    friend PolyMat operator+(PolyMat a, const PolyMat& b) {
        if (a.n != b.n) throw StructuralError("PolyMat: size mismatch");
        for (size_t k = 0; k < a.e.size(); ++k) a.e[k] += b.e[k];
        return a;
    }
    friend PolyMat operator-(PolyMat a, const PolyMat& b) {
        if (a.n != b.n) throw StructuralError("PolyMat: size mismatch");
        for (size_t k = 0; k < a.e.size(); ++k) a.e[k] -= b.e[k];
        return a;
    }
    PolyMat operator-() const {
        PolyMat r = *this;
        for (auto& p : r.e) p = -p;
        return r;
    }
    friend PolyMat operator*(const PolyMat& a, const PolyMat& b) {
        if (a.n != b.n) throw StructuralError("PolyMat: size mismatch");
        int nc = a.e.empty() ? 1 : a.e[0].nc;
        int tr = a.e.empty() ? 0 : std::min(a.e[0].trust, b.e[0].trust);
        PolyMat r(a.n, nc, tr);
        for (int i = 0; i < a.n; ++i)
            for (int k = 0; k < a.n; ++k) {
                if (a.at(i, k).is_zero()) continue;
                for (int j = 0; j < a.n; ++j) {
                    if (b.at(k, j).is_zero()) continue;
                    r.at(i, j) += poly_mul(a.at(i, k), b.at(k, j));
                }
            }
        return r;
    }
    friend PolyMat operator*(PolyMat a, const TruncPoly<R>& s) {
        for (auto& p : a.e) p = poly_mul(p, s);
        return a;
    }
    friend bool operator==(const PolyMat& a, const PolyMat& b) {
        return a.n == b.n && a.e == b.e;
    }

    PolyMat map_entries(TruncPoly<R> (*fn)(const TruncPoly<R>&, VarFilter), VarFilter f) const {
        PolyMat r = *this;
        for (auto& p : r.e) p = fn(p, f);
        return r;
    }

    // Bracket used by closed-form flat-coordinate pairings:
    // [M] = (1..1) M (1..1)^t, the sum of all entries.
    TruncPoly<R> bracket_sum() const {
        if (e.empty()) throw StructuralError("PolyMat: bracket of empty matrix");
        TruncPoly<R> s(e[0].nc, e[0].trust);
        for (const auto& p : e) s += p;
        return s;
    }
};

// Formal power series in z with PolyMat coefficients, orders 0..trust_z
// all present and carrying one shared polynomial trust.
template <class R>
struct MatrixSeries {
    int n = 0;
    int nc = 1;
    int ztrust = -1;
    std::vector<PolyMat<R>> a;  // a[l] is the z^l coefficient, l = 0..ztrust

    MatrixSeries() = default;
    MatrixSeries(int size, int n_colors, int trust_z, int trust_w)
        : n(size), nc(n_colors), ztrust(trust_z),
          a(static_cast<size_t>(trust_z) + 1, PolyMat<R>(size, n_colors, trust_w)) {}

    static MatrixSeries identity(int size, int n_colors, int trust_z, int trust_w) {
        MatrixSeries s(size, n_colors, trust_z, trust_w);
        s.a[0] = PolyMat<R>::identity(size, n_colors, trust_w);
        return s;
    }

    int wtrust() const { return a.empty() ? 0 : a[0].e[0].trust; }

    bool is_zero() const {
        for (const auto& m : a)
            if (!m.is_zero()) return false;
        return true;
    }

    friend MatrixSeries operator+(MatrixSeries x, const MatrixSeries& y) {
        if (x.n != y.n) throw StructuralError("MatrixSeries: size mismatch");
        int zt = std::min(x.ztrust, y.ztrust);
        x.a.resize(zt + 1);
        x.ztrust = zt;
        for (int l = 0; l <= zt; ++l) x.a[l] = x.a[l] + y.a[l];
        return x;
    }
    friend MatrixSeries operator-(MatrixSeries x, const MatrixSeries& y) {
        if (x.n != y.n) throw StructuralError("MatrixSeries: size mismatch");
        int zt = std::min(x.ztrust, y.ztrust);
        x.a.resize(zt + 1);
        x.ztrust = zt;
        for (int l = 0; l <= zt; ++l) x.a[l] = x.a[l] - y.a[l];
        return x;
    }
    friend bool operator==(const MatrixSeries& x, const MatrixSeries& y) {
        return x.n == y.n && x.ztrust == y.ztrust && x.a == y.a;
    }
};

// Cauchy product; z-trust is the min of the factors' z-trusts.
template <class R>
MatrixSeries<R> matrix_mul(const MatrixSeries<R>& x, const MatrixSeries<R>& y) {
    if (x.n != y.n) throw StructuralError("matrix_mul: size mismatch");
    int zt = std::min(x.ztrust, y.ztrust);
    MatrixSeries<R> r(x.n, x.nc, zt, std::min(x.wtrust(), y.wtrust()));
    for (int l = 0; l <= zt; ++l) {
        PolyMat<R> s(x.n, r.nc, r.wtrust());
        for (int p = 0; p <= l; ++p) s = s + x.a[p] * y.a[l - p];
        r.a[l] = s;
    }
    return r;
}

// M(z) -> M(-z)^t, the series-level adjoint: the z^l coefficient maps to
// (-1)^l times its transpose.
template <class R>
MatrixSeries<R> negate_z_transpose(const MatrixSeries<R>& x) {
    MatrixSeries<R> r = x;
    for (int l = 0; l <= x.ztrust; ++l) {
        r.a[l] = x.a[l].transpose();
        if (l % 2 == 1) r.a[l] = -r.a[l];
    }
    return r;
}

template <class R>
MatrixSeries<R> restrict_series_vars(const MatrixSeries<R>& x, VarFilter f) {
    MatrixSeries<R> r = x;
    for (auto& m : r.a)
        for (auto& p : m.e) p = restrict_vars(p, f);
    return r;
}

} // namespace kpgive

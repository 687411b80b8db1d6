#include "kpgive/json_io.hpp"

#include <cstdio>

#include "kpgive/errors.hpp"

namespace kpgive {

namespace {

int get_int(const Json& j, const char* field, int lo) {
    if (!j.contains(field) || !j[field].is_number_integer())
        throw InconsistentInput(std::string("payload: missing integer field '") + field + "'");
    int v = j[field].get<int>();
    if (v < lo)
        throw InconsistentInput(std::string("payload: field '") + field + "' below " +
                                std::to_string(lo));
    return v;
}

Scalar get_rat(const Json& j) {
    if (!j.is_string())
        throw InconsistentInput("payload: rationals must be strings");
    return Scalar::parse(j.get<std::string>());
}

} // namespace

Json poly_coeffs_json(const TruncPoly<Scalar>& p) {
    Json j = Json::object();
    for (const auto& [m, v] : p.c) j[monomial_key(m)] = v.str();
    return j;
}

TruncPoly<Scalar> poly_from_coeffs(const Json& j, int n_colors, int trust) {
    if (!j.is_object())
        throw InconsistentInput("payload: polynomial coefficients must be an object");
    TruncPoly<Scalar> p(n_colors, trust);
    for (const auto& [key, val] : j.items()) {
        Monomial m = parse_monomial_key(key, n_colors);
        if (m.weight() > trust)
            throw InconsistentInput("monomial '" + key + "' exceeds the trusted weight");
        p.add_term(m, get_rat(val));
    }
    return p;
}

Json poly_to_json(const TruncPoly<Scalar>& p) {
    Json j = Json::object();
    j["colors"] = p.nc;
    j["trust"] = p.trust;
    j["coeffs"] = poly_coeffs_json(p);
    return j;
}

TruncPoly<Scalar> poly_from_json(const Json& j) {
    int nc = get_int(j, "colors", 1);
    int trust = get_int(j, "trust", 0);
    if (!j.contains("coeffs"))
        throw InconsistentInput("payload: missing 'coeffs'");
    return poly_from_coeffs(j["coeffs"], nc, trust);
}

Json series_to_json(const MatrixSeries<Scalar>& m) {
    Json j = Json::object();
    j["size"] = m.n;
    j["colors"] = m.nc;
    j["zorder"] = m.ztrust;
    j["xweight"] = m.wtrust();
    Json entries = Json::object();
    for (int l = 0; l <= m.ztrust; ++l)
        for (int i = 1; i <= m.n; ++i)
            for (int k = 1; k <= m.n; ++k) {
                const TruncPoly<Scalar>& p = m.a[l].at(i - 1, k - 1);
                if (p.is_zero()) continue;
                std::string key = "psi[" + std::to_string(i) + "][" + std::to_string(k) +
                                  "].z^" + std::to_string(l);
                entries[key] = poly_coeffs_json(p);
            }
    j["entries"] = std::move(entries);
    return j;
}

MatrixSeries<Scalar> series_from_json(const Json& j) {
    int n = get_int(j, "size", 1);
    int nc = get_int(j, "colors", 1);
    int zt = get_int(j, "zorder", 0);
    int wt = get_int(j, "xweight", 0);
    MatrixSeries<Scalar> m(n, nc, zt, wt);
    if (!j.contains("entries") || !j["entries"].is_object())
        throw InconsistentInput("payload: missing 'entries' object");
    for (const auto& [key, val] : j["entries"].items()) {
        int i = 0, k = 0, l = 0;
        char tail = 0;
        if (std::sscanf(key.c_str(), "psi[%d][%d].z^%d%c", &i, &k, &l, &tail) != 3 ||
            i < 1 || i > n || k < 1 || k > n || l < 0 || l > zt)
            throw InconsistentInput("payload: bad series key '" + key + "'");
        m.a[l].at(i - 1, k - 1) = poly_from_coeffs(val, nc, wt);
    }
    return m;
}

Json algebra_to_json(const LoopAlg<Scalar>& a) {
    Json j = Json::object();
    j["sign"] = a.dir > 0 ? "+" : "-";
    Json terms = Json::array();
    for (const auto& t : a.terms) {
        Json mat = Json::array();
        for (const auto& row : t.m) {
            Json r = Json::array();
            for (const auto& v : row) r.push_back(v.str());
            mat.push_back(std::move(r));
        }
        terms.push_back(Json{{"level", t.level}, {"matrix", std::move(mat)}});
    }
    j["terms"] = std::move(terms);
    return j;
}

LoopAlg<Scalar> algebra_from_json(const Json& j) {
    LoopAlg<Scalar> a;
    if (!j.contains("sign") || !j["sign"].is_string())
        throw InconsistentInput("algebra: missing 'sign'");
    std::string sign = j["sign"].get<std::string>();
    if (sign == "+") a.dir = +1;
    else if (sign == "-") a.dir = -1;
    else throw InconsistentInput("algebra: sign must be '+' or '-'");
    if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
        throw InconsistentInput("algebra: missing 'terms' array");
    a.n = 0;
    for (const auto& tj : j["terms"]) {
        LoopTerm<Scalar> t;
        t.level = get_int(tj, "level", 1);
        if (!tj.contains("matrix") || !tj["matrix"].is_array() || tj["matrix"].empty())
            throw InconsistentInput("algebra: missing 'matrix'");
        int n = static_cast<int>(tj["matrix"].size());
        if (a.n == 0) a.n = n;
        if (n != a.n)
            throw InconsistentInput("algebra: term sizes disagree");
        t.m = mat_zero<Scalar>(n);
        for (int i = 0; i < n; ++i) {
            const Json& row = tj["matrix"][i];
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                throw InconsistentInput("algebra: matrix is not square");
            for (int k = 0; k < n; ++k) t.m[i][k] = get_rat(row[k]);
        }
        // Twist law per level: r_l^t = (-1)^{l+1} r_l.
        Scalar sg = t.level % 2 == 1 ? Scalar(1) : Scalar(-1);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                if (!(t.m[k][i] - sg * t.m[i][k]).is_zero())
                    throw NotTwisted("twist violation at level " + std::to_string(t.level));
        a.terms.push_back(std::move(t));
    }
    return a;
}

Json group_to_json(const LoopGrp<Scalar>& g) {
    Json j = Json::object();
    j["n"] = g.n;
    Json factors = Json::array();
    for (const auto& f : g.factors) factors.push_back(algebra_to_json(f));
    j["factors"] = std::move(factors);
    return j;
}

LoopGrp<Scalar> group_from_json(const Json& j) {
    LoopGrp<Scalar> g;
    if (!j.contains("factors") || !j["factors"].is_array())
        throw InconsistentInput("group: missing 'factors' array");
    for (const auto& fj : j["factors"]) {
        LoopAlg<Scalar> f = algebra_from_json(fj);
        if (g.factors.empty()) g.n = f.n;
        else if (f.n != g.n) throw InconsistentInput("group: factor sizes disagree");
        g.factors.push_back(std::move(f));
    }
    if (g.factors.empty()) g.n = get_int(j, "n", 1);
    else if (j.contains("n") && get_int(j, "n", 1) != g.n)
        throw InconsistentInput("group: 'n' disagrees with the factor size");
    return g;
}

Json theta_to_json(const ThetaData<Scalar>& th) {
    Json j = Json::object();
    j["colors"] = th.n;
    j["depth"] = th.D;
    j["trust"] = th.trust;
    for (int d = 0; d <= th.D; ++d)
        for (int i = 1; i <= th.n; ++i)
            j["theta[" + std::to_string(d) + "][" + std::to_string(i) + "]"] =
                poly_coeffs_json(th.theta[d][i - 1]);
    for (int i = 1; i <= th.n; ++i)
        j["flat_map[" + std::to_string(i) + "]"] = poly_coeffs_json(th.flat_map[i - 1]);
    return j;
}

ThetaData<Scalar> theta_from_json(const Json& j) {
    ThetaData<Scalar> th;
    th.n = get_int(j, "colors", 1);
    th.D = get_int(j, "depth", 0);
    th.trust = get_int(j, "trust", 0);
    th.theta.assign(th.D + 1,
                    std::vector<TruncPoly<Scalar>>(th.n, TruncPoly<Scalar>(th.n, th.trust)));
    for (int d = 0; d <= th.D; ++d)
        for (int i = 1; i <= th.n; ++i) {
            std::string key = "theta[" + std::to_string(d) + "][" + std::to_string(i) + "]";
            if (!j.contains(key))
                throw InconsistentInput("theta payload: missing '" + key + "'");
            th.theta[d][i - 1] = poly_from_coeffs(j[key], th.n, th.trust);
        }
    th.flat_map.assign(th.n, TruncPoly<Scalar>(th.n, th.trust));
    for (int i = 1; i <= th.n; ++i) {
        std::string key = "flat_map[" + std::to_string(i) + "]";
        if (!j.contains(key))
            throw InconsistentInput("theta payload: missing '" + key + "'");
        th.flat_map[i - 1] = poly_from_coeffs(j[key], th.n, th.trust);
    }
    th.jacobian.assign(th.n,
                       std::vector<TruncPoly<Scalar>>(th.n, TruncPoly<Scalar>(th.n, th.trust)));
    for (int i = 0; i < th.n; ++i)
        for (int k = 0; k < th.n; ++k)
            th.jacobian[i][k] = poly_derivative(th.flat_map[i], {k + 1, 1});
    return th;
}

Json frobenius_to_json(const FrobeniusData<Scalar>& f) {
    Json j = Json::object();
    j["colors"] = f.n;
    j["depth"] = f.D;
    j["trust"] = f.trust;
    Json t0 = Json::array();
    for (const auto& v : f.t0) t0.push_back(v.str());
    j["t0"] = std::move(t0);
    // F_x keeps the pre-recentering trust, which can exceed the flat trust.
    j["F_x_trust"] = f.F_x.trust;
    j["F_x"] = poly_coeffs_json(f.F_x);
    j["F_t"] = poly_coeffs_json(f.F_t);
    for (int i = 1; i <= f.n; ++i)
        j["x_of_t[" + std::to_string(i) + "]"] = poly_coeffs_json(f.x_of_t[i - 1]);
    for (int d = 0; d < static_cast<int>(f.theta_t.size()); ++d)
        for (int i = 1; i <= f.n; ++i)
            j["theta_t[" + std::to_string(d) + "][" + std::to_string(i) + "]"] =
                poly_coeffs_json(f.theta_t[d][i - 1]);
    return j;
}

FrobeniusData<Scalar> frobenius_from_json(const Json& j) {
    FrobeniusData<Scalar> f;
    f.n = get_int(j, "colors", 1);
    f.D = get_int(j, "depth", 0);
    f.trust = get_int(j, "trust", 0);
    if (!j.contains("t0") || !j["t0"].is_array() ||
        static_cast<int>(j["t0"].size()) != f.n)
        throw InconsistentInput("potential payload: missing 't0'");
    for (const auto& v : j["t0"]) f.t0.push_back(get_rat(v));
    if (!j.contains("F_x") || !j.contains("F_t"))
        throw InconsistentInput("potential payload: missing 'F_x' or 'F_t'");
    f.F_x = poly_from_coeffs(j["F_x"], f.n, get_int(j, "F_x_trust", 0));
    f.F_t = poly_from_coeffs(j["F_t"], f.n, f.trust);
    f.x_of_t.assign(f.n, TruncPoly<Scalar>(f.n, f.trust));
    for (int i = 1; i <= f.n; ++i) {
        std::string key = "x_of_t[" + std::to_string(i) + "]";
        if (!j.contains(key))
            throw InconsistentInput("potential payload: missing '" + key + "'");
        f.x_of_t[i - 1] = poly_from_coeffs(j[key], f.n, f.trust);
    }
    f.theta_t.assign(f.D + 1,
                     std::vector<TruncPoly<Scalar>>(f.n, TruncPoly<Scalar>(f.n, f.trust)));
    for (int d = 0; d <= f.D; ++d)
        for (int i = 1; i <= f.n; ++i) {
            std::string key = "theta_t[" + std::to_string(d) + "][" + std::to_string(i) + "]";
            if (!j.contains(key))
                throw InconsistentInput("potential payload: missing '" + key + "'");
            f.theta_t[d][i - 1] = poly_from_coeffs(j[key], f.n, f.trust);
        }
    return f;
}

long monomial_count(int n_colors, int trust) {
    // Partitions of each weight <= trust into parts 1..trust, each part
    // carrying one of n_colors colors: one knapsack pass per colored part.
    std::vector<long> ways(trust + 1, 0);
    ways[0] = 1;
    for (int level = 1; level <= trust; ++level)
        for (int color = 0; color < n_colors; ++color)
            for (int w = level; w <= trust; ++w) ways[w] += ways[w - level];
    long total = 0;
    for (long w : ways) total += w;
    return total;
}

DefectSummary summarize_defect(const std::vector<TruncPoly<Scalar>>& defects) {
    DefectSummary d;
    for (std::size_t i = 0; i < defects.size(); ++i) {
        const TruncPoly<Scalar>& p = defects[i];
        d.max_monomials_checked += monomial_count(p.nc, p.trust);
        if (d.all_zero && !p.is_zero()) {
            d.all_zero = false;
            d.first_nonzero =
                "defect[" + std::to_string(i) + "]:" + monomial_key(p.c.begin()->first);
        }
    }
    return d;
}

DefectSummary summarize_defect(const MatrixSeries<Scalar>& defect) {
    DefectSummary d;
    for (int l = 0; l <= defect.ztrust; ++l)
        for (int i = 0; i < defect.n; ++i)
            for (int k = 0; k < defect.n; ++k) {
                const TruncPoly<Scalar>& p = defect.a[l].at(i, k);
                d.max_monomials_checked += monomial_count(p.nc, p.trust);
                if (d.all_zero && !p.is_zero()) {
                    d.all_zero = false;
                    d.first_nonzero = "psi[" + std::to_string(i + 1) + "][" +
                                      std::to_string(k + 1) + "].z^" + std::to_string(l) +
                                      ":" + monomial_key(p.c.begin()->first);
                }
            }
    return d;
}

Json defect_to_json(const DefectSummary& d) {
    Json j = Json::object();
    j["max_monomials_checked"] = d.max_monomials_checked;
    j["all_zero"] = d.all_zero;
    j["first_nonzero"] = d.first_nonzero ? Json(*d.first_nonzero) : Json(nullptr);
    return j;
}

} // namespace kpgive

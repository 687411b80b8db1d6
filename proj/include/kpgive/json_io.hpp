#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kpgive/frobenius.hpp"
#include "kpgive/loop.hpp"
#include "kpgive/poly.hpp"
#include "kpgive/zseries.hpp"

namespace kpgive {

// All wire payloads are JSON with exact-rational values serialized as
// strings ("p/q", plain "p" for integers) and polynomials as objects
// mapping canonical monomial keys to such strings. Object keys sort
// lexicographically on output, so equal values serialize byte-identically.
using Json = nlohmann::json;

// Bare coefficient object {"x[i,k]^e*...": "p/q", ...}; the constant term
// travels under the key "1".
Json poly_coeffs_json(const TruncPoly<Scalar>& p);
TruncPoly<Scalar> poly_from_coeffs(const Json& j, int n_colors, int trust);

// Self-contained polynomial: {"colors", "trust", "coeffs"}.
Json poly_to_json(const TruncPoly<Scalar>& p);
TruncPoly<Scalar> poly_from_json(const Json& j);

// Wave matrix: {"size", "colors", "zorder", "xweight",
//               "entries": {"psi[i][k].z^l": coeffs}} with 1-based i, k.
// Zero entries are omitted; absent keys parse back as zero polynomials.
Json series_to_json(const MatrixSeries<Scalar>& m);
MatrixSeries<Scalar> series_from_json(const Json& j);

// Loop algebra element: {"sign": "+"|"-",
//                        "terms": [{"level": l, "matrix": [["p/q", ...]]}]}.
// Parsing validates squareness and the twist law per level; a violation
// throws NotTwisted("twist violation at level l").
Json algebra_to_json(const LoopAlg<Scalar>& a);
LoopAlg<Scalar> algebra_from_json(const Json& j);

// Group element: {"factors": [algebra, ...]}, leftmost factor first.
Json group_to_json(const LoopGrp<Scalar>& g);
LoopGrp<Scalar> group_from_json(const Json& j);

// Deformed flat coordinates: {"colors", "depth", "trust",
//   "theta[d][i]": coeffs, "flat_map[i]": coeffs}. The Jacobian is derived
// data and is recomputed on parse.
Json theta_to_json(const ThetaData<Scalar>& th);
ThetaData<Scalar> theta_from_json(const Json& j);

// Potential data: {"colors", "depth", "trust", "t0": ["p/q", ...],
//   "F_x": coeffs, "F_t": coeffs, "x_of_t[i]": coeffs,
//   "theta_t[d][i]": coeffs}.
Json frobenius_to_json(const FrobeniusData<Scalar>& f);
FrobeniusData<Scalar> frobenius_from_json(const Json& j);

// Exact-zero claim over a trusted coefficient region.
struct DefectSummary {
    long max_monomials_checked = 0;
    bool all_zero = true;
    std::optional<std::string> first_nonzero;
};

// Number of monomials of weight <= trust over n_colors colors with levels
// 1..trust: the size of one entry's trusted coefficient region.
long monomial_count(int n_colors, int trust);

DefectSummary summarize_defect(const std::vector<TruncPoly<Scalar>>& defects);
DefectSummary summarize_defect(const MatrixSeries<Scalar>& defect);

// {"max_monomials_checked", "all_zero", "first_nonzero": key|null}.
Json defect_to_json(const DefectSummary& d);

} // namespace kpgive

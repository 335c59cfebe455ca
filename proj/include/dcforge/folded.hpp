#pragma once

#include "dcforge/dc_function.hpp"
#include "dcforge/verification.hpp"

#include <functional>
#include <optional>
#include <string>

namespace dcforge {

/// theta(t) = f(|t|) with f concave and continuous on [0, inf), studied on [-T, T].
struct FoldedSpec {
    std::string name;
    std::function<double(double)> f;
    std::optional<double> derivative; // analytic f'(0;+) when known (may be +inf)
    double T = 10.0;
};

/// Catalog ids: "scad:a=3.7,lambda=1", "mcp:a=2,lambda=1", "capped_l1:a=1,lambda=1",
/// "log:gamma=1,lambda=1", "sqrt1p", "sqrtabs", "fig1a", "fig1b1", "fig1b2".
/// Anything else is parsed as an expression in `u` (optionally prefixed by "expr:").
FoldedSpec make_folded(const std::string& id, double T = 10.0);

/// Throws CertificationError when f fails the sampled concavity test on [0, T] or
/// is discontinuous at 0.
void validate_folded(const FoldedSpec& spec);

/// Analytic value when cataloged; otherwise divided differences at 2^-k, k = 1..40,
/// declared +inf once a quotient exceeds 1e6 while still increasing.
double right_derivative_at_zero(const FoldedSpec& spec);

struct FoldedDecomposition {
    char kase = 'a'; // 'a': f'(0;+) <= 0, 'b': f'(0;+) > 0
    double derivative = 0.0;
    double t_minus = 0.0; // -inf when the half-line never meets the curve in [-T, 0)
    double t_plus = 0.0;  // +inf likewise
    std::function<double(double)> f1, f2;
    DcFunction dc;
};

/// Case (a): theta is concave and returned as 0 - (-theta). Case (b): theta = max(f1, f2)
/// written as [-min(f1, f2)] - [-(f1 + f2)]. Throws NotDcError for an infinite derivative.
FoldedDecomposition decompose(const FoldedSpec& spec);

/// Reconstruction against f(|t|), component convexity, even symmetry and, in case (b),
/// f1 <= f(-.) on (t_minus, 0] and f2 <= f on [0, t_plus).
std::vector<CheckReport> folded_checks(const FoldedSpec& spec, const FoldedDecomposition& d, std::uint64_t seed = 42,
                                       int samples = 1000, double tol = 1e-8);

/// Univariate expression in `u`: numbers, + - * / ^, parentheses, sqrt, log, exp, abs,
/// min(a,b), max(a,b). Throws ParseError.
std::function<double(double)> parse_univariate(const std::string& text);

} // namespace dcforge

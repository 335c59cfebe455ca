#pragma once

#include "dcforge/dc_function.hpp"
#include "dcforge/domain.hpp"
#include "dcforge/quadratic.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dcforge {

/// Outcome of one sampled check. `pass` is exactly `max_violation <= tol`.
struct CheckReport {
    std::string check;
    int trials = 0;
    double max_violation = 0.0;
    double tol = 0.0;
    bool pass = true;
    std::vector<double> witness;
    std::uint64_t seed = 42;

    bool operator==(const CheckReport&) const = default;
};

using ScalarFn = std::function<double(const Vector&)>;

/// Midpoint test f((x+y)/2) <= (f(x)+f(y))/2 + tol (1 + max|f|) on random pairs.
/// Violations are reported relative to (1 + max|f|); the witness is (x, y).
CheckReport check_convexity(const std::string& name, const ScalarFn& fn, const Domain& domain,
                            std::uint64_t seed = 42, int trials = 1000, double tol = 1e-8);

/// |(g - h)(x) - ref(x)| <= tol (1 + |ref(x)|) at random domain samples.
CheckReport check_dc_identity(const std::string& name, const DcFunction& dc, const ScalarFn& reference,
                              std::uint64_t seed = 42, int samples = 1000, double tol = 1e-7);

/// For every ordered pair (i, j), theta_ji = theta_j - theta_i satisfies
/// theta_ji(x) - theta_ji(y) <= grad theta_ji(y)'(x - y) + L_ji/2 |x - y|^2.
/// `moduli(j, i)` holds L_ji.
CheckReport check_lc1_bound(const std::string& name, const std::vector<QuadraticPiece>& pieces,
                            const Matrix& moduli, const Domain& domain, std::uint64_t seed = 42,
                            int samples = 500, double tol = 1e-9);

/// Both components of a dc function pass the midpoint test.
std::vector<CheckReport> check_components(const std::string& name, const DcFunction& dc, std::uint64_t seed = 42,
                                          int trials = 1000, double tol = 1e-8);

/// violation(draw(rng)) <= tol at every trial; the worst sample is the witness.
CheckReport check_sampled(const std::string& name, int trials, double tol, std::uint64_t seed,
                          const std::function<Vector(Rng&)>& draw, const ScalarFn& violation);

/// Reports sorted by name, stable for equal names.
std::vector<CheckReport> merge_reports(std::vector<CheckReport> reports);

bool all_pass(const std::vector<CheckReport>& reports);

} // namespace dcforge

#pragma once

// Random desk-scale instances shared by the property tests and the acceptance run.

#include "dcforge/risk.hpp"

#include <vector>

namespace inst {

inline std::vector<double> random_probs(dcforge::Rng& rng, int S) {
    std::vector<double> p(S);
    double tot = 0.0;
    for (auto& v : p) tot += (v = rng.uniform(0.2, 1.0));
    double acc = 0.0;
    for (int s = 0; s + 1 < S; ++s) acc += (p[s] /= tot);
    p[S - 1] = 1.0 - acc;
    return p;
}

/// Convex quadratic (PSD, rank <= n) or affine piece on R^n.
inline dcforge::ConvexExpr random_piece(dcforge::Rng& rng, int n) {
    using namespace dcforge;
    Vector a(n);
    for (int i = 0; i < n; ++i) a[i] = rng.normal();
    if (rng.uniform() < 0.5) return ConvexExpr::affine(a, rng.normal());
    Matrix B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = rng.normal() * 0.7;
    return ConvexExpr::quad(B * B.transpose(), a, rng.normal());
}

/// S <= 5 scenarios, dimension <= 3, quadratic/affine p_s and q_s on [-1, 1]^n.
inline dcforge::RandomDcFunctional random_rf(dcforge::Rng& rng, int max_s = 5, int max_n = 3) {
    using namespace dcforge;
    const int S = rng.uniform_int(1, max_s), n = rng.uniform_int(1, max_n);
    std::vector<ConvexExpr> p, q;
    for (int s = 0; s < S; ++s) {
        p.push_back(random_piece(rng, n));
        q.push_back(random_piece(rng, n));
    }
    return RandomDcFunctional(ScenarioSet(random_probs(rng, S)), p, q, Domain::box(n, -1.0, 1.0));
}

/// Concave piecewise-linear utility with u(0) = 0 and 1 in the superdifferential at 0.
inline dcforge::PwlUtility random_utility(dcforge::Rng& rng) {
    std::vector<double> a = {rng.uniform(1.2, 3.0), rng.uniform(0.0, 0.8)};
    std::vector<double> al = {0.0, 0.0};
    if (rng.uniform() < 0.5) {
        a.push_back(rng.uniform(0.0, 0.3));
        al.push_back(rng.uniform(0.2, 1.0));
    }
    return dcforge::PwlUtility(a, al);
}

} // namespace inst

#pragma once

// Brute-force reference computations used by the tests. None of them calls the
// library's own oracles or scans.

#include "dcforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace ref {

/// Minimum of a unimodal (convex) function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return std::min({fc, fd, f(lo), f(hi)});
}

/// Tail average: mean of the worst (1 - alpha) probability mass.
inline double cvar(const std::vector<double>& p, const std::vector<double>& z, double alpha) {
    std::vector<int> idx(z.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return z[a] > z[b]; });
    double mass = 1.0 - alpha, acc = 0.0;
    for (int i : idx) {
        const double take = std::min(mass, p[i]);
        acc += take * z[i];
        mass -= take;
        if (mass <= 0.0) break;
    }
    return acc / (1.0 - alpha);
}

/// Lower alpha-quantile inf{t : P(Z <= t) >= alpha}.
inline double var(const std::vector<double>& p, const std::vector<double>& z, double alpha) {
    std::vector<int> idx(z.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return z[a] < z[b]; });
    double cum = 0.0;
    for (int i : idx) {
        cum += p[i];
        if (cum >= alpha - 1e-12) return z[i];
    }
    return z[idx.back()];
}

inline double mean(const std::vector<double>& p, const std::vector<double>& z) {
    double m = 0.0;
    for (std::size_t s = 0; s < z.size(); ++s) m += p[s] * z[s];
    return m;
}

inline double variance(const std::vector<double>& p, const std::vector<double>& z) {
    const double m = mean(p, z);
    double v = 0.0;
    for (std::size_t s = 0; s < z.size(); ++s) v += p[s] * (z[s] - m) * (z[s] - m);
    return v;
}

/// u(t) = min_i (a_i t + alpha_i)
inline double utility(const std::vector<double>& a, const std::vector<double>& al, double t) {
    double u = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) u = std::min(u, a[i] * t + al[i]);
    return u;
}

inline double oce_objective(const std::vector<double>& p, const std::vector<double>& z, const std::vector<double>& a,
                            const std::vector<double>& al, double eta) {
    double v = eta;
    for (std::size_t s = 0; s < z.size(); ++s) v += p[s] * utility(a, al, z[s] - eta);
    return v;
}

/// sup over eta by golden section on a bracket wide enough for bounded instances.
inline double oce(const std::vector<double>& p, const std::vector<double>& z, const std::vector<double>& a,
                  const std::vector<double>& al) {
    const auto [mn, mx] = std::minmax_element(z.begin(), z.end());
    double shift = 0.0;
    for (double v : al) shift = std::max(shift, std::abs(v));
    const double lo = *mn - 10.0 - 10.0 * shift, hi = *mx + 10.0 + 10.0 * shift;
    return -golden_min([&](double e) { return -oce_objective(p, z, a, al, e); }, lo, hi);
}

/// Largest maximizer of the OCE objective: golden section locates a maximizer,
/// bisection then finds the right end of the (interval) optimal level set.
inline double mu(const std::vector<double>& p, const std::vector<double>& z, const std::vector<double>& a,
                 const std::vector<double>& al) {
    const auto [mn, mx] = std::minmax_element(z.begin(), z.end());
    double shift = 0.0;
    for (double v : al) shift = std::max(shift, std::abs(v));
    const double lo = *mn - 10.0 - 10.0 * shift, hi = *mx + 10.0 + 10.0 * shift;
    auto f = [&](double e) { return oce_objective(p, z, a, al, e); };
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x0 = lo, x1 = hi;
    for (int i = 0; i < 200; ++i) {
        const double c = x1 - r * (x1 - x0), d = x0 + r * (x1 - x0);
        if (f(c) >= f(d)) x1 = d;
        else x0 = c;
    }
    const double arg = 0.5 * (x0 + x1), best = f(arg);
    const double tol = 1e-12 * (1.0 + std::abs(best));
    double l = arg, h = hi;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (l + h);
        if (f(m) >= best - tol) l = m;
        else h = m;
    }
    return l;
}

/// min q'z + 1/2 z'Qz over {z : Dz >= b} intersected with the box [lo, hi], by a
/// full grid with spacing h.
inline double qp_grid(const dcforge::Matrix& Q, const dcforge::Matrix& D, const dcforge::Vector& q,
                      const dcforge::Vector& b, const dcforge::Vector& lo, const dcforge::Vector& hi, double h) {
    const auto m = q.size();
    auto obj = [&](const dcforge::Vector& z) {
        for (Eigen::Index i = 0; i < D.rows(); ++i)
            if (D.row(i).dot(z) < b[i] - 1e-12) return std::numeric_limits<double>::infinity();
        return q.dot(z) + 0.5 * z.dot(Q * z);
    };
    std::vector<long> counts(m);
    long total = 1;
    for (Eigen::Index i = 0; i < m; ++i) {
        counts[i] = static_cast<long>(std::floor((hi[i] - lo[i]) / h + 1e-9)) + 1;
        total *= counts[i];
    }
    double best = std::numeric_limits<double>::infinity();
    dcforge::Vector z(m);
    for (long t = 0; t < total; ++t) {
        long r = t;
        for (Eigen::Index i = m - 1; i >= 0; --i) {
            z[i] = lo[i] + h * static_cast<double>(r % counts[i]);
            r /= counts[i];
        }
        best = std::min(best, obj(z));
    }
    return best;
}

} // namespace ref

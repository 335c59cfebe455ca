#include "dcforge/verification.hpp"

#include "dcforge/rng.hpp"

#include <algorithm>
#include <cmath>

namespace dcforge {

namespace {

CheckReport make_report(const std::string& name, int trials, double tol, std::uint64_t seed) {
    CheckReport r;
    r.check = name;
    r.trials = trials;
    r.tol = tol;
    r.seed = seed;
    return r;
}

void record(CheckReport& r, double violation, const std::vector<double>& witness) {
    if (violation > r.max_violation || (std::isnan(violation) && !std::isnan(r.max_violation))) {
        r.max_violation = violation;
        r.witness = witness;
    }
}

void finish(CheckReport& r) { r.pass = r.max_violation <= r.tol; }

std::vector<double> concat(const Vector& x, const Vector& y) {
    std::vector<double> w(x.data(), x.data() + x.size());
    w.insert(w.end(), y.data(), y.data() + y.size());
    return w;
}

} // namespace

CheckReport check_convexity(const std::string& name, const ScalarFn& fn, const Domain& domain, std::uint64_t seed,
                            int trials, double tol) {
    CheckReport r = make_report(name, trials, tol, seed);
    Rng rng(seed);
    for (int k = 0; k < trials; ++k) {
        const Vector x = domain.sample(rng), y = domain.sample(rng);
        const double fx = fn(x), fy = fn(y), fm = fn(0.5 * (x + y));
        const double scale = 1.0 + std::max({std::abs(fx), std::abs(fy), std::abs(fm)});
        record(r, (fm - 0.5 * (fx + fy)) / scale, concat(x, y));
    }
    finish(r);
    return r;
}

CheckReport check_dc_identity(const std::string& name, const DcFunction& dc, const ScalarFn& reference,
                              std::uint64_t seed, int samples, double tol) {
    CheckReport r = make_report(name, samples, tol, seed);
    Rng rng(seed);
    for (int k = 0; k < samples; ++k) {
        const Vector x = dc.domain().sample(rng);
        const double ref = reference(x);
        record(r, std::abs(dc.value(x) - ref) / (1.0 + std::abs(ref)), concat(x, Vector()));
    }
    finish(r);
    return r;
}

CheckReport check_lc1_bound(const std::string& name, const std::vector<QuadraticPiece>& pieces, const Matrix& moduli,
                            const Domain& domain, std::uint64_t seed, int samples, double tol) {
    CheckReport r = make_report(name, samples, tol, seed);
    Rng rng(seed);
    const int m = static_cast<int>(pieces.size());
    for (int k = 0; k < samples; ++k) {
        const Vector x = domain.sample(rng), y = domain.sample(rng);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i == j) continue;
                const QuadraticPiece d = pieces[j] - pieces[i];
                const double lhs = d.value(x) - d.value(y);
                const double rhs = d.gradient(y).dot(x - y) + 0.5 * moduli(j, i) * (x - y).squaredNorm();
                record(r, (lhs - rhs) / (1.0 + std::abs(lhs)), concat(x, y));
            }
    }
    finish(r);
    return r;
}

std::vector<CheckReport> check_components(const std::string& name, const DcFunction& dc, std::uint64_t seed,
                                          int trials, double tol) {
    const ConvexExpr g = dc.g(), h = dc.h();
    return {check_convexity(name + ".g", [&](const Vector& x) { return evaluate(g, x); }, dc.domain(), seed, trials,
                            tol),
            check_convexity(name + ".h", [&](const Vector& x) { return evaluate(h, x); }, dc.domain(), seed, trials,
                            tol)};
}

CheckReport check_sampled(const std::string& name, int trials, double tol, std::uint64_t seed,
                          const std::function<Vector(Rng&)>& draw, const ScalarFn& violation) {
    CheckReport r;
    r.check = name;
    r.trials = trials;
    r.tol = tol;
    r.seed = seed;
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        const Vector x = draw(rng);
        const double v = violation(x);
        if (std::isnan(v) || v > r.max_violation || r.witness.empty()) {
            if (std::isnan(v) || v > r.max_violation) r.max_violation = v;
            r.witness.assign(x.data(), x.data() + x.size());
            if (std::isnan(v)) break;
        }
    }
    r.pass = !std::isnan(r.max_violation) && r.max_violation <= tol;
    return r;
}

std::vector<CheckReport> merge_reports(std::vector<CheckReport> reports) {
    std::stable_sort(reports.begin(), reports.end(),
                     [](const CheckReport& a, const CheckReport& b) { return a.check < b.check; });
    return reports;
}

bool all_pass(const std::vector<CheckReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

} // namespace dcforge

#include "dcforge/domain.hpp"

#include "dcforge/errors.hpp"

#include <cmath>
#include <limits>

namespace dcforge {

Domain Domain::box(Vector lo, Vector hi) {
    if (lo.size() != hi.size() || lo.size() == 0) throw ArgumentError("box domain: bound vectors must be nonempty and equal length");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (!(lo[i] <= hi[i])) throw ArgumentError("box domain: lower bound exceeds upper bound");
    Domain d;
    d.kind_ = Kind::box;
    d.poly_ = Polyhedron::box(lo, hi);
    d.lower_ = std::move(lo);
    d.upper_ = std::move(hi);
    return d;
}

Domain Domain::box(int n, double lo, double hi) { return box(Vector::Constant(n, lo), Vector::Constant(n, hi)); }

Domain Domain::polyhedron(Polyhedron p) {
    if (p.dim() <= 0) throw ArgumentError("polyhedral domain: dimension must be positive");
    Domain d;
    d.kind_ = Kind::polyhedron;
    const int n = p.dim();
    d.lower_.resize(n);
    d.upper_.resize(n);
    for (int i = 0; i < n; ++i) {
        Vector e = Vector::Zero(n);
        e[i] = 1.0;
        const LpResult lo = lp_solve(e, p, Sense::minimize);
        if (lo.status == LpStatus::infeasible) throw ArgumentError("polyhedral domain: the polyhedron is empty");
        const LpResult hi = lp_solve(e, p, Sense::maximize);
        d.lower_[i] = lo.status == LpStatus::optimal ? lo.value : -std::numeric_limits<double>::infinity();
        d.upper_[i] = hi.status == LpStatus::optimal ? hi.value : std::numeric_limits<double>::infinity();
    }
    d.poly_ = std::move(p);
    if (d.bounded()) {
        try {
            d.vertices_ = enumerate_vertices(d.poly_, kInternalLimits).points;
        } catch (const ScaleError&) {
        }
    }
    return d;
}

bool Domain::bounded() const {
    return lower_.allFinite() && upper_.allFinite();
}

bool Domain::contains(const Vector& x, double tol) const {
    if (x.size() != dim()) return false;
    if (kind_ == Kind::box) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double t = tol * std::max(1.0, std::abs(x[i]));
            if (x[i] < lower_[i] - t || x[i] > upper_[i] + t) return false;
        }
        return true;
    }
    return poly_.contains(x, tol);
}

Vector Domain::sample(Rng& rng) const {
    if (!bounded()) throw UnboundedDomainError("cannot sample an unbounded domain");
    auto draw = [&] {
        Vector x(dim());
        for (int i = 0; i < dim(); ++i) x[i] = rng.uniform(lower_[i], upper_[i]);
        return x;
    };
    if (kind_ == Kind::box) return draw();
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Vector x = draw();
        if (poly_.contains(x)) return x;
    }
    // Thin polyhedra: random convex combination of vertices.
    if (vertices_.empty()) throw DomainError("polyhedral domain: rejection sampling failed");
    Vector w(static_cast<Eigen::Index>(vertices_.size()));
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = -std::log(std::max(1e-300, rng.uniform()));
    w /= w.sum();
    Vector x = Vector::Zero(dim());
    for (std::size_t i = 0; i < vertices_.size(); ++i) x += w[static_cast<Eigen::Index>(i)] * vertices_[i];
    return x;
}

Vector Domain::clamp(const Vector& x) const {
    if (kind_ == Kind::box) return x.cwiseMax(lower_).cwiseMin(upper_);
    return project(x, poly_);
}

bool Domain::operator==(const Domain& o) const {
    if (kind_ != o.kind_ || dim() != o.dim()) return false;
    if (kind_ == Kind::box) return lower_ == o.lower_ && upper_ == o.upper_;
    return poly_ == o.poly_;
}

} // namespace dcforge

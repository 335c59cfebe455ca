#include "dcforge/dc_function.hpp"

#include "dcforge/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dcforge {

DcFunction::DcFunction(ConvexExpr g, ConvexExpr h, Domain domain)
    : g_(std::move(g)), h_(std::move(h)), domain_(std::move(domain)) {
    if (g_.dim() != domain_.dim() || h_.dim() != domain_.dim())
        throw DomainError("dc function: component dimension does not match the domain");
}

DcFunction DcFunction::convex(ConvexExpr g, Domain domain) {
    const int n = domain.dim();
    return DcFunction(std::move(g), ConvexExpr::zero(n), std::move(domain));
}

DcFunction DcFunction::concave(ConvexExpr neg, Domain domain) {
    const int n = domain.dim();
    return DcFunction(ConvexExpr::zero(n), std::move(neg), std::move(domain));
}

DcFunction DcFunction::constant(double c, Domain domain) {
    const int n = domain.dim();
    return DcFunction(ConvexExpr::constant(n, c), ConvexExpr::zero(n), std::move(domain));
}

DcFunction DcFunction::affine(Vector a, double c, Domain domain) {
    return DcFunction(ConvexExpr::affine(std::move(a), c), ConvexExpr::zero(domain.dim()), domain);
}

std::pair<double, double> DcFunction::components(const Vector& x) const {
    if (!domain_.contains(x)) throw DomainError("dc function: point lies outside the domain");
    return evaluate_pair(g_, h_, x);
}

double DcFunction::value(const Vector& x) const {
    if (!domain_.contains(x)) throw DomainError("dc function: point lies outside the domain");
    return evaluate_difference(g_, h_, x);
}

namespace {

void require_shared_domain(const std::vector<DcFunction>& fs, const char* what) {
    if (fs.empty()) throw ArgumentError(std::string(what) + ": empty list");
    for (const auto& f : fs)
        if (f.domain() != fs.front().domain()) throw DomainError(std::string(what) + ": domains differ");
}

ConvexExpr scaled(double c, const ConvexExpr& e) { return c == 1.0 ? e : ConvexExpr::scale(c, e); }

ConvexExpr sum_or_zero(std::vector<ConvexExpr> xs, int n) {
    if (xs.empty()) return ConvexExpr::zero(n);
    return ConvexExpr::sum(std::move(xs));
}

} // namespace

DcFunction combine_linear(const std::vector<LinearTerm>& terms) {
    if (terms.empty()) throw ArgumentError("combine_linear: no terms");
    const Domain& dom = terms.front().f.domain();
    std::vector<ConvexExpr> g, h;
    for (const auto& t : terms) {
        if (t.f.domain() != dom) throw DomainError("combine_linear: domains differ");
        if (!std::isfinite(t.coef)) throw ArgumentError("combine_linear: non-finite coefficient");
        if (t.coef > 0.0) {
            g.push_back(scaled(t.coef, t.f.g()));
            h.push_back(scaled(t.coef, t.f.h()));
        } else if (t.coef < 0.0) {
            g.push_back(scaled(-t.coef, t.f.h()));
            h.push_back(scaled(-t.coef, t.f.g()));
        }
    }
    const int n = dom.dim();
    return DcFunction(sum_or_zero(std::move(g), n), sum_or_zero(std::move(h), n), dom);
}

namespace {

// A structurally nonnegative component leaves the shift unchanged, so the grid estimate is skipped.
double nonneg_or_infimum(const ConvexExpr& e, const Domain& dom) {
    const std::optional<double> lb = structural_lower_bound(e);
    if (lb && *lb >= 0.0) return *lb;
    return infimum_estimate(e, dom);
}

} // namespace

DcFunction square(const DcFunction& f) {
    const Domain& dom = f.domain();
    if (!dom.bounded()) throw UnboundedDomainError("square: domain must be bounded");
    const double inf_g = nonneg_or_infimum(f.g(), dom);
    const double inf_h = nonneg_or_infimum(f.h(), dom);
    const double c = std::max({0.0, -inf_g, -inf_h}) + 1e-6;
    const int n = dom.dim();
    const ConvexExpr shift = ConvexExpr::constant(n, c);
    const ConvexExpr gs = ConvexExpr::sum({f.g(), shift});
    const ConvexExpr hs = ConvexExpr::sum({f.h(), shift});
    const double lb_g = std::max(0.0, inf_g + c), lb_h = std::max(0.0, inf_h + c);
    ConvexExpr g2 = ConvexExpr::scale(
        2.0, ConvexExpr::sum({ConvexExpr::square_nonneg(gs, lb_g), ConvexExpr::square_nonneg(hs, lb_h)}));
    ConvexExpr h2 = ConvexExpr::square_nonneg(ConvexExpr::sum({gs, hs}), lb_g + lb_h);
    return DcFunction(std::move(g2), std::move(h2), dom);
}

DcFunction product(const DcFunction& f1, const DcFunction& f2) {
    if (f1.domain() != f2.domain()) throw DomainError("product: domains differ");
    const DcFunction s = combine_linear({{1.0, f1}, {1.0, f2}});
    return combine_linear({{0.5, square(s)}, {-0.5, square(f1)}, {-0.5, square(f2)}});
}

DcFunction norm2(const std::vector<DcFunction>& fs) {
    require_shared_domain(fs, "norm2");
    std::vector<ConvexExpr> g, h, both;
    for (const auto& f : fs) {
        g.push_back(f.g());
        h.push_back(f.h());
        both.push_back(f.g());
        both.push_back(f.h());
    }
    return DcFunction(ConvexExpr::dc_norm(std::move(g), std::move(h)), ConvexExpr::sum(std::move(both)),
                      fs.front().domain());
}

DcFunction pointwise_extremum(Extremum mode, const std::vector<DcFunction>& fs) {
    require_shared_domain(fs, "pointwise_extremum");
    if (fs.size() == 1) return fs.front();
    const std::size_t m = fs.size();
    // max_i (u_i - w_i) = max_i (u_i + sum_{j != i} w_j) - sum_j w_j; min swaps the roles.
    auto u = [&](std::size_t i) { return mode == Extremum::max ? fs[i].g() : fs[i].h(); };
    auto w = [&](std::size_t i) { return mode == Extremum::max ? fs[i].h() : fs[i].g(); };
    std::vector<ConvexExpr> all_w, cross;
    for (std::size_t i = 0; i < m; ++i) all_w.push_back(w(i));
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<ConvexExpr> terms{u(i)};
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) terms.push_back(w(j));
        cross.push_back(ConvexExpr::sum(std::move(terms)));
    }
    ConvexExpr mx = ConvexExpr::max_of(std::move(cross));
    ConvexExpr sw = ConvexExpr::sum(std::move(all_w));
    if (mode == Extremum::max) return DcFunction(std::move(mx), std::move(sw), fs.front().domain());
    return DcFunction(std::move(sw), std::move(mx), fs.front().domain());
}

DcFunction pos_part_abs(PosAbs mode, const DcFunction& f) {
    if (mode == PosAbs::pos) return pointwise_extremum(Extremum::max, {f, DcFunction::constant(0.0, f.domain())});
    return pointwise_extremum(Extremum::max, {f, combine_linear({{-1.0, f}})});
}

namespace {

void certify_incr_convex(const UnivariateConvex& b, double lo, double hi) {
    constexpr int kPoints = 401;
    std::vector<double> t(kPoints), v(kPoints);
    for (int i = 0; i < kPoints; ++i) {
        t[i] = lo + (hi - lo) * i / (kPoints - 1);
        v[i] = b.fn(t[i]);
        if (!std::isfinite(v[i])) throw CertificationError("compose_incr_convex: outer function is not finite");
    }
    for (int i = 1; i < kPoints; ++i)
        if (v[i] < v[i - 1] - 1e-9 * (1.0 + std::abs(v[i - 1])))
            throw CertificationError("compose_incr_convex: outer function is not nondecreasing");
    for (int i = 1; i + 1 < kPoints; ++i)
        if (v[i] > 0.5 * (v[i - 1] + v[i + 1]) + 1e-9 * (1.0 + std::abs(v[i])))
            throw CertificationError("compose_incr_convex: outer function is not convex");
}

} // namespace

DcFunction compose_incr_convex(const UnivariateConvex& b, const ConvexExpr& p, const std::vector<AffinePiece>& pieces,
                               const Domain& domain) {
    if (pieces.empty()) throw ArgumentError("compose_incr_convex: no affine pieces");
    if (!b.fn) throw ArgumentError("compose_incr_convex: outer function missing");
    const int n = domain.dim();
    if (p.dim() != n) throw DomainError("compose_incr_convex: inner function dimension mismatch");

    double lo = -100.0, hi = 100.0;
    std::vector<ConvexExpr> inner;
    for (const auto& pc : pieces) {
        if (pc.a.size() != n) throw DomainError("compose_incr_convex: piece dimension mismatch");
        inner.push_back(ConvexExpr::sum({p, ConvexExpr::affine(-pc.a, -pc.alpha)}));
    }
    if (domain.bounded()) {
        Rng rng(7);
        for (int k = 0; k < 200; ++k) {
            const Vector x = domain.sample(rng);
            for (const auto& e : inner) {
                const double t = evaluate(e, x);
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
        }
    }
    certify_incr_convex(b, lo, hi);

    std::vector<DcFunction> parts;
    for (auto& e : inner) parts.push_back(DcFunction::convex(ConvexExpr::incr_convex_composite(b, e), domain));
    return pointwise_extremum(Extremum::min, parts);
}

DcFunction compose_neg_log(const DcFunction& f) {
    const Domain& dom = f.domain();
    const double inf = infimum_estimate([&](const Vector& x) { return f.value(x); }, dom);
    if (!(inf >= 1e-6)) throw DomainError("compose_neg_log: function is not bounded away from zero on the domain");
    const double M = 1.0 / inf;
    return DcFunction(ConvexExpr::neg_log_shift(f.g(), f.h(), M), ConvexExpr::scale(M, f.g()), dom);
}

} // namespace dcforge

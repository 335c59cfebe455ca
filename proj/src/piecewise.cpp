#include "dcforge/piecewise.hpp"

#include "dcforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dcforge {

PiecewiseLc1::PiecewiseLc1(std::vector<QuadraticPiece> pieces, std::vector<Polyhedron> regions, Domain domain)
    : pieces_(std::move(pieces)), regions_(std::move(regions)), domain_(std::move(domain)) {
    if (pieces_.empty() || pieces_.size() != regions_.size())
        throw ArgumentError("piecewise: need one region per piece");
    if (!domain_.bounded()) throw UnboundedDomainError("piecewise: the working domain must be bounded");
    const int n = domain_.dim();
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const auto& p = pieces_[i];
        if (p.dim() != n || p.A.rows() != n || p.A.cols() != n || regions_[i].dim() != n)
            throw DomainError("piecewise: piece or region dimension does not match the domain");
        if ((p.A - p.A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, p.A.cwiseAbs().maxCoeff()))
            throw ArgumentError("piecewise: piece Hessian is not symmetric");
    }
    const int m = size();
    moduli_ = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) moduli_(j, i) = lipschitz_modulus(pieces_[i], pieces_[j]);
}

double PiecewiseLc1::piece_modulus(int i) const { return size() > 1 ? moduli_.col(i).maxCoeff() : 0.0; }

int PiecewiseLc1::locate(const Vector& x, double tol) const {
    for (int i = 0; i < size(); ++i)
        if (regions_[i].contains(x, tol)) return i;
    return -1;
}

double PiecewiseLc1::value(const Vector& x) const {
    const int i = locate(x);
    if (i < 0) throw DomainError("piecewise: point lies outside every region");
    return pieces_[i].value(x);
}

Vector PiecewiseLc1::sample_union(Rng& rng) const {
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Vector x = domain_.sample(rng);
        if (locate(x) >= 0) return x;
    }
    throw EmptyRegion("piecewise: could not sample the union of the regions");
}

double lipschitz_modulus(const QuadraticPiece& pi, const QuadraticPiece& pj) {
    const Matrix d = pj.A - pi.A;
    if (d.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    return spectral_norm(d, 1e-10);
}

DcFunction quadratic_dc(const QuadraticPiece& piece, const Domain& domain) {
    const int n = piece.dim();
    if (piece.is_affine()) return DcFunction::affine(piece.a, piece.c, domain);
    Matrix plus, minus;
    psd_split(piece.A, plus, minus);
    ConvexExpr g = ConvexExpr::quad(plus, piece.a, piece.c);
    ConvexExpr h = minus.cwiseAbs().maxCoeff() == 0.0 ? ConvexExpr::zero(n)
                                                      : ConvexExpr::quad(minus, Vector::Zero(n), 0.0);
    return DcFunction(std::move(g), std::move(h), domain);
}

namespace {

std::string format_point(const Vector& x) {
    std::ostringstream os;
    os.precision(10);
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

void validate_regions(const std::vector<Polyhedron>& regions, const Domain& domain, std::uint64_t seed,
                      const std::function<int(const Vector&)>& locate) {
    for (std::size_t i = 0; i < regions.size(); ++i)
        if (!is_feasible(regions[i].intersect(domain.as_polyhedron())))
            throw EmptyRegion("piecewise: region " + std::to_string(i) + " does not meet the working domain");
    Rng rng(seed);
    auto sample = [&]() {
        for (int attempt = 0; attempt < 100000; ++attempt) {
            Vector x = domain.sample(rng);
            if (locate(x) >= 0) return x;
        }
        throw EmptyRegion("piecewise: could not sample the union of the regions");
    };
    for (int k = 0; k < 1000; ++k) {
        const Vector x = sample(), y = sample();
        const Vector mid = 0.5 * (x + y);
        if (locate(mid) < 0)
            throw NonConvexUnion("piecewise: union of regions is not convex; midpoint of " + format_point(x) +
                                 " and " + format_point(y) + " lies outside");
    }
}

} // namespace

MinRepresentation build_min_representation(const PiecewiseLc1& pw, std::uint64_t seed) {
    validate_regions(pw.regions(), pw.domain(), seed, [&](const Vector& x) { return pw.locate(x); });
    const Domain& dom = pw.domain();
    const int m = pw.size();
    std::vector<DcFunction> psi;
    for (int i = 0; i < m; ++i) {
        const DcFunction theta_i = quadratic_dc(pw.pieces()[i], dom);
        if (m == 1) {
            psi.push_back(theta_i);
            break;
        }
        const ConvexExpr dist = ConvexExpr::polyhedral_distance(pw.regions()[i]);
        std::vector<ConvexExpr> grads;
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            const QuadraticPiece d = pw.pieces()[j] - pw.pieces()[i];
            grads.push_back(ConvexExpr::norm2_affine(d.A, d.a));
        }
        const DcFunction dist_dc = DcFunction::convex(dist, dom);
        const DcFunction grad_dc = DcFunction::convex(ConvexExpr::max_of(std::move(grads)), dom);
        const double Li = pw.piece_modulus(i);
        std::vector<LinearTerm> terms{{1.0, theta_i}, {1.0, product(dist_dc, grad_dc)}};
        if (Li > 0.0)
            terms.push_back({1.5 * Li, DcFunction::convex(ConvexExpr::square_nonneg(dist, 0.0), dom)});
        psi.push_back(combine_linear(terms));
    }
    DcFunction theta = pointwise_extremum(Extremum::min, psi);
    return {std::move(psi), std::move(theta)};
}

DcFunction pwa_min_representation(const std::vector<AffinePiece>& pieces, const std::vector<Polyhedron>& regions,
                                  const Domain& domain, std::uint64_t seed) {
    if (pieces.empty() || pieces.size() != regions.size())
        throw ArgumentError("pwa: need one region per affine piece");
    if (!domain.bounded()) throw UnboundedDomainError("pwa: the working domain must be bounded");
    for (std::size_t i = 0; i < pieces.size(); ++i)
        if (pieces[i].a.size() != domain.dim() || regions[i].dim() != domain.dim())
            throw DomainError("pwa: piece or region dimension does not match the domain");
    auto locate = [&](const Vector& x) {
        for (std::size_t i = 0; i < regions.size(); ++i)
            if (regions[i].contains(x)) return static_cast<int>(i);
        return -1;
    };
    validate_regions(regions, domain, seed, locate);
    const std::size_t m = pieces.size();
    std::vector<DcFunction> psi;
    for (std::size_t i = 0; i < m; ++i) {
        double K = 0.0;
        for (std::size_t j = 0; j < m; ++j) K = std::max(K, (pieces[j].a - pieces[i].a).norm());
        std::vector<ConvexExpr> g{ConvexExpr::affine(pieces[i].a, pieces[i].alpha)};
        if (K > 0.0 && m > 1) g.push_back(ConvexExpr::scale(K, ConvexExpr::polyhedral_distance(regions[i])));
        psi.push_back(DcFunction::convex(ConvexExpr::sum(std::move(g)), domain));
    }
    return pointwise_extremum(Extremum::min, psi);
}

CheckReport check_boundary_agreement(const PiecewiseLc1& pw, std::uint64_t seed, int samples, double tol) {
    CheckReport r;
    r.check = "boundary_agreement";
    r.trials = samples;
    r.tol = tol;
    r.seed = seed;
    Rng rng(seed);
    for (int k = 0; k < samples; ++k) {
        const Vector x = pw.sample_union(rng);
        const int i = pw.locate(x);
        for (int j = 0; j < pw.size(); ++j) {
            if (j == i) continue;
            const Polyhedron both = pw.regions()[j].intersect(pw.domain().as_polyhedron());
            if (!is_feasible(both)) continue;
            const Vector y = project(x, both);
            if (!pw.regions()[i].contains(y, 1e-9)) continue;
            const double a = pw.pieces()[i].value(y), b = pw.pieces()[j].value(y);
            const double v = std::abs(a - b) / (1.0 + std::abs(a));
            if (v > r.max_violation) {
                r.max_violation = v;
                r.witness.assign(y.data(), y.data() + y.size());
            }
        }
    }
    r.pass = r.max_violation <= r.tol;
    return r;
}

CheckReport check_selection(const PiecewiseLc1& pw, std::uint64_t seed, int samples, double tol) {
    CheckReport r;
    r.check = "selection";
    r.trials = samples * pw.size();
    r.tol = tol;
    r.seed = seed;
    Rng rng(seed);
    for (int i = 0; i < pw.size(); ++i) {
        const Polyhedron reg = pw.regions()[i].intersect(pw.domain().as_polyhedron());
        for (int k = 0; k < samples; ++k) {
            Vector x = pw.domain().sample(rng);
            if (!reg.contains(x)) x = project(x, reg);
            const double a = pw.value(x), b = pw.pieces()[i].value(x);
            const double v = std::abs(a - b) / (1.0 + std::abs(b));
            if (v > r.max_violation) {
                r.max_violation = v;
                r.witness.assign(x.data(), x.data() + x.size());
            }
        }
    }
    r.pass = r.max_violation <= r.tol;
    return r;
}

} // namespace dcforge

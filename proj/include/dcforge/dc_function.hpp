#pragma once

#include "dcforge/convex_expr.hpp"
#include "dcforge/domain.hpp"

#include <utility>
#include <vector>

namespace dcforge {

/// g - h on a shared convex domain.
class DcFunction {
public:
    DcFunction(ConvexExpr g, ConvexExpr h, Domain domain);

    static DcFunction convex(ConvexExpr g, Domain domain);
    static DcFunction concave(ConvexExpr neg, Domain domain);
    static DcFunction constant(double c, Domain domain);
    static DcFunction affine(Vector a, double c, Domain domain);

    const ConvexExpr& g() const { return g_; }
    const ConvexExpr& h() const { return h_; }
    const Domain& domain() const { return domain_; }
    int dim() const { return domain_.dim(); }

    /// g(x) - h(x); throws DomainError outside the domain.
    double value(const Vector& x) const;
    double operator()(const Vector& x) const { return value(x); }
    std::pair<double, double> components(const Vector& x) const;

private:
    ConvexExpr g_, h_;
    Domain domain_;
};

struct LinearTerm {
    double coef;
    DcFunction f;
};

DcFunction combine_linear(const std::vector<LinearTerm>& terms);

/// f^2 = 2(g~^2 + h~^2) - (g~ + h~)^2 with g~, h~ shifted to be nonnegative.
DcFunction square(const DcFunction& f);

/// f1 f2 = 1/2 [(f1 + f2)^2 - f1^2 - f2^2].
DcFunction product(const DcFunction& f1, const DcFunction& f2);

/// ||(f_1, ..., f_m)||_2
DcFunction norm2(const std::vector<DcFunction>& fs);

enum class Extremum { min, max };
DcFunction pointwise_extremum(Extremum mode, const std::vector<DcFunction>& fs);

enum class PosAbs { pos, abs };
DcFunction pos_part_abs(PosAbs mode, const DcFunction& f);

struct AffinePiece {
    Vector a;
    double alpha = 0.0;
};

/// b(p(x) - max_i [a_i^T x + alpha_i]) as min_i b(p(x) - a_i^T x - alpha_i).
/// `b` is checked for convexity and monotonicity on sampled points.
DcFunction compose_incr_convex(const UnivariateConvex& b, const ConvexExpr& p, const std::vector<AffinePiece>& pieces,
                               const Domain& domain);

/// -log f with minuend -log f + M g and subtrahend M g, M = 1 / inf f.
DcFunction compose_neg_log(const DcFunction& f);

} // namespace dcforge

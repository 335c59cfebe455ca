#pragma once

#include "dcforge/domain.hpp"
#include "dcforge/linalg.hpp"
#include "dcforge/polyhedral.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace dcforge {

/// PSD tolerance on the smallest eigenvalue of quadratic-form matrices.
inline constexpr double kPsdTol = 1e-9;
/// Allowed negativity of a SquareOfNonneg child at domain samples.
inline constexpr double kEvalTol = 1e-9;

/// A univariate convex nondecreasing function (outer function of a composite).
struct UnivariateConvex {
    std::function<double(double)> fn;
    std::string name;
};

struct Node;
class ConvexExpr;

using ExprPtr = std::shared_ptr<const Node>;

/// Immutable expression tree, convex by construction. Cheap to copy (shared nodes).
class ConvexExpr {
public:
    static ConvexExpr affine(Vector a, double c);
    static ConvexExpr constant(int dim, double c);
    static ConvexExpr zero(int dim) { return constant(dim, 0.0); }
    static ConvexExpr sum(std::vector<ConvexExpr> children);
    static ConvexExpr scale(double c, ConvexExpr child);
    static ConvexExpr max_of(std::vector<ConvexExpr> children);
    static ConvexExpr quad(Matrix A, Vector a, double c);
    static ConvexExpr square_nonneg(ConvexExpr child, double certified_lower_bound);
    static ConvexExpr norm2_affine(Matrix M, Vector d);
    static ConvexExpr cvar_envelope(double alpha, std::vector<double> probs, std::vector<ConvexExpr> p,
                                    std::vector<ConvexExpr> q);
    static ConvexExpr neg_oce_envelope(std::vector<double> slopes, std::vector<double> intercepts,
                                       std::vector<double> probs, std::vector<ConvexExpr> p,
                                       std::vector<ConvexExpr> q);
    static ConvexExpr dc_norm(std::vector<ConvexExpr> g, std::vector<ConvexExpr> h);
    static ConvexExpr neg_log_shift(ConvexExpr g, ConvexExpr h, double M);
    static ConvexExpr incr_convex_composite(UnivariateConvex outer, ConvexExpr inner);
    static ConvexExpr affine_precompose(ConvexExpr inner, Matrix T, Vector t);
    static ConvexExpr polyhedral_distance(Polyhedron set);
    static ConvexExpr callable(int dim, std::function<double(const Vector&)> fn, std::string label);

    int dim() const;
    const Node& node() const { return *node_; }
    std::string_view kind_name() const;

    /// Shorthand for evaluate(*this, x).
    double operator()(const Vector& x) const;

private:
    explicit ConvexExpr(ExprPtr n) : node_(std::move(n)) {}
    ExprPtr node_;
};

namespace node {

struct Affine { Vector a; double c = 0.0; };
struct Sum { std::vector<ConvexExpr> children; };
struct NonnegScale { double c = 0.0; ConvexExpr child; };
struct MaxOf { std::vector<ConvexExpr> children; };
/// 0.5 x'Ax + a'x + c with A PSD.
struct QuadForm { Matrix A; Vector a; double c = 0.0; };
/// child(x)^2 where child >= lower_bound >= 0 on the domain it was certified for.
struct SquareOfNonneg { ConvexExpr child; double lower_bound = 0.0; };
/// ||M x + d||_2
struct Norm2Affine { Matrix M; Vector d; };
/// min_t t + 1/(1-alpha) sum_s prob_s max(p_s(x) - t, q_s(x))
struct CvarEnvelope {
    double alpha = 0.5;
    std::vector<double> probs;
    std::vector<ConvexExpr> p, q;
};
/// min_eta  sum_s prob_s max_i {(A - a_i) p_s(x) + a_i (q_s(x) + eta) - alpha_i} - eta,  A = sum_i a_i.
/// This is the negation of the concave sup-over-eta part of a piecewise-linear OCE.
struct NegOceEnvelope {
    std::vector<double> slopes, intercepts;
    std::vector<double> probs;
    std::vector<ConvexExpr> p, q;
};
/// ||(g_i - h_i)_i||_2 + sum_i (g_i + h_i)
struct DcNorm { std::vector<ConvexExpr> g, h; };
/// -log(g - h) + M g, convex when 1/M <= inf (g - h).
struct NegLogShift { ConvexExpr g, h; double M = 1.0; };
/// outer(inner(x)) with outer convex nondecreasing.
struct IncrConvexComposite { UnivariateConvex outer; ConvexExpr inner; };
/// inner(T x + t)
struct AffinePrecompose { ConvexExpr inner; Matrix T; Vector t; };
/// dist(x; set)
struct PolyhedralDistance { Polyhedron set; };
/// Externally certified convex evaluator (value functions, folded-penalty pieces).
struct Callable { std::function<double(const Vector&)> fn; std::string label; };

} // namespace node

using NodeData = std::variant<node::Affine, node::Sum, node::NonnegScale, node::MaxOf, node::QuadForm,
                              node::SquareOfNonneg, node::Norm2Affine, node::CvarEnvelope, node::NegOceEnvelope,
                              node::DcNorm, node::NegLogShift, node::IncrConvexComposite, node::AffinePrecompose,
                              node::PolyhedralDistance, node::Callable>;

struct Node {
    int dim = 0;
    NodeData data;
};

/// Exact value at x (envelope nodes by breakpoint scan). Throws DomainError on a
/// dimension mismatch and UnboundedAuxiliary when an envelope's auxiliary
/// minimization is unbounded.
double evaluate(const ConvexExpr& expr, const Vector& x);

/// Values of two expressions at the same point, sharing one evaluation cache
/// (dc components usually share most of their nodes).
std::pair<double, double> evaluate_pair(const ConvexExpr& a, const ConvexExpr& b, const Vector& x);

/// a(x) - b(x), rounded once from the extended-precision component values.
double evaluate_difference(const ConvexExpr& a, const ConvexExpr& b, const Vector& x);

/// Same, additionally rejecting points outside `domain`.
double evaluate(const ConvexExpr& expr, const Domain& domain, const Vector& x);

/// Non-certified numerical estimate of inf over a bounded domain: dense grid
/// (at least 10^3 points and 10 per axis, capped at 10^5) followed by compass
/// descent from the best grid point.
double infimum_estimate(const ConvexExpr& expr, const Domain& domain);
double infimum_estimate(const std::function<double(const Vector&)>& fn, const Domain& domain);

/// Lower bound read off the tree structure (norms, distances, squares, sums and
/// maxima of bounded nodes), or nullopt when the structure gives none.
std::optional<double> structural_lower_bound(const ConvexExpr& expr);

/// Number of node references in the tree.
std::size_t node_count(const ConvexExpr& expr);

namespace envelope {

struct ScanResult {
    double value = 0.0;
    double argmin = 0.0;
};

/// t + 1/(1-alpha) sum_s probs_s max(p_s - t, q_s)
double cvar_objective(double alpha, const std::vector<double>& probs, const std::vector<double>& p,
                      const std::vector<double>& q, double t);
/// Minimizes cvar_objective over the breakpoints {p_s - q_s} with +/-1 sentinels.
ScanResult cvar_scan(double alpha, const std::vector<double>& probs, const std::vector<double>& p,
                     const std::vector<double>& q);

double neg_oce_objective(const std::vector<double>& slopes, const std::vector<double>& intercepts,
                         const std::vector<double>& probs, const std::vector<double>& p,
                         const std::vector<double>& q, double eta);
ScanResult neg_oce_scan(const std::vector<double>& slopes, const std::vector<double>& intercepts,
                        const std::vector<double>& probs, const std::vector<double>& p,
                        const std::vector<double>& q);

} // namespace envelope

} // namespace dcforge

#include "dcforge/convex_expr.hpp"

#include "dcforge/errors.hpp"

#include <algorithm>
#include <type_traits>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace dcforge {

namespace {

void require_same_dim(const std::vector<ConvexExpr>& xs, const char* what) {
    if (xs.empty()) throw ArgumentError(std::string(what) + ": needs at least one child");
    for (const auto& c : xs)
        if (c.dim() != xs.front().dim()) throw DomainError(std::string(what) + ": children differ in dimension");
}

void validate_probs(const std::vector<double>& probs, std::size_t n, const char* what) {
    if (probs.size() != n || n == 0) throw ArgumentError(std::string(what) + ": scenario count mismatch");
    double total = 0.0;
    for (double p : probs) {
        if (!(p > 0.0) || !std::isfinite(p)) throw ArgumentError(std::string(what) + ": probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ArgumentError(std::string(what) + ": probabilities must sum to 1");
}

int scenario_dim(const std::vector<ConvexExpr>& p, const std::vector<ConvexExpr>& q, const char* what) {
    if (p.size() != q.size()) throw ArgumentError(std::string(what) + ": p/q length mismatch");
    std::vector<ConvexExpr> all = p;
    all.insert(all.end(), q.begin(), q.end());
    require_same_dim(all, what);
    return all.front().dim();
}

} // namespace

ConvexExpr ConvexExpr::affine(Vector a, double c) {
    if (a.size() == 0) throw ArgumentError("affine: empty coefficient vector");
    const int n = static_cast<int>(a.size());
    return ConvexExpr(std::make_shared<const Node>(Node{n, node::Affine{std::move(a), c}}));
}

ConvexExpr ConvexExpr::constant(int dim, double c) { return affine(Vector::Zero(dim), c); }

ConvexExpr ConvexExpr::sum(std::vector<ConvexExpr> children) {
    require_same_dim(children, "sum");
    if (children.size() == 1) return children.front();
    const int n = children.front().dim();
    return ConvexExpr(std::make_shared<const Node>(Node{n, node::Sum{std::move(children)}}));
}

ConvexExpr ConvexExpr::scale(double c, ConvexExpr child) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ArgumentError("scale: coefficient must be finite and nonnegative");
    const int n = child.dim();
    return ConvexExpr(std::make_shared<const Node>(Node{n, node::NonnegScale{c, std::move(child)}}));
}

ConvexExpr ConvexExpr::max_of(std::vector<ConvexExpr> children) {
    require_same_dim(children, "max");
    if (children.size() == 1) return children.front();
    const int n = children.front().dim();
    return ConvexExpr(std::make_shared<const Node>(Node{n, node::MaxOf{std::move(children)}}));
}

ConvexExpr ConvexExpr::quad(Matrix A, Vector a, double c) {
    if (A.rows() != A.cols() || A.rows() != a.size() || a.size() == 0)
        throw ArgumentError("quad: inconsistent dimensions");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()))
        throw ArgumentError("quad: matrix is not symmetric");
    A = 0.5 * (A + A.transpose());
    if (smallest_eigenvalue(A) < -kPsdTol) throw CertificationError("quad: matrix is not positive semidefinite");
    const int n = static_cast<int>(a.size());
    return ConvexExpr(std::make_shared<const Node>(Node{n, node::QuadForm{std::move(A), std::move(a), c}}));
}

ConvexExpr ConvexExpr::square_nonneg(ConvexExpr child, double certified_lower_bound) {
    if (!(certified_lower_bound >= 0.0)) throw ArgumentError("square_nonneg: lower bound must be nonnegative");
    const int n = child.dim();
    return ConvexExpr(
        std::make_shared<const Node>(Node{n, node::SquareOfNonneg{std::move(child), certified_lower_bound}}));
}

ConvexExpr ConvexExpr::norm2_affine(Matrix M, Vector d) {
    if (M.rows() != d.size() || M.cols() == 0) throw ArgumentError("norm2: inconsistent dimensions");
    const int n = static_cast<int>(M.cols());
    return ConvexExpr(std::make_shared<const Node>(Node{n, node::Norm2Affine{std::move(M), std::move(d)}}));
}

ConvexExpr ConvexExpr::cvar_envelope(double alpha, std::vector<double> probs, std::vector<ConvexExpr> p,
                                     std::vector<ConvexExpr> q) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("cvar envelope: alpha must lie in (0,1)");
    const int n = scenario_dim(p, q, "cvar envelope");
    validate_probs(probs, p.size(), "cvar envelope");
    return ConvexExpr(std::make_shared<const Node>(
        Node{n, node::CvarEnvelope{alpha, std::move(probs), std::move(p), std::move(q)}}));
}

ConvexExpr ConvexExpr::neg_oce_envelope(std::vector<double> slopes, std::vector<double> intercepts,
                                        std::vector<double> probs, std::vector<ConvexExpr> p,
                                        std::vector<ConvexExpr> q) {
    if (slopes.empty() || slopes.size() != intercepts.size())
        throw ArgumentError("oce envelope: utility pieces malformed");
    for (double a : slopes)
        if (!(a >= 0.0)) throw ArgumentError("oce envelope: slopes must be nonnegative");
    const int n = scenario_dim(p, q, "oce envelope");
    validate_probs(probs, p.size(), "oce envelope");
    return ConvexExpr(std::make_shared<const Node>(Node{
        n, node::NegOceEnvelope{std::move(slopes), std::move(intercepts), std::move(probs), std::move(p),
                                std::move(q)}}));
}

ConvexExpr ConvexExpr::dc_norm(std::vector<ConvexExpr> g, std::vector<ConvexExpr> h) {
    const int n = scenario_dim(g, h, "dc norm");
    return ConvexExpr(std::make_shared<const Node>(Node{n, node::DcNorm{std::move(g), std::move(h)}}));
}

ConvexExpr ConvexExpr::neg_log_shift(ConvexExpr g, ConvexExpr h, double M) {
    if (g.dim() != h.dim()) throw DomainError("neg log: dimension mismatch");
    if (!(M > 0.0) || !std::isfinite(M)) throw ArgumentError("neg log: M must be positive");
    const int n = g.dim();
    return ConvexExpr(std::make_shared<const Node>(Node{n, node::NegLogShift{std::move(g), std::move(h), M}}));
}

ConvexExpr ConvexExpr::incr_convex_composite(UnivariateConvex outer, ConvexExpr inner) {
    if (!outer.fn) throw ArgumentError("composite: outer function missing");
    const int n = inner.dim();
    return ConvexExpr(
        std::make_shared<const Node>(Node{n, node::IncrConvexComposite{std::move(outer), std::move(inner)}}));
}

ConvexExpr ConvexExpr::affine_precompose(ConvexExpr inner, Matrix T, Vector t) {
    if (T.rows() != inner.dim() || t.size() != T.rows() || T.cols() == 0)
        throw ArgumentError("affine precompose: inconsistent dimensions");
    const int n = static_cast<int>(T.cols());
    return ConvexExpr(
        std::make_shared<const Node>(Node{n, node::AffinePrecompose{std::move(inner), std::move(T), std::move(t)}}));
}

ConvexExpr ConvexExpr::polyhedral_distance(Polyhedron set) {
    if (set.dim() <= 0) throw ArgumentError("distance: empty dimension");
    if (!is_feasible(set)) throw EmptyPolyhedron("distance: set is empty");
    const int n = set.dim();
    return ConvexExpr(std::make_shared<const Node>(Node{n, node::PolyhedralDistance{std::move(set)}}));
}

ConvexExpr ConvexExpr::callable(int dim, std::function<double(const Vector&)> fn, std::string label) {
    if (dim <= 0 || !fn) throw ArgumentError("callable: invalid evaluator");
    return ConvexExpr(std::make_shared<const Node>(Node{dim, node::Callable{std::move(fn), std::move(label)}}));
}

int ConvexExpr::dim() const { return node_->dim; }

std::string_view ConvexExpr::kind_name() const {
    static constexpr std::string_view names[] = {
        "affine", "sum", "scale", "max", "quad", "square_nonneg", "norm2", "cvar_envelope",
        "neg_oce_envelope", "dc_norm", "neg_log_shift", "incr_convex_composite", "affine_precompose",
        "polyhedral_distance", "callable"};
    return names[node_->data.index()];
}

double ConvexExpr::operator()(const Vector& x) const { return evaluate(*this, x); }

namespace envelope {

double cvar_objective(double alpha, const std::vector<double>& probs, const std::vector<double>& p,
                      const std::vector<double>& q, double t) {
    const double k = 1.0 / (1.0 - alpha);
    double acc = 0.0;
    for (std::size_t s = 0; s < probs.size(); ++s) acc += probs[s] * std::max(p[s] - t, q[s]);
    return t + k * acc;
}

namespace {

template <class Objective>
ScanResult scan(const std::vector<double>& candidates, Objective&& obj, const char* what) {
    ScanResult best{std::numeric_limits<double>::infinity(), 0.0};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double t : candidates) {
        const double v = obj(t);
        if (v < best.value) best = {v, t};
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    const double slack = 1e-9 * (1.0 + std::abs(best.value));
    for (double t : {lo - 1.0, hi + 1.0})
        if (obj(t) < best.value - slack)
            throw UnboundedAuxiliary(std::string(what) + ": auxiliary minimization is unbounded");
    return best;
}

} // namespace

ScanResult cvar_scan(double alpha, const std::vector<double>& probs, const std::vector<double>& p,
                     const std::vector<double>& q) {
    std::vector<double> cand(p.size());
    for (std::size_t s = 0; s < p.size(); ++s) cand[s] = p[s] - q[s];
    return scan(cand, [&](double t) { return cvar_objective(alpha, probs, p, q, t); }, "cvar envelope");
}

double neg_oce_objective(const std::vector<double>& slopes, const std::vector<double>& intercepts,
                         const std::vector<double>& probs, const std::vector<double>& p,
                         const std::vector<double>& q, double eta) {
    const double total = std::accumulate(slopes.begin(), slopes.end(), 0.0);
    double acc = 0.0;
    for (std::size_t s = 0; s < probs.size(); ++s) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < slopes.size(); ++i)
            m = std::max(m, (total - slopes[i]) * p[s] + slopes[i] * (q[s] + eta) - intercepts[i]);
        acc += probs[s] * m;
    }
    return acc - eta;
}

ScanResult neg_oce_scan(const std::vector<double>& slopes, const std::vector<double>& intercepts,
                        const std::vector<double>& probs, const std::vector<double>& p,
                        const std::vector<double>& q) {
    std::vector<double> cand;
    for (std::size_t s = 0; s < p.size(); ++s)
        for (std::size_t i = 0; i < slopes.size(); ++i)
            for (std::size_t j = i + 1; j < slopes.size(); ++j)
                if (slopes[i] != slopes[j])
                    cand.push_back(p[s] - q[s] + (intercepts[i] - intercepts[j]) / (slopes[i] - slopes[j]));
    if (cand.empty())
        for (std::size_t s = 0; s < p.size(); ++s) cand.push_back(p[s] - q[s]);
    return scan(cand, [&](double eta) { return neg_oce_objective(slopes, intercepts, probs, p, q, eta); },
                "oce envelope");
}

} // namespace envelope

namespace {

// Interior sums, scales and squares are accumulated in extended precision, so dc pairs
// with large components keep their difference when it is rounded once at the end.
using Real = long double;

class Evaluator {
public:
    explicit Evaluator(const Vector& x) : x_(x) {}

    Real eval(const ConvexExpr& e) { return eval_at(e, x_, true); }

private:
    Real eval_at(const ConvexExpr& e, const Vector& x, bool memo) {
        const Node* key = &e.node();
        if (memo) {
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        const Real v = std::visit([&](const auto& n) { return compute(n, x, memo); }, e.node().data);
        if (memo) cache_.emplace(key, v);
        return v;
    }

    std::vector<double> eval_all(const std::vector<ConvexExpr>& xs, const Vector& x, bool memo) {
        std::vector<double> out(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = static_cast<double>(eval_at(xs[i], x, memo));
        return out;
    }

    Real compute(const node::Affine& n, const Vector& x, bool) {
        Real acc = n.c;
        for (Eigen::Index i = 0; i < x.size(); ++i) acc += static_cast<Real>(n.a[i]) * x[i];
        return acc;
    }
    Real compute(const node::Sum& n, const Vector& x, bool memo) {
        Real acc = 0.0L;
        for (const auto& c : n.children) acc += eval_at(c, x, memo);
        return acc;
    }
    Real compute(const node::NonnegScale& n, const Vector& x, bool memo) {
        return n.c == 0.0 ? 0.0L : static_cast<Real>(n.c) * eval_at(n.child, x, memo);
    }
    Real compute(const node::MaxOf& n, const Vector& x, bool memo) {
        Real m = -std::numeric_limits<Real>::infinity();
        for (const auto& c : n.children) m = std::max(m, eval_at(c, x, memo));
        return m;
    }
    Real compute(const node::QuadForm& n, const Vector& x, bool) {
        Real acc = n.c;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            Real row = 0.0L;
            for (Eigen::Index j = 0; j < x.size(); ++j) row += static_cast<Real>(n.A(i, j)) * x[j];
            acc += static_cast<Real>(x[i]) * (0.5L * row + n.a[i]);
        }
        return acc;
    }
    Real compute(const node::SquareOfNonneg& n, const Vector& x, bool memo) {
        const Real v = eval_at(n.child, x, memo);
        if (v < -kEvalTol * (1.0L + std::abs(v)))
            throw DomainError("square_nonneg: child is negative at the evaluation point");
        return v * v;
    }
    Real compute(const node::Norm2Affine& n, const Vector& x, bool) { return (n.M * x + n.d).norm(); }
    Real compute(const node::CvarEnvelope& n, const Vector& x, bool memo) {
        return envelope::cvar_scan(n.alpha, n.probs, eval_all(n.p, x, memo), eval_all(n.q, x, memo)).value;
    }
    Real compute(const node::NegOceEnvelope& n, const Vector& x, bool memo) {
        return envelope::neg_oce_scan(n.slopes, n.intercepts, n.probs, eval_all(n.p, x, memo),
                                      eval_all(n.q, x, memo))
            .value;
    }
    Real compute(const node::DcNorm& n, const Vector& x, bool memo) {
        Real sq = 0.0L, lin = 0.0L;
        for (std::size_t i = 0; i < n.g.size(); ++i) {
            const Real g = eval_at(n.g[i], x, memo), h = eval_at(n.h[i], x, memo);
            sq += (g - h) * (g - h);
            lin += g + h;
        }
        return std::sqrt(sq) + lin;
    }
    Real compute(const node::NegLogShift& n, const Vector& x, bool memo) {
        const Real g = eval_at(n.g, x, memo);
        const Real v = g - eval_at(n.h, x, memo);
        if (!(v > 0.0L)) throw DomainError("neg log: argument is not positive");
        return -std::log(v) + static_cast<Real>(n.M) * g;
    }
    Real compute(const node::IncrConvexComposite& n, const Vector& x, bool memo) {
        return n.outer.fn(static_cast<double>(eval_at(n.inner, x, memo)));
    }
    Real compute(const node::AffinePrecompose& n, const Vector& x, bool) {
        // Children see a different point, so their values must not share this cache.
        const Vector y = n.T * x + n.t;
        Evaluator inner(y);
        return inner.eval(n.inner);
    }
    Real compute(const node::PolyhedralDistance& n, const Vector& x, bool) { return distance(x, n.set); }
    Real compute(const node::Callable& n, const Vector& x, bool) { return n.fn(x); }

    const Vector& x_;
    std::unordered_map<const Node*, Real> cache_;
};

} // namespace

double evaluate(const ConvexExpr& expr, const Vector& x) {
    if (x.size() != expr.dim()) throw DomainError("evaluate: point has the wrong dimension");
    Evaluator ev(x);
    return static_cast<double>(ev.eval(expr));
}

std::pair<double, double> evaluate_pair(const ConvexExpr& a, const ConvexExpr& b, const Vector& x) {
    if (x.size() != a.dim() || x.size() != b.dim()) throw DomainError("evaluate: point has the wrong dimension");
    Evaluator ev(x);
    const Real va = ev.eval(a);
    return {static_cast<double>(va), static_cast<double>(ev.eval(b))};
}

double evaluate_difference(const ConvexExpr& a, const ConvexExpr& b, const Vector& x) {
    if (x.size() != a.dim() || x.size() != b.dim()) throw DomainError("evaluate: point has the wrong dimension");
    Evaluator ev(x);
    const Real va = ev.eval(a);
    return static_cast<double>(va - ev.eval(b));
}

double evaluate(const ConvexExpr& expr, const Domain& domain, const Vector& x) {
    if (!domain.contains(x)) throw DomainError("evaluate: point lies outside the domain");
    return evaluate(expr, x);
}

double infimum_estimate(const ConvexExpr& expr, const Domain& domain) {
    return infimum_estimate([&](const Vector& x) { return evaluate(expr, x); }, domain);
}

namespace {

// Euclidean projection onto the probability simplex.
Vector project_simplex(const Vector& v) {
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cum += u[i];
        const double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) theta = t;
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

// Approximate minimum-norm point of the convex hull of `pts` by projected gradient on the weights.
Vector min_norm_hull(const std::vector<Vector>& pts) {
    const int m = static_cast<int>(pts.size());
    Matrix P(pts.front().size(), m);
    for (int i = 0; i < m; ++i) P.col(i) = pts[i];
    const Matrix gram = P.transpose() * P;
    const double lip = std::max(gram.diagonal().sum(), 1e-300);
    Vector w = Vector::Constant(m, 1.0 / m);
    for (int it = 0; it < 200; ++it) w = project_simplex(w - gram * w / lip);
    return P * w;
}

} // namespace

double infimum_estimate(const std::function<double(const Vector&)>& fn, const Domain& domain) {
    if (!domain.bounded()) throw UnboundedDomainError("infimum estimate: domain is unbounded");
    const int n = domain.dim();
    const Vector& lo = domain.lower();
    const Vector& hi = domain.upper();

    double best = std::numeric_limits<double>::infinity();
    Vector best_x = domain.clamp(0.5 * (lo + hi));
    auto consider = [&](const Vector& x) {
        if (!domain.contains(x)) return;
        const double v = fn(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    };

    const int per_axis = std::max(10, static_cast<int>(std::ceil(std::pow(1000.0, 1.0 / n) - 1e-9)));
    const double total = std::pow(static_cast<double>(per_axis), n);
    constexpr double kMaxGrid = 1e5;
    if (total <= kMaxGrid) {
        std::vector<int> idx(n, 0);
        Vector x(n);
        for (;;) {
            for (int i = 0; i < n; ++i)
                x[i] = lo[i] + (hi[i] - lo[i]) * static_cast<double>(idx[i]) / (per_axis - 1);
            consider(x);
            int i = 0;
            while (i < n && ++idx[i] == per_axis) idx[i++] = 0;
            if (i == n) break;
        }
    } else {
        Rng rng(0x1f2e3d4c5b6a7988ULL);
        for (int k = 0; k < static_cast<int>(kMaxGrid); ++k) consider(domain.sample(rng));
    }
    if (!std::isfinite(best)) consider(best_x);

    // Compass descent from the best grid point.
    Vector step = 0.1 * (hi - lo);
    int evals = 0;
    constexpr int kMaxEvals = 2000;
    while (evals < kMaxEvals && step.maxCoeff() > 1e-10) {
        bool improved = false;
        for (int i = 0; i < n && evals < kMaxEvals; ++i) {
            for (double dir : {-1.0, 1.0}) {
                Vector y = best_x;
                y[i] = std::clamp(y[i] + dir * step[i], lo[i], hi[i]);
                if (!domain.contains(y)) continue;
                ++evals;
                const double v = fn(y);
                if (v < best) {
                    best = v;
                    best_x = y;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }

    // Random-direction pattern search: compass steps stall on ridges of nonsmooth functions.
    Rng rng(0x5eed5eed5eed5eedULL);
    const double width = (hi - lo).maxCoeff();
    double radius = 0.1 * width;
    evals = 0;
    constexpr int kMaxPatternEvals = 2000;
    while (evals < kMaxPatternEvals && radius > 1e-9 * std::max(1.0, width)) {
        bool improved = false;
        for (int k = 0; k < 4 * n && evals < kMaxPatternEvals; ++k) {
            Vector d(n);
            for (int i = 0; i < n; ++i) d[i] = rng.normal();
            const double norm = d.norm();
            if (norm == 0.0) continue;
            d *= radius / norm;
            for (double sgn : {1.0, -1.0}) {
                const Vector y = domain.clamp(best_x + sgn * d);
                if (!domain.contains(y)) continue;
                ++evals;
                const double v = fn(y);
                if (v < best) {
                    best = v;
                    best_x = y;
                    improved = true;
                }
            }
        }
        radius *= improved ? 1.5 : 0.5;
        radius = std::min(radius, width);
    }

    // Gradient sampling: the shortest convex combination of nearby gradients is a descent
    // direction at kinks, where single-direction moves find no decrease.
    const double h = 1e-7 * std::max(1.0, width);
    auto gradient = [&](const Vector& p, double fp, Vector& g) {
        g.resize(n);
        for (int i = 0; i < n; ++i) {
            Vector y = p;
            double sgn = 1.0;
            y[i] += h;
            if (!domain.contains(y, 0.0)) {
                y[i] = p[i] - h;
                sgn = -1.0;
                if (!domain.contains(y, 0.0)) return false;
            }
            ++evals;
            g[i] = sgn * (fn(y) - fp) / h;
        }
        return true;
    };
    auto accept = [&](const Vector& y) {
        if (!domain.contains(y)) return false;
        ++evals;
        const double v = fn(y);
        if (v < best) {
            best = v;
            best_x = y;
            return true;
        }
        return false;
    };
    evals = 0;
    constexpr int kMaxSamplingEvals = 2000;
    double eps = 1e-3 * width;
    while (evals < kMaxSamplingEvals && eps > 1e-9 * std::max(1.0, width)) {
        std::vector<Vector> grads;
        Vector g;
        if (gradient(best_x, best, g)) grads.push_back(g);
        const Vector centre = best_x;
        for (int k = 0; k < 2 * n + 2; ++k) {
            Vector u(n);
            for (int i = 0; i < n; ++i) u[i] = rng.normal();
            const Vector y = domain.clamp(centre + eps * rng.uniform() * u / std::max(u.norm(), 1e-300));
            if (!domain.contains(y, 0.0)) continue;
            ++evals;
            const double fy = fn(y);
            if (fy < best) best = fy, best_x = y;
            if (gradient(y, fy, g)) grads.push_back(g);
        }
        if (grads.empty()) {
            eps *= 0.5;
            continue;
        }
        const Vector d = min_norm_hull(grads);
        const double dn = d.norm();
        if (dn <= 1e-9) {
            eps *= 0.1;
            continue;
        }
        const Vector dir = -d / dn;
        bool moved = false;
        for (double t = 4.0 * eps; t >= 0.03 * eps && !moved; t *= 0.5) moved = accept(domain.clamp(best_x + t * dir));
        if (moved)
            for (double t = 8.0 * eps; t <= width && accept(domain.clamp(best_x + t * dir)); t *= 2.0) {}
        else
            eps *= 0.25;
    }
    return best;
}

std::optional<double> structural_lower_bound(const ConvexExpr& expr) {
    using R = std::optional<double>;
    return std::visit(
        [](const auto& n) -> R {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, node::Affine>) {
                if (n.a.size() == 0 || n.a.cwiseAbs().maxCoeff() == 0.0) return n.c;
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, node::Sum>) {
                double total = 0.0;
                for (const auto& c : n.children) {
                    const R b = structural_lower_bound(c);
                    if (!b) return std::nullopt;
                    total += *b;
                }
                return total;
            } else if constexpr (std::is_same_v<T, node::NonnegScale>) {
                const R b = structural_lower_bound(n.child);
                if (!b) return std::nullopt;
                return n.c * *b;
            } else if constexpr (std::is_same_v<T, node::MaxOf>) {
                R best;
                for (const auto& c : n.children) {
                    const R b = structural_lower_bound(c);
                    if (b && (!best || *b > *best)) best = b;
                }
                return best;
            } else if constexpr (std::is_same_v<T, node::SquareOfNonneg>) {
                const double lb = std::max(0.0, n.lower_bound);
                return lb * lb;
            } else if constexpr (std::is_same_v<T, node::Norm2Affine> || std::is_same_v<T, node::PolyhedralDistance>) {
                return 0.0;
            } else {
                return std::nullopt;
            }
        },
        expr.node().data);
}

std::size_t node_count(const ConvexExpr& expr) {
    std::unordered_set<const Node*> seen;
    std::vector<const ConvexExpr*> stack{&expr};
    auto push_all = [&](const std::vector<ConvexExpr>& xs) {
        for (const auto& c : xs) stack.push_back(&c);
    };
    while (!stack.empty()) {
        const ConvexExpr* e = stack.back();
        stack.pop_back();
        if (!seen.insert(&e->node()).second) continue;
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, node::Sum> || std::is_same_v<T, node::MaxOf>) push_all(n.children);
                else if constexpr (std::is_same_v<T, node::NonnegScale> || std::is_same_v<T, node::SquareOfNonneg>)
                    stack.push_back(&n.child);
                else if constexpr (std::is_same_v<T, node::CvarEnvelope> || std::is_same_v<T, node::NegOceEnvelope>) {
                    push_all(n.p);
                    push_all(n.q);
                } else if constexpr (std::is_same_v<T, node::DcNorm>) {
                    push_all(n.g);
                    push_all(n.h);
                } else if constexpr (std::is_same_v<T, node::NegLogShift>) {
                    stack.push_back(&n.g);
                    stack.push_back(&n.h);
                } else if constexpr (std::is_same_v<T, node::IncrConvexComposite> ||
                                     std::is_same_v<T, node::AffinePrecompose>)
                    stack.push_back(&n.inner);
            },
            e->node().data);
    }
    return seen.size();
}

} // namespace dcforge

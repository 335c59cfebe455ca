#include "dcforge/polyhedral.hpp"

#include "dcforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dcforge {

Polyhedron::Polyhedron(Matrix a, Vector rhs, std::vector<int> equalities)
    : A(std::move(a)), b(std::move(rhs)), eq_rows(std::move(equalities)) {
    if (A.rows() != b.size())
        throw ArgumentError("polyhedron: A has " + std::to_string(A.rows()) + " rows but b has " +
                            std::to_string(b.size()) + " entries");
    std::sort(eq_rows.begin(), eq_rows.end());
    eq_rows.erase(std::unique(eq_rows.begin(), eq_rows.end()), eq_rows.end());
    for (int r : eq_rows)
        if (r < 0 || r >= A.rows()) throw ArgumentError("polyhedron: equality row index out of range");
}

Polyhedron Polyhedron::from_geq(const Matrix& d, const Vector& rhs) { return Polyhedron(-d, -rhs); }

Polyhedron Polyhedron::box(const Vector& lo, const Vector& hi) {
    const auto n = lo.size();
    std::vector<std::pair<Vector, double>> rows;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::isfinite(hi[i])) {
            Vector r = Vector::Zero(n);
            r[i] = 1.0;
            rows.emplace_back(r, hi[i]);
        }
        if (std::isfinite(lo[i])) {
            Vector r = Vector::Zero(n);
            r[i] = -1.0;
            rows.emplace_back(r, -lo[i]);
        }
    }
    Matrix a(static_cast<Eigen::Index>(rows.size()), n);
    Vector b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        a.row(static_cast<Eigen::Index>(k)) = rows[k].first.transpose();
        b[static_cast<Eigen::Index>(k)] = rows[k].second;
    }
    return Polyhedron(a, b);
}

Polyhedron Polyhedron::whole_space(int n) { return Polyhedron(Matrix(0, n), Vector(0)); }

bool Polyhedron::is_equality(int row) const { return std::binary_search(eq_rows.begin(), eq_rows.end(), row); }

std::vector<int> Polyhedron::inequality_rows() const {
    std::vector<int> out;
    for (int r = 0; r < rows(); ++r)
        if (!is_equality(r)) out.push_back(r);
    return out;
}

double row_tolerance(const Polyhedron& p, int row) { return 1e-9 * std::max(1.0, std::abs(p.b[row])); }

bool Polyhedron::contains(const Vector& x, double tol) const {
    if (x.size() != A.cols()) return false;
    for (int r = 0; r < rows(); ++r) {
        const double lhs = A.row(r).dot(x) - b[r];
        const double t = tol * std::max(1.0, std::abs(b[r]));
        if (is_equality(r) ? std::abs(lhs) > t : lhs > t) return false;
    }
    return true;
}

double Polyhedron::violation(const Vector& x) const {
    double worst = 0.0;
    for (int r = 0; r < rows(); ++r) {
        const double lhs = A.row(r).dot(x) - b[r];
        worst = std::max(worst, is_equality(r) ? std::abs(lhs) : lhs);
    }
    return worst;
}

Polyhedron Polyhedron::intersect(const Polyhedron& other) const {
    if (other.dim() != dim()) throw ArgumentError("polyhedron intersection: dimension mismatch");
    Matrix a(rows() + other.rows(), dim());
    a << A, other.A;
    Vector rhs(rows() + other.rows());
    rhs << b, other.b;
    std::vector<int> eq = eq_rows;
    for (int r : other.eq_rows) eq.push_back(r + rows());
    return Polyhedron(a, rhs, eq);
}

bool Polyhedron::operator==(const Polyhedron& o) const {
    return A.rows() == o.A.rows() && A.cols() == o.A.cols() && A == o.A && b == o.b && eq_rows == o.eq_rows;
}

namespace {

bool feasible_point(const Polyhedron& p, const Vector& x) {
    for (int r = 0; r < p.rows(); ++r) {
        const double lhs = p.A.row(r).dot(x) - p.b[r];
        const double t = row_tolerance(p, r);
        if (p.is_equality(r) ? std::abs(lhs) > t : lhs > t) return false;
    }
    return true;
}

// Greedy maximal linearly independent subset of the given rows.
std::vector<int> independent_subset(const Matrix& a, const std::vector<int>& rows) {
    std::vector<int> kept;
    int rank = 0;
    for (int r : rows) {
        std::vector<int> trial = kept;
        trial.push_back(r);
        const int rk = numerical_rank(select_rows(a, trial));
        if (rk > rank) {
            kept = std::move(trial);
            rank = rk;
        }
    }
    return kept;
}

bool lex_less(const Vector& a, const Vector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i] - 1e-12) return true;
        if (a[i] > b[i] + 1e-12) return false;
    }
    return false;
}

void push_unique(std::vector<Vector>& out, const Vector& v, double tol) {
    for (const auto& w : out)
        if ((w - v).norm() < tol) return;
    out.push_back(v);
}

void check_scale(const Polyhedron& p, const EnumLimits& limits, const char* what) {
    if (p.dim() > limits.max_dim || p.rows() > limits.max_rows)
        throw ScaleError(std::string(what) + ": dimension " + std::to_string(p.dim()) + " / rows " +
                         std::to_string(p.rows()) + " exceed the enumeration caps (" +
                         std::to_string(limits.max_dim) + ", " + std::to_string(limits.max_rows) + ")");
}

Polyhedron with_extra_equalities(const Polyhedron& p, const Matrix& rows_t) {
    // rows_t: n x r, appended as rows_t^T x = 0
    Matrix a(p.rows() + rows_t.cols(), p.dim());
    a << p.A, rows_t.transpose();
    Vector rhs(p.rows() + rows_t.cols());
    rhs << p.b, Vector::Zero(rows_t.cols());
    std::vector<int> eq = p.eq_rows;
    for (Eigen::Index j = 0; j < rows_t.cols(); ++j) eq.push_back(p.rows() + static_cast<int>(j));
    return Polyhedron(a, rhs, eq);
}

} // namespace

VertexList enumerate_vertices(const Polyhedron& p, const EnumLimits& limits) {
    check_scale(p, limits, "enumerate_vertices");
    VertexList out;
    const int n = p.dim();
    const Matrix lineality = null_space(p.A);
    if (lineality.cols() > 0) {
        out.status = is_feasible(p) ? VertexStatus::no_vertices : VertexStatus::empty;
        return out;
    }
    const std::vector<int> eq = independent_subset(p.A, p.eq_rows);
    const std::vector<int> ineq = p.inequality_rows();
    const int free_rows = n - static_cast<int>(eq.size());
    if (free_rows < 0 || free_rows > static_cast<int>(ineq.size())) {
        out.status = VertexStatus::empty;
        return out;
    }
    if (binomial(ineq.size(), static_cast<std::size_t>(free_rows)) > limits.max_bases)
        throw ScaleError("enumerate_vertices: too many candidate bases");

    std::vector<int> basis(eq);
    basis.resize(static_cast<std::size_t>(n));
    for_each_combination(static_cast<int>(ineq.size()), free_rows, [&](const std::vector<int>& pick) {
        for (int i = 0; i < free_rows; ++i) basis[eq.size() + static_cast<std::size_t>(i)] = ineq[pick[i]];
        Eigen::FullPivLU<Matrix> lu(select_rows(p.A, basis));
        lu.setThreshold(kRankTol);
        if (!lu.isInvertible()) return true;
        const Vector x = lu.solve(select_rows(p.b, basis));
        if (feasible_point(p, x)) push_unique(out.points, x, 1e-8);
        return true;
    });
    std::sort(out.points.begin(), out.points.end(), lex_less);
    out.status = out.points.empty() ? VertexStatus::empty : VertexStatus::ok;
    return out;
}

VertexList enumerate_vertices_standard(const Matrix& a, const Vector& b, std::size_t max_bases) {
    VertexList out;
    const auto ncols = static_cast<int>(a.cols());
    std::vector<int> all_rows(static_cast<std::size_t>(a.rows()));
    for (int i = 0; i < a.rows(); ++i) all_rows[static_cast<std::size_t>(i)] = i;
    const std::vector<int> rows = independent_subset(a, all_rows);
    const int r = static_cast<int>(rows.size());
    if (binomial(static_cast<std::size_t>(ncols), static_cast<std::size_t>(r)) > max_bases)
        throw ScaleError("enumerate_vertices_standard: too many candidate bases");
    const Matrix ar = select_rows(a, rows);
    const Vector br = select_rows(b, rows);
    for_each_combination(ncols, r, [&](const std::vector<int>& cols) {
        Matrix basis(r, r);
        for (int j = 0; j < r; ++j) basis.col(j) = ar.col(cols[static_cast<std::size_t>(j)]);
        Eigen::FullPivLU<Matrix> lu(basis);
        lu.setThreshold(kRankTol);
        if (!lu.isInvertible()) return true;
        const Vector xb = lu.solve(br);
        for (Eigen::Index j = 0; j < xb.size(); ++j)
            if (xb[j] < -1e-9 * std::max(1.0, xb.cwiseAbs().maxCoeff())) return true;
        Vector x = Vector::Zero(ncols);
        for (int j = 0; j < r; ++j) x[cols[static_cast<std::size_t>(j)]] = std::max(0.0, xb[j]);
        if ((a * x - b).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff())) return true;
        push_unique(out.points, x, 1e-8);
        return true;
    });
    std::sort(out.points.begin(), out.points.end(), lex_less);
    out.status = out.points.empty() ? VertexStatus::empty : VertexStatus::ok;
    return out;
}

RayList enumerate_extreme_rays(const Polyhedron& cone, const EnumLimits& limits) {
    check_scale(cone, limits, "enumerate_extreme_rays");
    if (cone.b.size() > 0 && cone.b.cwiseAbs().maxCoeff() != 0.0)
        throw ArgumentError("enumerate_extreme_rays: cone must be homogeneous (b = 0)");
    RayList out;
    const int n = cone.dim();
    out.lineality = null_space(cone.A);
    const Polyhedron pointed = out.lineality.cols() > 0 ? with_extra_equalities(cone, out.lineality) : cone;
    const std::vector<int> eq = independent_subset(pointed.A, pointed.eq_rows);
    const std::vector<int> ineq = pointed.inequality_rows();
    const int free_rows = n - 1 - static_cast<int>(eq.size());
    if (free_rows < 0 || free_rows > static_cast<int>(ineq.size())) return out;
    if (binomial(ineq.size(), static_cast<std::size_t>(free_rows)) > limits.max_bases)
        throw ScaleError("enumerate_extreme_rays: too many candidate faces");

    std::vector<int> active(eq);
    active.resize(static_cast<std::size_t>(n - 1));
    for_each_combination(static_cast<int>(ineq.size()), free_rows, [&](const std::vector<int>& pick) {
        for (int i = 0; i < free_rows; ++i) active[eq.size() + static_cast<std::size_t>(i)] = ineq[pick[i]];
        const Matrix sub = active.empty() ? Matrix(0, n) : select_rows(pointed.A, active);
        const Matrix ns = null_space(sub);
        if (ns.cols() != 1) return true;
        for (double sign : {1.0, -1.0}) {
            Vector d = sign * ns.col(0);
            bool ok = true;
            for (int r : ineq)
                if (pointed.A.row(r).dot(d) > 1e-9 * std::max(1.0, pointed.A.row(r).norm())) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            d /= d.cwiseAbs().maxCoeff();
            for (Eigen::Index i = 0; i < d.size(); ++i)
                if (std::abs(d[i]) < 1e-14) d[i] = 0.0;
            push_unique(out.rays, d, 1e-8);
        }
        return true;
    });
    // Canonical order: lexicographically descending, so unit vectors appear as e1, e2, ...
    std::sort(out.rays.begin(), out.rays.end(), [](const Vector& a, const Vector& b) { return lex_less(b, a); });
    return out;
}

std::vector<Vector> cone_generators(const Polyhedron& cone, const EnumLimits& limits) {
    RayList rl = enumerate_extreme_rays(cone, limits);
    std::vector<Vector> gens = rl.rays;
    for (Eigen::Index j = 0; j < rl.lineality.cols(); ++j) {
        Vector d = rl.lineality.col(j);
        d /= d.cwiseAbs().maxCoeff();
        gens.push_back(d);
        gens.push_back(-d);
    }
    return gens;
}

LpResult lp_solve(const Vector& c, const Polyhedron& p, Sense sense, const EnumLimits& limits) {
    check_scale(p, limits, "lp_solve");
    if (c.size() != p.dim()) throw ArgumentError("lp_solve: objective dimension mismatch");
    const int n = p.dim();
    const Vector cc = sense == Sense::minimize ? c : Vector(-c);
    LpResult res;

    const Matrix lineality = null_space(p.A);
    Polyhedron q = p;
    if (lineality.cols() > 0) {
        const Vector along = lineality.transpose() * cc;
        q = with_extra_equalities(p, lineality);
        if (along.norm() > 1e-9 * std::max(1.0, cc.norm())) {
            const LpResult feas = lp_solve(Vector::Zero(n), q, Sense::minimize, limits);
            if (feas.status == LpStatus::infeasible) return res;
            res.status = LpStatus::unbounded;
            res.point = feas.point;
            res.value = sense == Sense::minimize ? -std::numeric_limits<double>::infinity()
                                                 : std::numeric_limits<double>::infinity();
            return res;
        }
    }

    const std::vector<int> eq = independent_subset(q.A, q.eq_rows);
    const std::vector<int> ineq = q.inequality_rows();
    const int free_rows = n - static_cast<int>(eq.size());
    if (free_rows < 0 || free_rows > static_cast<int>(ineq.size())) return res;
    if (binomial(ineq.size(), static_cast<std::size_t>(free_rows)) > limits.max_bases)
        throw ScaleError("lp_solve: too many candidate bases");

    bool any_feasible = false;
    double best = std::numeric_limits<double>::infinity();
    Vector best_point;
    bool have_opt = false;
    double opt_val = std::numeric_limits<double>::infinity();
    Vector opt_point, opt_dual;
    const double ctol = 1e-9 * std::max(1.0, cc.cwiseAbs().maxCoeff());

    std::vector<int> basis(eq);
    basis.resize(static_cast<std::size_t>(n));
    for_each_combination(static_cast<int>(ineq.size()), free_rows, [&](const std::vector<int>& pick) {
        for (int i = 0; i < free_rows; ++i) basis[eq.size() + static_cast<std::size_t>(i)] = ineq[pick[i]];
        const Matrix ab = select_rows(q.A, basis);
        Eigen::FullPivLU<Matrix> lu(ab);
        lu.setThreshold(kRankTol);
        if (!lu.isInvertible()) return true;
        const Vector x = lu.solve(select_rows(q.b, basis));
        if (!feasible_point(q, x)) return true;
        any_feasible = true;
        const double val = cc.dot(x);
        if (val < best) {
            best = val;
            best_point = x;
        }
        Eigen::FullPivLU<Matrix> lut(ab.transpose());
        const Vector yb = lut.solve(-cc);
        for (int i = static_cast<int>(eq.size()); i < n; ++i)
            if (yb[i] < -ctol * std::max(1.0, yb.cwiseAbs().maxCoeff())) return true;
        if (!have_opt || val < opt_val) {
            have_opt = true;
            opt_val = val;
            opt_point = x;
            opt_dual = Vector::Zero(q.rows());
            for (int i = 0; i < n; ++i) opt_dual[basis[static_cast<std::size_t>(i)]] = yb[i];
        }
        return true;
    });

    if (!any_feasible) return res;
    if (!have_opt) {
        // No dual-feasible basis: either unbounded or a numerically degenerate optimum.
        Polyhedron rec(q.A, Vector::Zero(q.rows()), q.eq_rows);
        for (const Vector& d : cone_generators(rec, limits)) {
            if (cc.dot(d) < -ctol) {
                res.status = LpStatus::unbounded;
                res.point = best_point;
                res.value = sense == Sense::minimize ? -std::numeric_limits<double>::infinity()
                                                     : std::numeric_limits<double>::infinity();
                return res;
            }
        }
        opt_point = best_point;
        opt_val = best;
        std::vector<int> act;
        for (int r = 0; r < q.rows(); ++r)
            if (q.is_equality(r) || std::abs(q.A.row(r).dot(best_point) - q.b[r]) <= 1e-8 * std::max(1.0, std::abs(q.b[r])))
                act.push_back(r);
        const Matrix aa = select_rows(q.A, act);
        const Vector ya = aa.transpose().completeOrthogonalDecomposition().solve(-cc);
        opt_dual = Vector::Zero(q.rows());
        for (std::size_t i = 0; i < act.size(); ++i) opt_dual[act[i]] = q.is_equality(act[i]) ? ya[static_cast<Eigen::Index>(i)] : std::max(0.0, ya[static_cast<Eigen::Index>(i)]);
    }
    res.status = LpStatus::optimal;
    res.point = opt_point;
    res.value = sense == Sense::minimize ? opt_val : -opt_val;
    res.dual = opt_dual.head(p.rows());
    return res;
}

bool is_feasible(const Polyhedron& p) {
    return lp_solve(Vector::Zero(p.dim()), p).status != LpStatus::infeasible;
}

Vector project(const Vector& x, const Polyhedron& p) {
    if (x.size() != p.dim()) throw ArgumentError("project: dimension mismatch");
    if (p.contains(x, 1e-12)) return x;
    const int n = p.dim();
    const std::vector<int> eq = independent_subset(p.A, p.eq_rows);
    const std::vector<int> ineq = p.inequality_rows();
    const int max_extra = std::min(static_cast<int>(ineq.size()), n - static_cast<int>(eq.size()));
    Vector found;
    bool done = false;
    for (int s = 0; s <= max_extra && !done; ++s) {
        std::vector<int> active(eq);
        active.resize(eq.size() + static_cast<std::size_t>(s));
        for_each_combination(static_cast<int>(ineq.size()), s, [&](const std::vector<int>& pick) {
            for (int i = 0; i < s; ++i) active[eq.size() + static_cast<std::size_t>(i)] = ineq[pick[i]];
            const Matrix as = select_rows(p.A, active);
            const Matrix g = as * as.transpose();
            Eigen::FullPivLU<Matrix> lu(g);
            lu.setThreshold(kRankTol);
            if (!lu.isInvertible()) return true;
            const Vector lambda = lu.solve(as * x - select_rows(p.b, active));
            for (int i = static_cast<int>(eq.size()); i < static_cast<int>(active.size()); ++i)
                if (lambda[i] < -1e-10 * std::max(1.0, lambda.cwiseAbs().maxCoeff())) return true;
            const Vector y = x - as.transpose() * lambda;
            if (!p.contains(y, 1e-9)) return true;
            found = y;
            done = true;
            return false;
        });
    }
    if (!done) {
        if (!is_feasible(p)) throw EmptyPolyhedron("project: polyhedron is empty");
        throw Error("project: active-set enumeration found no KKT point");
    }
    return found;
}

double distance(const Vector& x, const Polyhedron& p) { return (x - project(x, p)).norm(); }

} // namespace dcforge

#include "dcforge/qp_value.hpp"

#include "dcforge/errors.hpp"
#include "dcforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace dcforge {

namespace {

std::vector<std::vector<int>> all_subsets(int k) {
    std::vector<std::vector<int>> out;
    for (int r = 0; r <= k; ++r)
        for_each_combination(k, r, [&](const std::vector<int>& s) {
            out.push_back(s);
            return true;
        });
    return out;
}

std::vector<int> complement(const std::vector<int>& I, int k) {
    std::vector<int> J;
    for (int j = 0, p = 0; j < k; ++j) {
        if (p < static_cast<int>(I.size()) && I[p] == j) ++p;
        else J.push_back(j);
    }
    return J;
}

std::string subset_string(const std::vector<int>& I) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < I.size(); ++i) os << (i ? "," : "") << I[i] + 1;
    os << "}";
    return os.str();
}

/// [Q  -D_I'; D_I  0]
Matrix kkt_matrix(const Matrix& Q, const Matrix& D, const std::vector<int>& I) {
    const int m = static_cast<int>(Q.rows()), s = static_cast<int>(I.size());
    Matrix K = Matrix::Zero(m + s, m + s);
    const Matrix DI = select_rows(D, I);
    K.topLeftCorner(m, m) = Q;
    K.topRightCorner(m, s) = -DI.transpose();
    K.bottomLeftCorner(s, m) = DI;
    return K;
}

double scale_of(const Vector& q, const Vector& b) {
    double s = 1.0;
    if (q.size()) s = std::max(s, q.cwiseAbs().maxCoeff());
    if (b.size()) s = std::max(s, b.cwiseAbs().maxCoeff());
    return s;
}

} // namespace

// ---------------------------------------------------------------------------
// Copositivity

CopositivityVerdict check_copositive(const Matrix& Q, const Matrix& D, std::uint64_t seed) {
    const int m = static_cast<int>(Q.rows());
    if (m > kMaxQpVars) throw ScaleError("check_copositive: too many variables");
    if (Q.cols() != m || D.cols() != m) throw ArgumentError("check_copositive: inconsistent dimensions");
    CopositivityVerdict verdict;
    const std::vector<Vector> gens =
        cone_generators(Polyhedron(-D, Vector::Zero(D.rows())), kInternalLimits);
    for (const Vector& v : gens) {
        if (v.dot(Q * v) < -1e-9 * v.squaredNorm()) {
            verdict.ray_pass = false;
            verdict.witness = v;
            return verdict;
        }
    }
    if (gens.empty()) return verdict;
    Rng rng(seed);
    const int L = static_cast<int>(gens.size());
    for (int t = 0; t < 10000; ++t) {
        Vector v = Vector::Zero(m);
        // Alternate dense combinations with sparse ones that probe the faces.
        const bool sparse = (t % 2) == 1;
        for (int l = 0; l < L; ++l) {
            if (sparse && rng.uniform() < 0.5) continue;
            const double w = rng.uniform();
            v += w * w * gens[l];
        }
        const double nv = v.squaredNorm();
        if (nv == 0.0) continue;
        if (v.dot(Q * v) < -1e-9 * nv) {
            verdict.sampled_pass = false;
            verdict.witness = v / v.cwiseAbs().maxCoeff();
            return verdict;
        }
    }
    return verdict;
}

// ---------------------------------------------------------------------------
// Instance

QpInstance::QpInstance(Matrix Q, Matrix D, std::uint64_t seed) : Q_(std::move(Q)), D_(std::move(D)) {
    const int m = static_cast<int>(Q_.rows());
    if (m == 0 || Q_.cols() != m) throw ArgumentError("qp: Q must be square and nonempty");
    if (D_.cols() != m) throw ArgumentError("qp: D must have as many columns as Q");
    if (m > kMaxQpVars || D_.rows() > kMaxQpRows) throw ScaleError("qp: instance exceeds the enumeration caps");
    if ((Q_ - Q_.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ArgumentError("qp: Q must be symmetric");
    Q_ = 0.5 * (Q_ + Q_.transpose());
    verdict_ = check_copositive(Q_, D_, seed);
    rec_ = cone_generators(Polyhedron(-D_, Vector::Zero(k())), kInternalLimits);

    const int kk = k();
    for (const auto& I : all_subsets(kk)) {
        const int s = static_cast<int>(I.size());
        const std::vector<int> J = complement(I, kk);
        const Matrix DI = select_rows(D_, I), DJ = select_rows(D_, J);
        const int n = m + s;
        Matrix A = Matrix::Zero(m + s + s + static_cast<int>(J.size()), n);
        A.block(0, 0, m, m) = Q_;
        A.block(0, m, m, s) = -DI.transpose();
        A.block(m, 0, s, m) = DI;
        A.block(m + s, m, s, s) = -Matrix::Identity(s, s);
        A.block(m + 2 * s, 0, J.size(), m) = -DJ;
        std::vector<int> eq(m + s);
        for (int i = 0; i < m + s; ++i) eq[i] = i;
        const Polyhedron cone(A, Vector::Zero(A.rows()), eq);
        for (const Vector& gen : cone_generators(cone, kInternalLimits)) {
            Vector v = gen.head(m);
            const double nv = v.cwiseAbs().maxCoeff();
            if (nv <= 1e-9) continue;
            v /= nv;
            const bool seen = std::any_of(cert_.generators.begin(), cert_.generators.end(),
                                          [&](const DomGenerator& g) { return (g.v - v).norm() < 1e-8; });
            if (seen) continue;
            DomGenerator g{I, v, {}};
            const VertexList mu = enumerate_vertices_standard(D_.transpose(), Q_ * v);
            if (mu.status == VertexStatus::ok) g.mu = mu.points;
            cert_.generators.push_back(std::move(g));
        }
    }
}

Vector QpInstance::param(const Vector& q, const Vector& b) {
    Vector y(q.size() + b.size());
    y << q, b;
    return y;
}

// ---------------------------------------------------------------------------
// Domain test

namespace {

void check_inputs(const QpInstance& inst, const Vector& q, const Vector& b) {
    if (q.size() != inst.m() || b.size() != inst.k()) throw ArgumentError("qp: (q, b) has the wrong dimension");
}

} // namespace

bool dom_membership(const QpInstance& inst, const Vector& q, const Vector& b) {
    check_inputs(inst, q, b);
    if (!inst.verdict().pass()) throw FailedCopositivity("dom_membership: Q is not copositive on the recession cone");
    const Polyhedron P = Polyhedron::from_geq(inst.D(), b);
    if (!is_feasible(P)) return false;
    for (const auto& g : inst.certificate().generators) {
        const LpResult r = lp_solve(inst.Q() * g.v, P, Sense::minimize);
        if (r.status != LpStatus::optimal) return false;
        if (r.value + q.dot(g.v) < -1e-8) return false;
    }
    return true;
}

bool dom_membership_dual(const QpInstance& inst, const Vector& q, const Vector& b) {
    check_inputs(inst, q, b);
    if (!inst.verdict().pass()) throw FailedCopositivity("dom_membership: Q is not copositive on the recession cone");
    if (!is_feasible(Polyhedron::from_geq(inst.D(), b))) return false;
    for (const auto& g : inst.certificate().generators) {
        double best = -std::numeric_limits<double>::infinity();
        for (const Vector& mu : g.mu) best = std::max(best, q.dot(g.v) + b.dot(mu));
        if (best < -1e-8) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Solving

namespace {

struct Candidate {
    QpFace face;
    double value;
};

std::vector<Candidate> kkt_points(const QpInstance& inst, const Vector& q, const Vector& b) {
    const int m = inst.m(), k = inst.k();
    const double tol = 1e-9 * scale_of(q, b);
    std::vector<Candidate> out;
    for (const auto& I : all_subsets(k)) {
        const int s = static_cast<int>(I.size());
        const std::vector<int> J = complement(I, k);
        const Matrix K = kkt_matrix(inst.Q(), inst.D(), I);
        Vector rhs(m + s);
        rhs << -q, select_rows(b, I);
        const Matrix DJ = select_rows(inst.D(), J);
        const Vector bJ = select_rows(b, J);

        Eigen::FullPivLU<Matrix> lu(K);
        lu.setThreshold(kRankTol);
        if (lu.isInvertible()) {
            const Vector w = lu.solve(rhs);
            const Vector z = w.head(m), eta = w.tail(s);
            if (s > 0 && eta.minCoeff() < -tol) continue;
            if (!J.empty() && (DJ * z - bJ).minCoeff() < -tol) continue;
            out.push_back({{I, z, eta}, inst.objective(q, z)});
            continue;
        }
        // Singular system: search the solution family for a point meeting the sign conditions.
        const int n = m + s;
        Matrix A(n + s + static_cast<int>(J.size()), n);
        Vector rb(A.rows());
        A.topRows(n) = K;
        rb.head(n) = rhs;
        A.block(n, 0, s, n).setZero();
        A.block(n, m, s, s) = -Matrix::Identity(s, s);
        rb.segment(n, s).setZero();
        A.bottomRows(J.size()).setZero();
        A.block(n + s, 0, J.size(), m) = -DJ;
        rb.tail(J.size()) = -bJ;
        std::vector<int> eq(n);
        for (int i = 0; i < n; ++i) eq[i] = i;
        const Polyhedron face(A, rb, eq);
        const LpResult r = lp_solve(Vector::Zero(n), face, Sense::minimize);
        if (r.status == LpStatus::infeasible) continue;
        const Vector z = r.point.head(m);
        out.push_back({{I, z, r.point.tail(s)}, inst.objective(q, z)});
        // The objective should be constant on the face; probe it and keep every point found.
        Rng rng(0x5eedULL + static_cast<std::uint64_t>(out.size()));
        for (int t = 0; t < 10; ++t) {
            Vector c(n);
            for (int i = 0; i < n; ++i) c[i] = rng.normal();
            const LpResult rr = lp_solve(c, face, Sense::minimize);
            if (rr.status != LpStatus::optimal) continue;
            const Vector zz = rr.point.head(m);
            const double v = inst.objective(q, zz);
            if (std::abs(v - out.back().value) > 1e-7 * (1.0 + std::abs(v)))
                out.push_back({{I, zz, rr.point.tail(s)}, v});
        }
    }
    return out;
}

QpSolution solve_stationary(const QpInstance& inst, const Vector& q, const Vector& b) {
    const std::vector<Candidate> cands = kkt_points(inst, q, b);
    if (cands.empty()) throw Error("qp_solve: no stationary point found");
    QpSolution sol;
    sol.value = std::numeric_limits<double>::infinity();
    for (const auto& c : cands) sol.value = std::min(sol.value, c.value);
    for (const auto& c : cands) {
        if (c.value > sol.value + 1e-7 * (1.0 + std::abs(sol.value))) continue;
        const bool dup = std::any_of(sol.faces.begin(), sol.faces.end(),
                                     [&](const QpFace& f) { return f.active == c.face.active; });
        if (!dup) sol.faces.push_back(c.face);
    }
    return sol;
}

} // namespace

QpSolution qp_solve(const QpInstance& inst, const Vector& q, const Vector& b) {
    if (!dom_membership(inst, q, b)) throw NotInDomain("qp_solve: (q, b) lies outside dom(Q, D)");
    return solve_stationary(inst, q, b);
}

double kkt_residual(const QpInstance& inst, const Vector& q, const Vector& b, const QpFace& face) {
    const Matrix DI = select_rows(inst.D(), face.active);
    double r = (q + inst.Q() * face.z - DI.transpose() * face.eta).cwiseAbs().maxCoeff();
    if (inst.k() > 0) r = std::max(r, (b - inst.D() * face.z).cwiseMax(0.0).maxCoeff());
    if (face.eta.size() > 0) {
        r = std::max(r, (-face.eta).cwiseMax(0.0).maxCoeff());
        r = std::max(r, (DI * face.z - select_rows(b, face.active)).cwiseAbs().maxCoeff());
    }
    return r;
}

bool find_unbounded_ray(const QpInstance& inst, const Vector& q, const Vector& b, double threshold) {
    check_inputs(inst, q, b);
    const LpResult feas = lp_solve(Vector::Zero(inst.m()), Polyhedron::from_geq(inst.D(), b), Sense::minimize);
    if (feas.status == LpStatus::infeasible) return false;
    const Vector z0 = feas.point;
    std::vector<Vector> dirs = inst.recession_generators();
    for (const auto& g : inst.certificate().generators) dirs.push_back(g.v);
    std::vector<Vector> firsts{Vector::Zero(inst.m())};
    firsts.insert(firsts.end(), dirs.begin(), dirs.end());
    for (const Vector& v : dirs)
        for (const Vector& g : firsts)
            for (int e = 0; e <= 8; ++e) {
                const double s = std::pow(10.0, e);
                if (inst.objective(q, z0 + s * v + s * g) <= threshold) return true;
                if (inst.objective(q, z0 + s * s * v + s * g) <= threshold) return true;
            }
    return false;
}

// ---------------------------------------------------------------------------
// Pieces

namespace {

bool full_dimensional(const Polyhedron& p) {
    if (p.rows() == 0) return true;
    const int n = p.dim();
    Matrix A(p.rows() + 1, n + 1);
    Vector b(p.rows() + 1);
    for (int i = 0; i < p.rows(); ++i) {
        A.row(i).head(n) = p.A.row(i);
        A(i, n) = p.A.row(i).norm();
        b[i] = p.b[i];
    }
    A.row(p.rows()).setZero();
    A(p.rows(), n) = 1.0;
    b[p.rows()] = 1.0;
    Vector c = Vector::Zero(n + 1);
    c[n] = 1.0;
    const LpResult r = lp_solve(c, Polyhedron(A, b), Sense::maximize);
    return r.status == LpStatus::optimal && r.value > 1e-9;
}

} // namespace

std::vector<KktPiece> enumerate_pieces(const QpInstance& inst, const Domain& region) {
    const int m = inst.m(), k = inst.k(), n = m + k;
    if (region.dim() != n) throw DomainError("enumerate_pieces: region must live in (q, b)-space");
    std::vector<KktPiece> out;
    for (const auto& I : all_subsets(k)) {
        const int s = static_cast<int>(I.size());
        const Matrix K = kkt_matrix(inst.Q(), inst.D(), I);
        Eigen::FullPivLU<Matrix> lu(K);
        lu.setThreshold(kRankTol);
        if (!lu.isInvertible()) continue;
        Matrix S = Matrix::Zero(m + s, n);
        S.topLeftCorner(m, m) = -Matrix::Identity(m, m);
        for (int i = 0; i < s; ++i) S(m + i, m + I[i]) = 1.0;
        const Matrix W = lu.solve(S);
        KktPiece piece;
        piece.active = I;
        piece.Mz = W.topRows(m);
        piece.Meta = W.bottomRows(s);
        const std::vector<int> J = complement(I, k);
        Matrix A(k, n);
        A.topRows(s) = -piece.Meta;
        for (std::size_t j = 0; j < J.size(); ++j) {
            Vector row = inst.D().row(J[j]) * piece.Mz;
            row[m + J[j]] -= 1.0;
            A.row(s + static_cast<int>(j)) = -row.transpose();
        }
        piece.validity = Polyhedron(A, Vector::Zero(k));
        if (!full_dimensional(piece.validity)) continue;
        if (!is_feasible(piece.validity.intersect(region.as_polyhedron()))) continue;
        Matrix Eq = Matrix::Zero(m, n);
        Eq.leftCols(m) = Matrix::Identity(m, m);
        Matrix H = Eq.transpose() * piece.Mz + piece.Mz.transpose() * Eq + piece.Mz.transpose() * inst.Q() * piece.Mz;
        H = 0.5 * (H + H.transpose());
        piece.value = {H, Vector::Zero(n), 0.0};
        out.push_back(std::move(piece));
    }
    return out;
}

double min_of_pieces(const std::vector<KktPiece>& pieces, const Vector& y, double tol) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces)
        if (p.validity.contains(y, tol)) best = std::min(best, p.value.value(y));
    return best;
}

// ---------------------------------------------------------------------------
// dc assembly

namespace {

std::vector<Vector> probe_points(const Domain& region, std::uint64_t seed, int samples) {
    std::vector<Vector> pts;
    Rng rng(seed);
    for (int i = 0; i < samples; ++i) pts.push_back(region.sample(rng));
    const int n = region.dim();
    if (n <= 10) {
        for (int mask = 0; mask < (1 << n); ++mask) {
            Vector c(n);
            for (int i = 0; i < n; ++i) c[i] = (mask >> i) & 1 ? region.upper()[i] : region.lower()[i];
            if (region.contains(c)) pts.push_back(c);
        }
    }
    return pts;
}

std::string point_string(const Vector& y) {
    std::ostringstream os;
    os.precision(10);
    os << "(";
    for (Eigen::Index i = 0; i < y.size(); ++i) os << (i ? ", " : "") << y[i];
    os << ")";
    return os.str();
}

void require_inside_dom(const QpInstance& inst, const std::vector<Vector>& pts) {
    for (const Vector& y : pts)
        if (!dom_membership(inst, inst.q_of(y), inst.b_of(y)))
            throw RegionNotInDomain("qp: the point " + point_string(y) + " of the region lies outside dom(Q, D)");
}

} // namespace

DcFunction value_dc(const QpInstance& inst, const Domain& region, std::uint64_t seed) {
    if (region.dim() != inst.param_dim()) throw DomainError("value_dc: region must live in (q, b)-space");
    if (!region.bounded()) throw UnboundedDomainError("value_dc: region must be bounded");
    require_inside_dom(inst, probe_points(region, seed, 200));

    const std::vector<KktPiece> pieces = enumerate_pieces(inst, region);
    const Polyhedron rp = region.as_polyhedron();
    std::vector<QuadraticPiece> kept;
    std::vector<Polyhedron> regions;
    Rng rng(seed ^ 0x9151ULL);
    for (const auto& piece : pieces) {
        const Polyhedron S = piece.validity.intersect(rp);
        int optimal = 0, total = 0;
        for (int t = 0; t < 200; ++t) {
            Vector y = region.sample(rng);
            if (!S.contains(y)) y = project(y, S);
            const double v = solve_stationary(inst, inst.q_of(y), inst.b_of(y)).value;
            ++total;
            if (std::abs(v - piece.value.value(y)) <= 1e-7 * (1.0 + std::abs(v))) ++optimal;
        }
        if (optimal == 0) continue; // stationary but never optimal
        if (optimal < total)
            throw PieceNotQuadratic("value_dc: on the validity region of active set " + subset_string(piece.active) +
                                    " the optimal value is not a single quadratic");
        kept.push_back(piece.value);
        regions.push_back(S);
    }
    if (kept.empty()) throw PieceNotQuadratic("value_dc: no quadratic piece attains the optimal value");
    for (int t = 0; t < 200; ++t) {
        const Vector y = region.sample(rng);
        const bool covered = std::any_of(regions.begin(), regions.end(), [&](const Polyhedron& S) { return S.contains(y); });
        if (!covered)
            throw PieceNotQuadratic("value_dc: the point " + point_string(y) +
                                    " is not covered by any nonsingular stationarity piece");
    }
    const PiecewiseLc1 pw(std::move(kept), std::move(regions), region);
    return build_min_representation(pw, seed).theta;
}

DcFunction pd_value_dc(const QpInstance& inst, const Domain& region) {
    if (region.dim() != inst.param_dim()) throw DomainError("pd_value_dc: region must live in (q, b)-space");
    if (smallest_eigenvalue(inst.Q()) < 1e-9) throw NotPositiveDefinite("pd_value_dc: Q is not positive definite");
    const int m = inst.m(), k = inst.k(), n = m + k;
    const Matrix Qinv = inst.Q().ldlt().solve(Matrix::Identity(m, m));
    Matrix H = Matrix::Zero(n, n);
    H.topLeftCorner(m, m) = 0.5 * (Qinv + Qinv.transpose());
    ConvexExpr h = ConvexExpr::quad(H, Vector::Zero(n), 0.0);
    if (k == 0) return DcFunction(ConvexExpr::zero(n), h, region);
    const Matrix& D = inst.D();
    auto held = std::make_shared<const QpInstance>(inst);
    ConvexExpr phi = ConvexExpr::callable(
        k,
        [held, m](const Vector& bp) {
            if (!is_feasible(Polyhedron::from_geq(held->D(), bp)))
                throw NotInDomain("pd_value_dc: the shifted constraint set is empty");
            return solve_stationary(*held, Vector::Zero(m), bp).value;
        },
        "pd_phi");
    Matrix T(k, n);
    T << D * Qinv, Matrix::Identity(k, k);
    return DcFunction(ConvexExpr::affine_precompose(phi, T, Vector::Zero(k)), h, region);
}

DcFunction pd_value_dc(const QpInstance& inst) {
    const double inf = std::numeric_limits<double>::infinity();
    return pd_value_dc(inst, Domain::box(inst.param_dim(), -inf, inf));
}

DcFunction recourse_dc(const QpInstance& inst, const RecourseScenario& sc, const Domain& x_region,
                       std::uint64_t seed) {
    const int m = inst.m(), k = inst.k(), nx = x_region.dim();
    if (sc.f.size() != m || sc.G.rows() != m || sc.G.cols() != nx || sc.C.rows() != k || sc.C.cols() != nx ||
        sc.xi.size() != k)
        throw ArgumentError("recourse_dc: scenario data has inconsistent dimensions");
    if (!x_region.bounded()) throw UnboundedDomainError("recourse_dc: x-region must be bounded");
    Matrix T(m + k, nx);
    T << sc.G, -sc.C;
    Vector t(m + k);
    t << sc.f, sc.xi;

    std::vector<Vector> images;
    for (const Vector& x : probe_points(x_region, seed, 200)) images.push_back(T * x + t);
    require_inside_dom(inst, images);

    DcFunction base = [&]() {
        if (smallest_eigenvalue(inst.Q()) >= 1e-9) return pd_value_dc(inst);
        Vector lo(m + k), hi(m + k);
        for (int r = 0; r < m + k; ++r) {
            lo[r] = hi[r] = t[r];
            for (int j = 0; j < nx; ++j) {
                const double a = T(r, j) * x_region.lower()[j], b = T(r, j) * x_region.upper()[j];
                lo[r] += std::min(a, b);
                hi[r] += std::max(a, b);
            }
        }
        return value_dc(inst, Domain::box(lo, hi), seed);
    }();
    return DcFunction(ConvexExpr::affine_precompose(base.g(), T, t), ConvexExpr::affine_precompose(base.h(), T, t),
                      x_region);
}

} // namespace dcforge

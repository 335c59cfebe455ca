#include "dcforge/io.hpp"

#include "dcforge/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dcforge::io {

namespace {

const Json& field(const Json& j, const char* key, const std::string& ctx) {
    if (!j.is_object()) throw ParseError(ctx + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(ctx + ": missing field '" + key + "'");
    return *it;
}

bool has(const Json& j, const char* key) { return j.is_object() && j.contains(key); }

} // namespace

Json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double to_double(const Json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ParseError(what + ": expected a number");
}

Json vector_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
    return out;
}

Vector vector_from(const Json& j, const std::string& what) {
    if (j.is_number() || j.is_string()) {
        Vector v(1);
        v[0] = to_double(j, what);
        return v;
    }
    if (!j.is_array()) throw ParseError(what + ": expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_double(j[i], what);
    return v;
}

Json matrix_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
    return out;
}

Matrix matrix_from(const Json& j, const std::string& what) {
    if (j.is_number()) {
        Matrix m(1, 1);
        m(0, 0) = j.get<double>();
        return m;
    }
    if (!j.is_array()) throw ParseError(what + ": expected a matrix");
    if (j.empty()) return Matrix(0, 0);
    const std::size_t cols = j[0].is_array() ? j[0].size() : 1;
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Vector row = vector_from(j[i], what);
        if (static_cast<std::size_t>(row.size()) != cols) throw ParseError(what + ": ragged matrix");
        m.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return m;
}

Json polyhedron_json(const Polyhedron& p) {
    Json out;
    out["A"] = matrix_json(p.A);
    out["b"] = vector_json(p.b);
    out["eq_rows"] = p.eq_rows;
    if (p.rows() == 0) out["dim"] = p.dim();
    return out;
}

Polyhedron polyhedron_from(const Json& j) {
    const std::string ctx = "polyhedron";
    Matrix A = matrix_from(field(j, "A", ctx), ctx + ".A");
    Vector b = vector_from(field(j, "b", ctx), ctx + ".b");
    if (A.rows() == 0) {
        if (!has(j, "dim")) throw ParseError(ctx + ": empty A needs 'dim'");
        A = Matrix(0, j["dim"].get<int>());
    }
    std::vector<int> eq;
    if (has(j, "eq_rows")) eq = j["eq_rows"].get<std::vector<int>>();
    if (A.rows() != b.size()) throw ParseError(ctx + ": A and b disagree in rows");
    try {
        return Polyhedron(std::move(A), std::move(b), std::move(eq));
    } catch (const ArgumentError& e) {
        throw ParseError(std::string(ctx) + ": " + e.what());
    }
}

Json domain_json(const Domain& d) {
    Json out;
    if (d.kind() == Domain::Kind::box) {
        out["box"] = {{"lower", vector_json(d.lower())}, {"upper", vector_json(d.upper())}};
    } else {
        out["polyhedron"] = polyhedron_json(d.as_polyhedron());
    }
    return out;
}

Domain domain_from(const Json& j) {
    if (has(j, "box")) {
        const Json& b = j["box"];
        const Vector lo = vector_from(field(b, "lower", "domain.box"), "domain.box.lower");
        const Vector hi = vector_from(field(b, "upper", "domain.box"), "domain.box.upper");
        if (lo.size() != hi.size()) throw ParseError("domain.box: bound sizes differ");
        return Domain::box(lo, hi);
    }
    if (has(j, "polyhedron")) return Domain::polyhedron(polyhedron_from(j["polyhedron"]));
    throw ParseError("domain: expected 'box' or 'polyhedron'");
}

Json expr_json(const ConvexExpr& e) {
    return std::visit(
        [&](const auto& n) -> Json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, node::Affine>) {
                return {{"kind", "affine"}, {"a", vector_json(n.a)}, {"c", number(n.c)}};
            } else if constexpr (std::is_same_v<T, node::Sum> || std::is_same_v<T, node::MaxOf>) {
                Json ch = Json::array();
                for (const auto& c : n.children) ch.push_back(expr_json(c));
                return {{"kind", std::is_same_v<T, node::Sum> ? "sum" : "max"}, {"children", ch}};
            } else if constexpr (std::is_same_v<T, node::NonnegScale>) {
                return {{"kind", "scale"}, {"c", number(n.c)}, {"child", expr_json(n.child)}};
            } else if constexpr (std::is_same_v<T, node::QuadForm>) {
                return {{"kind", "quad"}, {"A", matrix_json(n.A)}, {"a", vector_json(n.a)}, {"c", number(n.c)}};
            } else if constexpr (std::is_same_v<T, node::Norm2Affine>) {
                return {{"kind", "norm2"}, {"M", matrix_json(n.M)}, {"d", vector_json(n.d)}};
            } else if constexpr (std::is_same_v<T, node::SquareOfNonneg>) {
                return {{"kind", "square_nonneg"}, {"child", expr_json(n.child)}, {"lower_bound", number(n.lower_bound)}};
            } else {
                throw ArgumentError("expression kind '" + std::string(e.kind_name()) + "' is not serializable");
            }
        },
        e.node().data);
}

ConvexExpr expr_from(const Json& j) {
    const std::string kind = field(j, "kind", "expression").get<std::string>();
    const std::string ctx = "expression(" + kind + ")";
    auto children = [&](const char* key) {
        const Json& arr = field(j, key, ctx);
        if (!arr.is_array() || arr.empty()) throw ParseError(ctx + ": children must be a nonempty array");
        std::vector<ConvexExpr> out;
        for (const auto& c : arr) out.push_back(expr_from(c));
        for (const auto& c : out)
            if (c.dim() != out.front().dim()) throw ParseError(ctx + ": children differ in dimension");
        return out;
    };
    try {
        if (kind == "affine") return ConvexExpr::affine(vector_from(field(j, "a", ctx), ctx), to_double(field(j, "c", ctx), ctx));
        if (kind == "sum") return ConvexExpr::sum(children("children"));
        if (kind == "max") return ConvexExpr::max_of(children("children"));
        if (kind == "scale")
            return ConvexExpr::scale(to_double(field(j, "c", ctx), ctx), expr_from(field(j, "child", ctx)));
        if (kind == "quad") {
            Matrix A = matrix_from(field(j, "A", ctx), ctx + ".A");
            Vector a = has(j, "a") ? vector_from(j["a"], ctx + ".a") : Vector::Zero(A.rows());
            const double c = has(j, "c") ? to_double(j["c"], ctx) : 0.0;
            return ConvexExpr::quad(std::move(A), std::move(a), c);
        }
        if (kind == "norm2") {
            Matrix M = matrix_from(field(j, "M", ctx), ctx + ".M");
            Vector d = has(j, "d") ? vector_from(j["d"], ctx + ".d") : Vector::Zero(M.rows());
            return ConvexExpr::norm2_affine(std::move(M), std::move(d));
        }
        if (kind == "square_nonneg") {
            const double lb = has(j, "lower_bound") ? to_double(j["lower_bound"], ctx) : 0.0;
            return ConvexExpr::square_nonneg(expr_from(field(j, "child", ctx)), lb);
        }
    } catch (const ArgumentError& e) {
        throw ParseError(ctx + ": " + e.what());
    }
    throw ParseError("expression: unknown kind '" + kind + "'");
}

Json scenario_json(const ScenarioFile& s) {
    Json out;
    out["p"] = s.rf.scenarios.p;
    Json sc = Json::array();
    for (int i = 0; i < s.rf.size(); ++i) sc.push_back({{"pExpr", expr_json(s.rf.p[i])}, {"qExpr", expr_json(s.rf.q[i])}});
    out["scenarios"] = sc;
    out["domain"] = domain_json(s.rf.domain);
    if (s.utility) out["utility"] = {{"a", s.utility->a}, {"alpha", s.utility->alpha}};
    return out;
}

ScenarioFile scenario_from(const Json& j) {
    const std::string ctx = "scenario file";
    const Vector pv = vector_from(field(j, "p", ctx), ctx + ".p");
    std::vector<double> p(pv.data(), pv.data() + pv.size());
    const Json& sc = field(j, "scenarios", ctx);
    if (!sc.is_array() || sc.size() != p.size()) throw ParseError(ctx + ": need one scenario per probability");
    std::vector<ConvexExpr> pe, qe;
    for (const auto& s : sc) {
        pe.push_back(expr_from(field(s, "pExpr", ctx)));
        qe.push_back(expr_from(field(s, "qExpr", ctx)));
    }
    Domain dom = domain_from(field(j, "domain", ctx));
    std::optional<PwlUtility> u;
    try {
        if (has(j, "utility")) {
            const Vector a = vector_from(field(j["utility"], "a", ctx), ctx + ".utility.a");
            const Vector al = vector_from(field(j["utility"], "alpha", ctx), ctx + ".utility.alpha");
            u = PwlUtility(std::vector<double>(a.data(), a.data() + a.size()),
                           std::vector<double>(al.data(), al.data() + al.size()));
        }
        return ScenarioFile{RandomDcFunctional(ScenarioSet(std::move(p)), std::move(pe), std::move(qe), std::move(dom)), u};
    } catch (const ArgumentError& e) {
        throw ParseError(ctx + ": " + e.what());
    }
}

Json qp_json(const QpFile& q) { return {{"Q", matrix_json(q.Q)}, {"D", matrix_json(q.D)}}; }

QpFile qp_from(const Json& j) {
    QpFile q{matrix_from(field(j, "Q", "qp file"), "Q"), matrix_from(field(j, "D", "qp file"), "D")};
    if (q.Q.rows() != q.Q.cols()) throw ParseError("qp file: Q must be square");
    if (q.D.cols() != q.Q.rows()) throw ParseError("qp file: D must have as many columns as Q");
    return q;
}

Json query_json(const QpQuery& q) {
    Json out;
    if (q.q) out["q"] = vector_json(*q.q);
    if (q.b) out["b"] = vector_json(*q.b);
    if (q.region) out["region"] = domain_json(*q.region);
    if (!q.grid.empty()) out["grid"] = q.grid;
    return out;
}

QpQuery query_from(const Json& j) {
    QpQuery out;
    if (has(j, "q") || has(j, "b")) {
        out.q = vector_from(field(j, "q", "query"), "query.q");
        out.b = vector_from(field(j, "b", "query"), "query.b");
    }
    if (has(j, "region")) {
        out.region = domain_from(j["region"]);
        out.grid = has(j, "grid") ? j["grid"].get<std::vector<int>>() : std::vector<int>{11, 11};
        if (out.grid.size() != 2 || out.grid[0] < 1 || out.grid[1] < 1)
            throw ParseError("query: grid must be [n_q, n_b] with positive counts");
    }
    if (!out.q && !out.region) throw ParseError("query: expected (q, b) or region");
    return out;
}

Json recourse_json(const RecourseFile& r) {
    Json out = qp_json(r.qp);
    Json sc = Json::array();
    for (const auto& s : r.scenarios)
        sc.push_back({{"f", vector_json(s.f)}, {"G", matrix_json(s.G)}, {"C", matrix_json(s.C)}, {"xi", vector_json(s.xi)}});
    out["scenarios"] = sc;
    out["x_region"] = domain_json(r.x_region);
    return out;
}

RecourseFile recourse_from(const Json& j) {
    const std::string ctx = "recourse file";
    RecourseFile out{qp_from(j), {}, domain_from(field(j, "x_region", ctx))};
    const Json& sc = field(j, "scenarios", ctx);
    if (!sc.is_array() || sc.empty()) throw ParseError(ctx + ": scenarios must be a nonempty array");
    for (const auto& s : sc) {
        RecourseScenario r{vector_from(field(s, "f", ctx), "f"), matrix_from(field(s, "G", ctx), "G"),
                           matrix_from(field(s, "C", ctx), "C"), vector_from(field(s, "xi", ctx), "xi")};
        const auto n = out.x_region.dim();
        if (r.f.size() != out.qp.Q.rows() || r.G.rows() != out.qp.Q.rows() || r.G.cols() != n ||
            r.xi.size() != out.qp.D.rows() || r.C.rows() != out.qp.D.rows() || r.C.cols() != n)
            throw ParseError(ctx + ": scenario dimensions disagree with Q, D and x_region");
        out.scenarios.push_back(std::move(r));
    }
    return out;
}

Json piecewise_json(const PiecewiseFile& p) {
    Json pieces = Json::array(), regions = Json::array();
    for (const auto& q : p.pieces) pieces.push_back({{"A", matrix_json(q.A)}, {"a", vector_json(q.a)}, {"c", number(q.c)}});
    for (const auto& r : p.regions) regions.push_back(polyhedron_json(r));
    return {{"pieces", pieces}, {"regions", regions}, {"domain", domain_json(p.domain)}};
}

PiecewiseFile piecewise_from(const Json& j) {
    const std::string ctx = "piecewise file";
    const Json& pj = field(j, "pieces", ctx);
    const Json& rj = field(j, "regions", ctx);
    if (!pj.is_array() || !rj.is_array() || pj.size() != rj.size() || pj.empty())
        throw ParseError(ctx + ": need one region per piece");
    PiecewiseFile out{{}, {}, domain_from(field(j, "domain", ctx))};
    const int n = out.domain.dim();
    for (const auto& q : pj) {
        Matrix A = has(q, "A") ? matrix_from(q["A"], "A") : Matrix::Zero(n, n);
        Vector a = vector_from(field(q, "a", ctx), "a");
        const double c = has(q, "c") ? to_double(q["c"], "c") : 0.0;
        if (A.rows() != n || A.cols() != n || a.size() != n) throw ParseError(ctx + ": piece dimension mismatch");
        out.pieces.push_back(QuadraticPiece{std::move(A), std::move(a), c});
    }
    for (const auto& r : rj) {
        out.regions.push_back(polyhedron_from(r));
        if (out.regions.back().dim() != n) throw ParseError(ctx + ": region dimension mismatch");
    }
    return out;
}

Json report_json(const CheckReport& r) {
    Json w = Json::array();
    for (double v : r.witness) w.push_back(number(v));
    return {{"check", r.check}, {"trials", r.trials}, {"max_violation", number(r.max_violation)},
            {"tol", number(r.tol)}, {"pass", r.pass}, {"witness", w}, {"seed", r.seed}};
}

CheckReport report_from(const Json& j) {
    const std::string ctx = "report";
    CheckReport r;
    r.check = field(j, "check", ctx).get<std::string>();
    r.trials = field(j, "trials", ctx).get<int>();
    r.max_violation = to_double(field(j, "max_violation", ctx), ctx);
    r.tol = to_double(field(j, "tol", ctx), ctx);
    r.pass = field(j, "pass", ctx).get<bool>();
    for (const auto& w : field(j, "witness", ctx)) r.witness.push_back(to_double(w, ctx));
    r.seed = field(j, "seed", ctx).get<std::uint64_t>();
    return r;
}

Json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

void write_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

} // namespace dcforge::io

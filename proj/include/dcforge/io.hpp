#pragma once

#include "dcforge/piecewise.hpp"
#include "dcforge/qp_value.hpp"
#include "dcforge/risk.hpp"
#include "dcforge/verification.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dcforge::io {

using Json = nlohmann::ordered_json;

/// Doubles are written as numbers, non-finite values as "inf", "-inf" or "nan".
Json number(double v);
double to_double(const Json& j, const std::string& what);
Json vector_json(const Vector& v);
Vector vector_from(const Json& j, const std::string& what);
Json matrix_json(const Matrix& m);
Matrix matrix_from(const Json& j, const std::string& what);

Json polyhedron_json(const Polyhedron& p);
Polyhedron polyhedron_from(const Json& j);

/// {"box":{"lower":[...],"upper":[...]}} or {"polyhedron":{"A":...,"b":...,"eq_rows":...}}.
Json domain_json(const Domain& d);
Domain domain_from(const Json& j);

/// Parseable kinds only: affine, sum, scale, max, quad, norm2, square_nonneg.
Json expr_json(const ConvexExpr& e);
ConvexExpr expr_from(const Json& j);

struct ScenarioFile {
    RandomDcFunctional rf;
    std::optional<PwlUtility> utility;
};
Json scenario_json(const ScenarioFile& s);
ScenarioFile scenario_from(const Json& j);

struct QpFile {
    Matrix Q, D;
};
Json qp_json(const QpFile& q);
QpFile qp_from(const Json& j);

/// Either a single parameter (q, b) or a region with per-axis grid counts.
struct QpQuery {
    std::optional<Vector> q, b;
    std::optional<Domain> region;
    std::vector<int> grid; // {n_q, n_b}
};
Json query_json(const QpQuery& q);
QpQuery query_from(const Json& j);

struct RecourseFile {
    QpFile qp;
    std::vector<RecourseScenario> scenarios;
    Domain x_region;
};
Json recourse_json(const RecourseFile& r);
RecourseFile recourse_from(const Json& j);

struct PiecewiseFile {
    std::vector<QuadraticPiece> pieces;
    std::vector<Polyhedron> regions;
    Domain domain;
};
Json piecewise_json(const PiecewiseFile& p);
PiecewiseFile piecewise_from(const Json& j);

Json report_json(const CheckReport& r);
CheckReport report_from(const Json& j);

Json read_file(const std::string& path);
void write_file(const std::string& path, const Json& j);

} // namespace dcforge::io

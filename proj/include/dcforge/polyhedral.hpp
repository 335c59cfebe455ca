#pragma once

#include "dcforge/linalg.hpp"

#include <cstddef>
#include <vector>

namespace dcforge {

/// {x : A x <= b}, with the rows listed in `eq_rows` holding as equalities.
struct Polyhedron {
    Matrix A;
    Vector b;
    std::vector<int> eq_rows; // sorted, unique

    Polyhedron() = default;
    Polyhedron(Matrix a, Vector rhs, std::vector<int> equalities = {});

    /// {z : D z >= b}
    static Polyhedron from_geq(const Matrix& d, const Vector& rhs);
    /// Box with finite bounds only; infinite entries produce no row.
    static Polyhedron box(const Vector& lo, const Vector& hi);
    /// The whole space R^n (no rows).
    static Polyhedron whole_space(int n);

    int dim() const { return static_cast<int>(A.cols()); }
    int rows() const { return static_cast<int>(A.rows()); }
    bool is_equality(int row) const;
    std::vector<int> inequality_rows() const;

    bool contains(const Vector& x, double tol = 1e-9) const;
    /// Largest constraint violation (0 when feasible).
    double violation(const Vector& x) const;

    /// Rows of `other` appended (dimensions must agree).
    Polyhedron intersect(const Polyhedron& other) const;

    bool operator==(const Polyhedron& o) const;
};

/// Limits for exhaustive basis enumeration.
struct EnumLimits {
    int max_dim = 12;
    int max_rows = 24;
    std::size_t max_bases = 5'000'000;
};

/// Internal callers (LP, projections, KKT faces) go slightly beyond the public caps.
inline constexpr EnumLimits kInternalLimits{24, 64, 4'000'000};

enum class VertexStatus { ok, empty, no_vertices };

struct VertexList {
    VertexStatus status = VertexStatus::ok;
    std::vector<Vector> points; // canonical lexicographic order
};

struct RayList {
    std::vector<Vector> rays; // extreme rays of the pointed part, unit max-norm
    Matrix lineality;         // orthonormal basis of the lineality space (columns)
};

/// All basic feasible solutions, deduplicated (distance < 1e-8) and sorted.
VertexList enumerate_vertices(const Polyhedron& p, const EnumLimits& limits = {});

/// Vertices of {x >= 0 : A x = b} by basis-column enumeration.
VertexList enumerate_vertices_standard(const Matrix& a, const Vector& b, std::size_t max_bases = 2'000'000);

/// Extreme rays of the cone {v : A v <= 0 (eq rows = 0)}; `cone.b` must vanish.
RayList enumerate_extreme_rays(const Polyhedron& cone, const EnumLimits& limits = {});

/// Conic generators: extreme rays plus +/- each lineality direction.
std::vector<Vector> cone_generators(const Polyhedron& cone, const EnumLimits& limits = {});

enum class LpStatus { optimal, unbounded, infeasible };
enum class Sense { minimize, maximize };

/// For minimize: c + A^T y = 0, value = -b^T y.  For maximize: A^T y = c, value = b^T y.
/// In both cases y >= 0 on inequality rows.
struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    Vector point;
    Vector dual;
};

LpResult lp_solve(const Vector& c, const Polyhedron& p, Sense sense = Sense::minimize,
                  const EnumLimits& limits = kInternalLimits);

bool is_feasible(const Polyhedron& p);

/// Euclidean projection by KKT active-set enumeration. Throws EmptyPolyhedron.
Vector project(const Vector& x, const Polyhedron& p);

double distance(const Vector& x, const Polyhedron& p);

/// Scale-aware feasibility tolerance for row i.
double row_tolerance(const Polyhedron& p, int row);

} // namespace dcforge

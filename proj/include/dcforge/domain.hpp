#pragma once

#include "dcforge/linalg.hpp"
#include "dcforge/polyhedral.hpp"
#include "dcforge/rng.hpp"

namespace dcforge {

/// A convex set on which expressions and dc functions live: a box (bounds may be
/// infinite) or a polyhedron {x : A x <= b}.
class Domain {
public:
    enum class Kind { box, polyhedron };

    static Domain box(Vector lo, Vector hi);
    static Domain box(int n, double lo, double hi);
    static Domain polyhedron(Polyhedron p);

    Kind kind() const { return kind_; }
    int dim() const { return static_cast<int>(lower_.size()); }
    bool bounded() const;
    bool contains(const Vector& x, double tol = 1e-9) const;

    /// Box bounds, or the bounding box of the polyhedron (entries may be infinite).
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }
    const Polyhedron& as_polyhedron() const { return poly_; }

    /// Uniform sample (rejection from the bounding box for polyhedra). Requires bounded().
    Vector sample(Rng& rng) const;
    /// Nearest point of the domain (clamp for boxes, projection for polyhedra).
    Vector clamp(const Vector& x) const;

    bool operator==(const Domain& o) const;
    bool operator!=(const Domain& o) const { return !(*this == o); }

private:
    Domain() = default;
    Kind kind_ = Kind::box;
    Vector lower_, upper_;
    Polyhedron poly_;
    std::vector<Vector> vertices_; // polyhedra only; fallback for sampling
};

} // namespace dcforge

#pragma once

#include "dcforge/dc_function.hpp"
#include "dcforge/polyhedral.hpp"
#include "dcforge/quadratic.hpp"
#include "dcforge/verification.hpp"

#include <cstdint>
#include <vector>

namespace dcforge {

/// A continuous selection of quadratic (or affine) pieces theta_i on polyhedral
/// regions S^i whose union is convex. `domain` is the bounded working box.
class PiecewiseLc1 {
public:
    PiecewiseLc1(std::vector<QuadraticPiece> pieces, std::vector<Polyhedron> regions, Domain domain);

    int size() const { return static_cast<int>(pieces_.size()); }
    int dim() const { return domain_.dim(); }
    const std::vector<QuadraticPiece>& pieces() const { return pieces_; }
    const std::vector<Polyhedron>& regions() const { return regions_; }
    const Domain& domain() const { return domain_; }

    /// L_ji for all pairs; moduli()(j, i).
    const Matrix& moduli() const { return moduli_; }
    /// L_i = max_j L_ji
    double piece_modulus(int i) const;

    /// Index of the first region containing x, or -1.
    int locate(const Vector& x, double tol = 1e-9) const;
    /// theta(x) via the first containing region. Throws DomainError outside the union.
    double value(const Vector& x) const;
    /// Sample of the union S (rejection from the working domain).
    Vector sample_union(Rng& rng) const;

private:
    std::vector<QuadraticPiece> pieces_;
    std::vector<Polyhedron> regions_;
    Domain domain_;
    Matrix moduli_;
};

/// Largest singular value of A_j - A_i (0 when the difference is affine).
double lipschitz_modulus(const QuadraticPiece& pi, const QuadraticPiece& pj);

/// Quadratic as a dc pair via the PSD split of its Hessian.
DcFunction quadratic_dc(const QuadraticPiece& piece, const Domain& domain);

struct MinRepresentation {
    std::vector<DcFunction> psi;
    DcFunction theta;
};

/// psi_i = theta_i + dist(x;S^i) max_j |grad theta_ji(x)| + (3 L_i / 2) dist(x;S^i)^2 and
/// theta = min_i psi_i. Checks region nonemptiness and (by sampling) convexity of the union.
MinRepresentation build_min_representation(const PiecewiseLc1& pw, std::uint64_t seed = 42);

/// theta(x) = min_i [a_i'x + alpha_i + dist(x;S^i) max_j |a_j - a_i|].
DcFunction pwa_min_representation(const std::vector<AffinePiece>& pieces, const std::vector<Polyhedron>& regions,
                                  const Domain& domain, std::uint64_t seed = 42);

/// Points shared by two regions (projections of samples of S^i onto S^j that stay in S^i)
/// give the same value under both pieces.
CheckReport check_boundary_agreement(const PiecewiseLc1& pw, std::uint64_t seed = 42, int samples = 500,
                                     double tol = 1e-7);

/// theta equals theta_i at samples of each S^i.
CheckReport check_selection(const PiecewiseLc1& pw, std::uint64_t seed = 42, int samples = 500, double tol = 1e-9);

} // namespace dcforge

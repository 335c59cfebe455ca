#pragma once

#include "dcforge/dc_function.hpp"
#include "dcforge/piecewise.hpp"
#include "dcforge/polyhedral.hpp"
#include "dcforge/quadratic.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dcforge {

inline constexpr int kMaxQpVars = 8;
inline constexpr int kMaxQpRows = 10;

/// Copositivity of Q on D_inf = {v : Dv >= 0}: rays are checked exactly, the cone
/// interior by sampling. A failure carries a witness with v'Qv < 0; a pass is heuristic.
struct CopositivityVerdict {
    bool ray_pass = true;
    bool sampled_pass = true;
    std::optional<Vector> witness;

    bool pass() const { return ray_pass && sampled_pass; }
};

CopositivityVerdict check_copositive(const Matrix& Q, const Matrix& D, std::uint64_t seed = 42);

/// A generator v of the recession cone of KKT(I), with the extreme points mu of
/// {mu >= 0 : D'mu = Qv}. Each (v, mu) gives the inequality q'v + b'mu >= 0.
struct DomGenerator {
    std::vector<int> active;
    Vector v;
    std::vector<Vector> mu;
};

struct DomCertificate {
    std::vector<DomGenerator> generators;
};

/// min q'z + 1/2 z'Qz  s.t.  Dz >= b, for fixed (Q, D) and varying (q, b).
class QpInstance {
public:
    QpInstance(Matrix Q, Matrix D, std::uint64_t seed = 42);

    const Matrix& Q() const { return Q_; }
    const Matrix& D() const { return D_; }
    int m() const { return static_cast<int>(Q_.rows()); }
    int k() const { return static_cast<int>(D_.rows()); }
    /// Dimension of the parameter vector (q, b).
    int param_dim() const { return m() + k(); }

    const CopositivityVerdict& verdict() const { return verdict_; }
    const DomCertificate& certificate() const { return cert_; }
    /// Conic generators of D_inf.
    const std::vector<Vector>& recession_generators() const { return rec_; }

    double objective(const Vector& q, const Vector& z) const { return q.dot(z) + 0.5 * z.dot(Q_ * z); }

    static Vector param(const Vector& q, const Vector& b);
    Vector q_of(const Vector& y) const { return y.head(m()); }
    Vector b_of(const Vector& y) const { return y.tail(k()); }

private:
    Matrix Q_, D_;
    CopositivityVerdict verdict_;
    DomCertificate cert_;
    std::vector<Vector> rec_;
};

/// P_D(b) nonempty and min_{Dz >= b} (q + Qz)'v >= -1e-8 for every stored generator v.
bool dom_membership(const QpInstance& inst, const Vector& q, const Vector& b);
/// Same test through the dual extreme points: max_mu (q'v + b'mu) >= -1e-8.
bool dom_membership_dual(const QpInstance& inst, const Vector& q, const Vector& b);

struct QpFace {
    std::vector<int> active;
    Vector z;
    Vector eta; // multipliers of the active rows
};

struct QpSolution {
    double value = 0.0;
    std::vector<QpFace> faces; // KKT points attaining the value, sorted by active set
};

QpSolution qp_solve(const QpInstance& inst, const Vector& q, const Vector& b);

/// Largest KKT residual of a face point (stationarity, feasibility, sign, complementarity).
double kkt_residual(const QpInstance& inst, const Vector& q, const Vector& b, const QpFace& face);

/// Looks for a feasible ray along which the objective drops below `threshold`.
bool find_unbounded_ray(const QpInstance& inst, const Vector& q, const Vector& b, double threshold = -1e6);

/// A stationarity piece: for (q,b) in `validity`, z = Mz (q,b) and eta_I = Meta (q,b)
/// solve KKT(I), and the objective there is the quadratic `value`.
struct KktPiece {
    std::vector<int> active;
    Matrix Mz, Meta;
    Polyhedron validity;
    QuadraticPiece value;
};

/// Pieces with nonsingular KKT(I) systems whose validity cone is full-dimensional and meets `region`.
std::vector<KktPiece> enumerate_pieces(const QpInstance& inst, const Domain& region);

/// min over pieces whose validity polyhedron contains y (infinity when none does).
double min_of_pieces(const std::vector<KktPiece>& pieces, const Vector& y, double tol = 1e-9);

/// dc decomposition of qp_opt over a convex region inside dom(Q, D).
DcFunction value_dc(const QpInstance& inst, const Domain& region, std::uint64_t seed = 42);

/// Positive definite shortcut: g = phi(b + DQ^{-1}q), h = 1/2 q'Q^{-1}q with
/// phi(b') = min {1/2 y'Qy : Dy >= b'}.
DcFunction pd_value_dc(const QpInstance& inst, const Domain& region);
DcFunction pd_value_dc(const QpInstance& inst);

/// q(x) = f + Gx and b(x) = xi - Cx for one scenario.
struct RecourseScenario {
    Vector f;
    Matrix G;
    Matrix C;
    Vector xi;
};

DcFunction recourse_dc(const QpInstance& inst, const RecourseScenario& sc, const Domain& x_region,
                       std::uint64_t seed = 42);

} // namespace dcforge

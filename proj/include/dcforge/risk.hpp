#pragma once

#include "dcforge/dc_function.hpp"
#include "dcforge/polyhedral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dcforge {

/// Positive scenario probabilities summing to one (within 1e-12).
struct ScenarioSet {
    std::vector<double> p;

    explicit ScenarioSet(std::vector<double> probs);
    int size() const { return static_cast<int>(p.size()); }
};

/// Per-scenario dc pieces f(x, w_s) = pExpr_s(x) - qExpr_s(x) on a shared domain.
struct RandomDcFunctional {
    ScenarioSet scenarios;
    std::vector<ConvexExpr> p, q;
    Domain domain;

    RandomDcFunctional(ScenarioSet s, std::vector<ConvexExpr> pe, std::vector<ConvexExpr> qe, Domain dom);

    int size() const { return scenarios.size(); }
    DcFunction scenario(int s) const;
    /// Scenario outcomes f(x, w_s).
    std::vector<double> outcomes(const Vector& x) const;
};

/// u(t) = min_i (a_i t + alpha_i), concave, u(0) = 0, 1 in du(0).
struct PwlUtility {
    std::vector<double> a, alpha;

    PwlUtility(std::vector<double> slopes, std::vector<double> intercepts);
    /// (1/(1-alpha)) min(0, t), whose OCE is -CVaR_alpha(-Z).
    static PwlUtility cvar(double alpha);

    int pieces() const { return static_cast<int>(a.size()); }
    double operator()(double t) const;
};

/// {v >= 0 : [I - p 1'/(1-alpha)] v + p/(1-alpha) <= 0} with its vertices.
struct WPolytope {
    Polyhedron set;
    std::vector<Vector> vertices;

    static WPolytope build(double alpha, const std::vector<double>& p);
};

/// {phi >= 0 : sum_{i,s'} (p_s a_i - delta_{s's}) phi_{is'} = p_s}; variable (i, s) at index i*S + s.
struct PhiPolytope {
    Matrix A;
    Vector b;
    std::vector<Vector> vertices;

    static PhiPolytope build(const PwlUtility& u, const std::vector<double>& p);
};

inline constexpr int kMaxWScenarios = 12;
inline constexpr int kMaxPhiVariables = 15;

DcFunction expectation_dc(const RandomDcFunctional& rf);
DcFunction cvar_dc(const RandomDcFunctional& rf, double alpha);
DcFunction var_dc(const RandomDcFunctional& rf, double alpha);
DcFunction oce_dc(const RandomDcFunctional& rf, const PwlUtility& u);
DcFunction mu_dc(const RandomDcFunctional& rf, const PwlUtility& u);
DcFunction variance_dc(const RandomDcFunctional& rf);
DcFunction std_dc(const RandomDcFunctional& rf);

enum class DeviationKind { sq, sqrt_sq, pos, abs };
enum class CenterKind { mean, cvar, var };

struct Center {
    CenterKind kind = CenterKind::mean;
    double alpha = 0.5;
};

DcFunction deviation_dc(const RandomDcFunctional& rf, DeviationKind kind, const Center& center);

/// What a risk_lambda measure adds on top of the expectation.
struct DeviationSpec {
    enum class Kind { variance, std, deviation } kind = Kind::variance;
    DeviationKind dev = DeviationKind::sq;
    Center center;
};

DcFunction risk_lambda_dc(const RandomDcFunctional& rf, double lambda, const DeviationSpec& dev);

/// Parsed measure string: "expectation", "cvar:0.9", "var:0.9", "oce", "mu", "variance",
/// "std", "dev:abs@cvar:0.9", "Rlambda:0.5:variance".
struct MeasureSpec {
    enum class Kind { expectation, cvar, var, oce, mu, variance, std, deviation, risk_lambda } kind =
        Kind::expectation;
    double alpha = 0.5;
    double lambda = 0.0;
    DeviationSpec dev;
    std::string text;
};

MeasureSpec parse_measure(const std::string& text);
std::string to_string(DeviationKind k);
std::string to_string(const Center& c);

/// Builds the dc decomposition of a measure. OCE and m_u require a utility.
DcFunction build_measure(const MeasureSpec& spec, const RandomDcFunctional& rf,
                         const std::optional<PwlUtility>& u = std::nullopt);

/// Direct evaluation from the scenario outcomes, independent of the dc machinery.
double risk_oracle(const MeasureSpec& spec, const RandomDcFunctional& rf, const Vector& x,
                   const std::optional<PwlUtility>& u = std::nullopt);

namespace oracle {

double expectation(const std::vector<double>& p, const std::vector<double>& z);
/// Weighted average of the upper (1-alpha) tail.
double cvar(const std::vector<double>& p, const std::vector<double>& z, double alpha);
/// Smallest minimizer of t + (1/(1-alpha)) E[z - t]_+ over t in {z_s}.
double var(const std::vector<double>& p, const std::vector<double>& z, double alpha);
/// sup_eta eta + E u(z - eta) by scanning the utility kinks; also its largest maximizer.
double oce(const std::vector<double>& p, const std::vector<double>& z, const PwlUtility& u);
double mu(const std::vector<double>& p, const std::vector<double>& z, const PwlUtility& u);
double variance(const std::vector<double>& p, const std::vector<double>& z);
double deviation(const std::vector<double>& p, const std::vector<double>& z, DeviationKind kind, const Center& c);

} // namespace oracle

} // namespace dcforge

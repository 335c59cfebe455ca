#include "dcforge/risk.hpp"

#include "dcforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace dcforge {

ScenarioSet::ScenarioSet(std::vector<double> probs) : p(std::move(probs)) {
    if (p.empty()) throw ArgumentError("scenario set: no scenarios");
    double total = 0.0;
    for (double v : p) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError("scenario set: probabilities must be positive");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("scenario set: probabilities must sum to 1");
}

RandomDcFunctional::RandomDcFunctional(ScenarioSet s, std::vector<ConvexExpr> pe, std::vector<ConvexExpr> qe,
                                       Domain dom)
    : scenarios(std::move(s)), p(std::move(pe)), q(std::move(qe)), domain(std::move(dom)) {
    if (static_cast<int>(p.size()) != scenarios.size() || static_cast<int>(q.size()) != scenarios.size())
        throw ArgumentError("random dc functional: piece count does not match scenario count");
    for (int s = 0; s < scenarios.size(); ++s)
        if (p[s].dim() != domain.dim() || q[s].dim() != domain.dim())
            throw DomainError("random dc functional: piece dimension does not match the domain");
}

DcFunction RandomDcFunctional::scenario(int s) const { return DcFunction(p.at(s), q.at(s), domain); }

std::vector<double> RandomDcFunctional::outcomes(const Vector& x) const {
    std::vector<double> z(size());
    for (int s = 0; s < size(); ++s) {
        const auto [a, b] = evaluate_pair(p[s], q[s], x);
        z[s] = a - b;
    }
    return z;
}

PwlUtility::PwlUtility(std::vector<double> slopes, std::vector<double> intercepts)
    : a(std::move(slopes)), alpha(std::move(intercepts)) {
    if (a.empty() || a.size() != alpha.size()) throw ArgumentError("utility: slopes and intercepts must pair up");
    for (double s : a)
        if (!(s >= 0.0) || !std::isfinite(s)) throw ArgumentError("utility: slopes must be nonnegative");
    const double lowest = *std::min_element(alpha.begin(), alpha.end());
    if (std::abs(lowest) > 1e-12) throw ArgumentError("utility: the smallest intercept must be 0 so that u(0) = 0");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(alpha[i]) <= 1e-12) {
            lo = std::min(lo, a[i]);
            hi = std::max(hi, a[i]);
        }
    if (!(lo <= 1.0 && 1.0 <= hi)) throw ArgumentError("utility: 1 must be a supergradient at 0");
}

PwlUtility PwlUtility::cvar(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("utility: alpha must lie in (0,1)");
    return PwlUtility({1.0 / (1.0 - alpha), 0.0}, {0.0, 0.0});
}

double PwlUtility::operator()(double t) const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) m = std::min(m, a[i] * t + alpha[i]);
    return m;
}

WPolytope WPolytope::build(double alpha, const std::vector<double>& p) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("W polytope: alpha must lie in (0,1)");
    const int S = static_cast<int>(p.size());
    if (S > kMaxWScenarios) throw ScaleError("W polytope: too many scenarios for vertex enumeration");
    const double k = 1.0 / (1.0 - alpha);
    Matrix A = Matrix::Zero(2 * S, S);
    Vector b = Vector::Zero(2 * S);
    for (int s = 0; s < S; ++s) {
        for (int t = 0; t < S; ++t) A(s, t) = (s == t ? 1.0 : 0.0) - p[s] * k;
        b[s] = -p[s] * k;
        A(S + s, s) = -1.0;
    }
    WPolytope w{Polyhedron(std::move(A), std::move(b)), {}};
    w.vertices = enumerate_vertices(w.set).points;
    if (w.vertices.empty()) throw ScaleError("W polytope: no vertices found");
    return w;
}

PhiPolytope PhiPolytope::build(const PwlUtility& u, const std::vector<double>& p) {
    const int S = static_cast<int>(p.size()), I = u.pieces();
    if (I * S > kMaxPhiVariables) throw ScaleError("Phi polytope: too many variables for vertex enumeration");
    PhiPolytope phi;
    phi.A = Matrix::Zero(S, I * S);
    phi.b = Vector::Zero(S);
    for (int s = 0; s < S; ++s) {
        for (int i = 0; i < I; ++i)
            for (int t = 0; t < S; ++t) phi.A(s, i * S + t) = p[s] * u.a[i] - (s == t ? 1.0 : 0.0);
        phi.b[s] = p[s];
    }
    const VertexList v = enumerate_vertices_standard(phi.A, phi.b);
    if (v.status != VertexStatus::ok || v.points.empty()) throw ScaleError("Phi polytope: no vertices found");
    phi.vertices = v.points;
    return phi;
}

namespace {

std::vector<LinearTerm> weighted_scenarios(const RandomDcFunctional& rf, const std::vector<double>& w) {
    std::vector<LinearTerm> terms;
    for (int s = 0; s < rf.size(); ++s) terms.push_back({w[s], rf.scenario(s)});
    return terms;
}

ConvexExpr weighted_sum(const std::vector<ConvexExpr>& xs, const std::vector<double>& w, double factor) {
    std::vector<ConvexExpr> parts;
    for (std::size_t s = 0; s < xs.size(); ++s) parts.push_back(ConvexExpr::scale(factor * w[s], xs[s]));
    return ConvexExpr::sum(std::move(parts));
}

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0,1)");
}

DcFunction center_dc(const RandomDcFunctional& rf, const Center& c) {
    switch (c.kind) {
    case CenterKind::mean: return expectation_dc(rf);
    case CenterKind::cvar: return cvar_dc(rf, c.alpha);
    case CenterKind::var: return var_dc(rf, c.alpha);
    }
    throw ArgumentError("unknown center");
}

} // namespace

DcFunction expectation_dc(const RandomDcFunctional& rf) {
    return combine_linear(weighted_scenarios(rf, rf.scenarios.p));
}

DcFunction cvar_dc(const RandomDcFunctional& rf, double alpha) {
    require_alpha(alpha);
    ConvexExpr g = ConvexExpr::cvar_envelope(alpha, rf.scenarios.p, rf.p, rf.q);
    ConvexExpr h = weighted_sum(rf.q, rf.scenarios.p, 1.0 / (1.0 - alpha));
    return DcFunction(std::move(g), std::move(h), rf.domain);
}

DcFunction var_dc(const RandomDcFunctional& rf, double alpha) {
    require_alpha(alpha);
    const WPolytope w = WPolytope::build(alpha, rf.scenarios.p);
    const DcFunction cvar = cvar_dc(rf, alpha);
    // CVaR + sum_s (f_s - CVaR) v_s is linear in (CVaR, f) with constant weights.
    std::vector<DcFunction> family;
    for (const Vector& v : w.vertices) {
        std::vector<LinearTerm> terms{{1.0 - v.sum(), cvar}};
        for (int s = 0; s < rf.size(); ++s) terms.push_back({v[s], rf.scenario(s)});
        family.push_back(combine_linear(terms));
    }
    return pointwise_extremum(Extremum::max, family);
}

DcFunction oce_dc(const RandomDcFunctional& rf, const PwlUtility& u) {
    const double total = std::accumulate(u.a.begin(), u.a.end(), 0.0);
    ConvexExpr g = weighted_sum(rf.p, rf.scenarios.p, total);
    ConvexExpr h = ConvexExpr::neg_oce_envelope(u.a, u.alpha, rf.scenarios.p, rf.p, rf.q);
    return DcFunction(std::move(g), std::move(h), rf.domain);
}

DcFunction mu_dc(const RandomDcFunctional& rf, const PwlUtility& u) {
    const PhiPolytope phi = PhiPolytope::build(u, rf.scenarios.p);
    const DcFunction oce = oce_dc(rf, u);
    const int S = rf.size(), I = u.pieces();
    std::vector<DcFunction> family;
    for (const Vector& v : phi.vertices) {
        // O + sum_{i,s} (a_i (f_s - O) + alpha_i) phi_is
        double on_oce = 1.0, constant = 0.0;
        std::vector<double> on_f(S, 0.0);
        for (int i = 0; i < I; ++i)
            for (int s = 0; s < S; ++s) {
                const double w = v[i * S + s];
                on_oce -= u.a[i] * w;
                on_f[s] += u.a[i] * w;
                constant += u.alpha[i] * w;
            }
        std::vector<LinearTerm> terms{{on_oce, oce}, {1.0, DcFunction::constant(constant, rf.domain)}};
        for (int s = 0; s < S; ++s) terms.push_back({on_f[s], rf.scenario(s)});
        family.push_back(combine_linear(terms));
    }
    return pointwise_extremum(Extremum::min, family);
}

DcFunction variance_dc(const RandomDcFunctional& rf) {
    const Domain& dom = rf.domain;
    if (!dom.bounded()) throw UnboundedDomainError("variance: domain must be bounded");
    double lowest = 0.0;
    for (int s = 0; s < rf.size(); ++s)
        lowest = std::min({lowest, infimum_estimate(rf.p[s], dom), infimum_estimate(rf.q[s], dom)});
    const double c = -lowest + 1e-6;
    const int n = dom.dim();
    const auto& pr = rf.scenarios.p;
    const ConvexExpr shift = ConvexExpr::constant(n, c);
    std::vector<ConvexExpr> ps, qs, pq_sq, sq_sum;
    for (int s = 0; s < rf.size(); ++s) {
        ps.push_back(ConvexExpr::sum({rf.p[s], shift}));
        qs.push_back(ConvexExpr::sum({rf.q[s], shift}));
        sq_sum.push_back(ConvexExpr::scale(
            2.0 * pr[s], ConvexExpr::sum({ConvexExpr::square_nonneg(ps.back(), 0.0),
                                          ConvexExpr::square_nonneg(qs.back(), 0.0)})));
        pq_sq.push_back(ConvexExpr::scale(pr[s], ConvexExpr::square_nonneg(ConvexExpr::sum({ps.back(), qs.back()}), 0.0)));
    }
    const ConvexExpr ep = weighted_sum(ps, pr, 1.0), eq = weighted_sum(qs, pr, 1.0);
    // g = 2 E[p^2 + q^2] + (Ep + Eq)^2,  h = E(p + q)^2 + 2[(Ep)^2 + (Eq)^2]
    sq_sum.push_back(ConvexExpr::square_nonneg(ConvexExpr::sum({ep, eq}), 0.0));
    pq_sq.push_back(ConvexExpr::scale(
        2.0, ConvexExpr::sum({ConvexExpr::square_nonneg(ep, 0.0), ConvexExpr::square_nonneg(eq, 0.0)})));
    return DcFunction(ConvexExpr::sum(std::move(sq_sum)), ConvexExpr::sum(std::move(pq_sq)), dom);
}

DcFunction std_dc(const RandomDcFunctional& rf) {
    const DcFunction mean = expectation_dc(rf);
    std::vector<DcFunction> comps;
    for (int s = 0; s < rf.size(); ++s) {
        const double w = std::sqrt(rf.scenarios.p[s]);
        comps.push_back(combine_linear({{w, rf.scenario(s)}, {-w, mean}}));
    }
    return norm2(comps);
}

DcFunction deviation_dc(const RandomDcFunctional& rf, DeviationKind kind, const Center& center) {
    const DcFunction c = center_dc(rf, center);
    const auto& pr = rf.scenarios.p;
    std::vector<DcFunction> resid;
    for (int s = 0; s < rf.size(); ++s) resid.push_back(combine_linear({{1.0, rf.scenario(s)}, {-1.0, c}}));
    std::vector<LinearTerm> terms;
    switch (kind) {
    case DeviationKind::sq:
        for (int s = 0; s < rf.size(); ++s) terms.push_back({pr[s], square(resid[s])});
        return combine_linear(terms);
    case DeviationKind::sqrt_sq: {
        std::vector<DcFunction> comps;
        for (int s = 0; s < rf.size(); ++s) comps.push_back(combine_linear({{std::sqrt(pr[s]), resid[s]}}));
        return norm2(comps);
    }
    case DeviationKind::pos:
    case DeviationKind::abs: {
        const PosAbs mode = kind == DeviationKind::pos ? PosAbs::pos : PosAbs::abs;
        for (int s = 0; s < rf.size(); ++s) terms.push_back({pr[s], pos_part_abs(mode, resid[s])});
        return combine_linear(terms);
    }
    }
    throw ArgumentError("unknown deviation kind");
}

DcFunction risk_lambda_dc(const RandomDcFunctional& rf, double lambda, const DeviationSpec& dev) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("risk lambda: lambda must be nonnegative");
    const DcFunction mean = expectation_dc(rf);
    if (lambda == 0.0) return mean;
    DcFunction d = dev.kind == DeviationSpec::Kind::variance ? variance_dc(rf)
                   : dev.kind == DeviationSpec::Kind::std    ? std_dc(rf)
                                                             : deviation_dc(rf, dev.dev, dev.center);
    return combine_linear({{1.0, mean}, {lambda, d}});
}

// ---------------------------------------------------------------------------
// Measure strings

namespace {

double parse_number(const std::string& s, const std::string& whole) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("measure '" + whole + "': bad number '" + s + "'");
    }
    if (used != s.size()) throw ParseError("measure '" + whole + "': bad number '" + s + "'");
    return v;
}

Center parse_center(const std::string& s, const std::string& whole) {
    if (s == "mean") return {CenterKind::mean, 0.5};
    if (s.rfind("cvar:", 0) == 0) return {CenterKind::cvar, parse_number(s.substr(5), whole)};
    if (s.rfind("var:", 0) == 0) return {CenterKind::var, parse_number(s.substr(4), whole)};
    throw ParseError("measure '" + whole + "': unknown center '" + s + "'");
}

DeviationKind parse_kind(const std::string& s, const std::string& whole) {
    if (s == "sq") return DeviationKind::sq;
    if (s == "sqrt_sq") return DeviationKind::sqrt_sq;
    if (s == "pos") return DeviationKind::pos;
    if (s == "abs") return DeviationKind::abs;
    throw ParseError("measure '" + whole + "': unknown deviation kind '" + s + "'");
}

DeviationSpec parse_deviation(std::string s, const std::string& whole) {
    if (s == "variance") return {DeviationSpec::Kind::variance, DeviationKind::sq, {}};
    if (s == "std") return {DeviationSpec::Kind::std, DeviationKind::sqrt_sq, {}};
    if (s.rfind("dev:", 0) == 0) s = s.substr(4);
    const auto at = s.find('@');
    if (at == std::string::npos) throw ParseError("measure '" + whole + "': deviation needs kind@center");
    return {DeviationSpec::Kind::deviation, parse_kind(s.substr(0, at), whole), parse_center(s.substr(at + 1), whole)};
}

} // namespace

MeasureSpec parse_measure(const std::string& text) {
    MeasureSpec m;
    m.text = text;
    using K = MeasureSpec::Kind;
    if (text == "expectation" || text == "mean") m.kind = K::expectation;
    else if (text == "oce") m.kind = K::oce;
    else if (text == "mu") m.kind = K::mu;
    else if (text == "variance") m.kind = K::variance;
    else if (text == "std") m.kind = K::std;
    else if (text.rfind("cvar:", 0) == 0) {
        m.kind = K::cvar;
        m.alpha = parse_number(text.substr(5), text);
    } else if (text.rfind("var:", 0) == 0) {
        m.kind = K::var;
        m.alpha = parse_number(text.substr(4), text);
    } else if (text.rfind("dev:", 0) == 0) {
        m.kind = K::deviation;
        m.dev = parse_deviation(text.substr(4), text);
        if (m.dev.kind != DeviationSpec::Kind::deviation) throw ParseError("measure '" + text + "': bad deviation");
    } else if (text.rfind("Rlambda:", 0) == 0) {
        m.kind = K::risk_lambda;
        const std::string rest = text.substr(8);
        const auto colon = rest.find(':');
        if (colon == std::string::npos) throw ParseError("measure '" + text + "': expected Rlambda:<lambda>:<dev>");
        m.lambda = parse_number(rest.substr(0, colon), text);
        m.dev = parse_deviation(rest.substr(colon + 1), text);
    } else {
        throw ParseError("unknown measure '" + text + "'");
    }
    if ((m.kind == K::cvar || m.kind == K::var) && !(m.alpha > 0.0 && m.alpha < 1.0))
        throw ParseError("measure '" + text + "': alpha must lie in (0,1)");
    if (m.dev.center.kind != CenterKind::mean && !(m.dev.center.alpha > 0.0 && m.dev.center.alpha < 1.0))
        throw ParseError("measure '" + text + "': alpha must lie in (0,1)");
    if (m.kind == K::risk_lambda && !(m.lambda >= 0.0)) throw ParseError("measure '" + text + "': lambda must be >= 0");
    return m;
}

std::string to_string(DeviationKind k) {
    switch (k) {
    case DeviationKind::sq: return "sq";
    case DeviationKind::sqrt_sq: return "sqrt_sq";
    case DeviationKind::pos: return "pos";
    case DeviationKind::abs: return "abs";
    }
    return "?";
}

std::string to_string(const Center& c) {
    std::ostringstream os;
    os.precision(17);
    switch (c.kind) {
    case CenterKind::mean: return "mean";
    case CenterKind::cvar: os << "cvar:" << c.alpha; break;
    case CenterKind::var: os << "var:" << c.alpha; break;
    }
    return os.str();
}

namespace {

const PwlUtility& need_utility(const std::optional<PwlUtility>& u) {
    if (!u) throw ArgumentError("OCE measures need a utility");
    return *u;
}

} // namespace

DcFunction build_measure(const MeasureSpec& spec, const RandomDcFunctional& rf, const std::optional<PwlUtility>& u) {
    using K = MeasureSpec::Kind;
    switch (spec.kind) {
    case K::expectation: return expectation_dc(rf);
    case K::cvar: return cvar_dc(rf, spec.alpha);
    case K::var: return var_dc(rf, spec.alpha);
    case K::oce: return oce_dc(rf, need_utility(u));
    case K::mu: return mu_dc(rf, need_utility(u));
    case K::variance: return variance_dc(rf);
    case K::std: return std_dc(rf);
    case K::deviation: return deviation_dc(rf, spec.dev.dev, spec.dev.center);
    case K::risk_lambda: return risk_lambda_dc(rf, spec.lambda, spec.dev);
    }
    throw ArgumentError("unknown measure");
}

// ---------------------------------------------------------------------------
// Oracles

namespace oracle {

namespace {

constexpr double kTieTol = 1e-12;

bool ties(double a, double b) { return std::abs(a - b) <= kTieTol * (1.0 + std::abs(a) + std::abs(b)); }

double oce_objective(const std::vector<double>& p, const std::vector<double>& z, const PwlUtility& u, double eta) {
    double acc = eta;
    for (std::size_t s = 0; s < z.size(); ++s) acc += p[s] * u(z[s] - eta);
    return acc;
}

struct OceScan {
    double value;
    double largest_maximizer;
};

OceScan oce_scan(const std::vector<double>& p, const std::vector<double>& z, const PwlUtility& u) {
    std::vector<double> kinks;
    for (int i = 0; i < u.pieces(); ++i)
        for (int j = i + 1; j < u.pieces(); ++j)
            if (u.a[i] != u.a[j]) kinks.push_back((u.alpha[j] - u.alpha[i]) / (u.a[i] - u.a[j]));
    std::vector<double> cand;
    for (double zs : z) {
        cand.push_back(zs);
        for (double k : kinks) cand.push_back(zs - k);
    }
    std::sort(cand.begin(), cand.end());
    double best = -std::numeric_limits<double>::infinity();
    for (double eta : cand) best = std::max(best, oce_objective(p, z, u, eta));
    double arg = cand.front();
    for (double eta : cand)
        if (ties(oce_objective(p, z, u, eta), best)) arg = eta;
    const double below = oce_objective(p, z, u, cand.front() - 1.0);
    const double above = oce_objective(p, z, u, cand.back() + 1.0);
    if (below > best && !ties(below, best)) throw UnboundedAuxiliary("oce oracle: supremum is not attained");
    if (above > best && !ties(above, best)) throw UnboundedAuxiliary("oce oracle: supremum is not attained");
    if (ties(above, best)) arg = std::numeric_limits<double>::infinity();
    return {best, arg};
}

} // namespace

double expectation(const std::vector<double>& p, const std::vector<double>& z) {
    double acc = 0.0;
    for (std::size_t s = 0; s < z.size(); ++s) acc += p[s] * z[s];
    return acc;
}

double cvar(const std::vector<double>& p, const std::vector<double>& z, double alpha) {
    std::vector<std::size_t> order(z.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });
    double remaining = 1.0 - alpha, acc = 0.0;
    for (std::size_t s : order) {
        if (remaining <= 0.0) break;
        const double w = std::min(p[s], remaining);
        acc += w * z[s];
        remaining -= w;
    }
    return acc / (1.0 - alpha);
}

double var(const std::vector<double>& p, const std::vector<double>& z, double alpha) {
    std::vector<double> t = z;
    std::sort(t.begin(), t.end());
    const double k = 1.0 / (1.0 - alpha);
    auto obj = [&](double tt) {
        double acc = 0.0;
        for (std::size_t s = 0; s < z.size(); ++s) acc += p[s] * std::max(z[s] - tt, 0.0);
        return tt + k * acc;
    };
    double best = std::numeric_limits<double>::infinity();
    for (double tt : t) best = std::min(best, obj(tt));
    for (double tt : t)
        if (ties(obj(tt), best)) return tt;
    return t.front();
}

double oce(const std::vector<double>& p, const std::vector<double>& z, const PwlUtility& u) {
    return oce_scan(p, z, u).value;
}

double mu(const std::vector<double>& p, const std::vector<double>& z, const PwlUtility& u) {
    return oce_scan(p, z, u).largest_maximizer;
}

double variance(const std::vector<double>& p, const std::vector<double>& z) {
    const double m = expectation(p, z);
    double acc = 0.0;
    for (std::size_t s = 0; s < z.size(); ++s) acc += p[s] * (z[s] - m) * (z[s] - m);
    return acc;
}

double deviation(const std::vector<double>& p, const std::vector<double>& z, DeviationKind kind, const Center& c) {
    const double center = c.kind == CenterKind::mean   ? expectation(p, z)
                          : c.kind == CenterKind::cvar ? cvar(p, z, c.alpha)
                                                       : var(p, z, c.alpha);
    double acc = 0.0;
    for (std::size_t s = 0; s < z.size(); ++s) {
        const double r = z[s] - center;
        switch (kind) {
        case DeviationKind::sq:
        case DeviationKind::sqrt_sq: acc += p[s] * r * r; break;
        case DeviationKind::pos: acc += p[s] * std::max(r, 0.0); break;
        case DeviationKind::abs: acc += p[s] * std::abs(r); break;
        }
    }
    return kind == DeviationKind::sqrt_sq ? std::sqrt(acc) : acc;
}

} // namespace oracle

double risk_oracle(const MeasureSpec& spec, const RandomDcFunctional& rf, const Vector& x,
                   const std::optional<PwlUtility>& u) {
    const std::vector<double> z = rf.outcomes(x);
    const auto& p = rf.scenarios.p;
    using K = MeasureSpec::Kind;
    auto dev = [&](const DeviationSpec& d) {
        switch (d.kind) {
        case DeviationSpec::Kind::variance: return oracle::variance(p, z);
        case DeviationSpec::Kind::std: return std::sqrt(oracle::variance(p, z));
        case DeviationSpec::Kind::deviation: return oracle::deviation(p, z, d.dev, d.center);
        }
        return 0.0;
    };
    switch (spec.kind) {
    case K::expectation: return oracle::expectation(p, z);
    case K::cvar: return oracle::cvar(p, z, spec.alpha);
    case K::var: return oracle::var(p, z, spec.alpha);
    case K::oce: return oracle::oce(p, z, need_utility(u));
    case K::mu: return oracle::mu(p, z, need_utility(u));
    case K::variance: return oracle::variance(p, z);
    case K::std: return std::sqrt(oracle::variance(p, z));
    case K::deviation: return dev(spec.dev);
    case K::risk_lambda: return oracle::expectation(p, z) + spec.lambda * dev(spec.dev);
    }
    return 0.0;
}

} // namespace dcforge

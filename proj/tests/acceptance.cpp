// Acceptance run: one line per criterion, seed 42. Exit status is nonzero when a
// criterion fails, unless every failure is listed in kKnownDeviations (those lines
// still print FAIL, followed by the analysis).

#include "dcforge/cli.hpp"
#include "dcforge/errors.hpp"
#include "dcforge/folded.hpp"
#include "dcforge/io.hpp"
#include "dcforge/piecewise.hpp"
#include "dcforge/qp_value.hpp"
#include "dcforge/risk.hpp"
#include "dcforge/verification.hpp"

#include "instances.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace dcforge;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> notes;
    io::Json report = io::Json::object();
};

// Criterion id -> analysis printed under its FAIL line.
const std::map<int, std::vector<std::string>> kKnownDeviations = {
    {8,
     {"case (b)2, f(u) = sqrt(u+1): the half-line 1 + t/2 never meets sqrt(1-t) on t < 0.",
      "Squaring 1 - t = (1 + t/2)^2 gives t = -8, but there the line is -3 while sqrt(9) = 3,",
      "so t = -8 is a root of the squared equation only. The construction returns t*- = -inf",
      "(linear extension on all of t <= 0), and reconstruction still holds to 1e-8."}},
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

Vector pt(double x) { return Vector::Constant(1, x); }

void track(Outcome& o, const CheckReport& r) {
    o.pass = o.pass && r.pass;
    o.report[r.check] = io::report_json(r);
}

// Outcomes z_s + slope * x on [-1, 1].
RandomDcFunctional constants(std::vector<double> p, const std::vector<double>& z, double slope = 0.0) {
    std::vector<ConvexExpr> pe, qe;
    for (double v : z) {
        pe.push_back(ConvexExpr::affine(Vector::Constant(1, slope), v));
        qe.push_back(ConvexExpr::zero(1));
    }
    return RandomDcFunctional(ScenarioSet(std::move(p)), pe, qe, Domain::box(1, -1, 1));
}

RandomDcFunctional negated(const RandomDcFunctional& rf) {
    return RandomDcFunctional(rf.scenarios, rf.q, rf.p, rf.domain);
}

Outcome risk_equivalence() {
    Outcome o;
    Rng rng(kSeed);
    std::vector<std::string> base = {"cvar", "var", "oce", "mu", "variance", "std"};
    std::vector<std::string> devs;
    for (const char* k : {"sq", "sqrt_sq", "pos", "abs"})
        for (const char* c : {"mean", "cvar", "var"}) devs.push_back(std::string("dev:") + k + "@" + c);
    double worst = 0.0;
    int count = 0;
    std::string worst_at;
    for (int i = 0; i < 500; ++i) {
        const auto rf = inst::random_rf(rng);
        const auto u = inst::random_utility(rng);
        const double alpha = rng.uniform(0.05, 0.95);
        const std::string a = std::to_string(alpha);
        std::vector<std::string> ms;
        for (const auto& m : base) ms.push_back(m == "cvar" || m == "var" ? m + ":" + a : m);
        for (const auto& d : devs) ms.push_back(d.back() == 'n' ? d : d + ":" + a);
        for (const auto& m : ms) {
            const auto spec = parse_measure(m);
            const DcFunction f = build_measure(spec, rf, u);
            const auto r = check_dc_identity(m, f, [&](const Vector& x) { return risk_oracle(spec, rf, x, u); },
                                             kSeed + static_cast<std::uint64_t>(i), 20, 1e-7);
            ++count;
            if (r.max_violation > worst || std::isnan(r.max_violation)) worst = r.max_violation, worst_at = m;
            o.pass = o.pass && r.pass;
        }
    }
    o.detail = "500 instances, " + std::to_string(count) + " measure checks x 20 points, worst rel " + sci(worst) +
               " (" + worst_at + "), tol 1e-7";
    o.report = {{"checks", count}, {"worst", io::number(worst)}};
    return o;
}

Outcome var_cvar_linkage() {
    Outcome o;
    const auto rf = constants({0.5, 0.5}, {0.0, 1.0});
    const auto w = WPolytope::build(0.5, rf.scenarios.p);
    const bool one = w.vertices.size() == 1 && (w.vertices[0] - vec({1, 1})).cwiseAbs().maxCoeff() <= 1e-10;
    const double v = var_dc(rf, 0.5).value(pt(0)), c = cvar_dc(rf, 0.5).value(pt(0));
    o.pass = one && std::abs(v) <= 1e-10 && std::abs(c - 1.0) <= 1e-10;
    std::ostringstream s;
    s << w.vertices.size() << " vertex of W";
    if (!w.vertices.empty()) s << " (" << w.vertices[0][0] << ", " << w.vertices[0][1] << ")";
    s << ", VaR = " << v << ", CVaR = " << c << ", tol 1e-10";
    o.detail = s.str();
    o.report = {{"vertices", w.vertices.size()}, {"var", io::number(v)}, {"cvar", io::number(c)}};
    return o;
}

Outcome oce_specialization() {
    Outcome o;
    Rng rng(kSeed + 3);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto rf = inst::random_rf(rng);
        const double alpha = rng.uniform(0.05, 0.95);
        const DcFunction oce = oce_dc(rf, PwlUtility::cvar(alpha));
        const DcFunction cv = cvar_dc(negated(rf), alpha);
        const Vector x = rf.domain.sample(rng);
        const double lhs = oce.value(x), rhs = -cv.value(x);
        std::vector<double> negz = rf.outcomes(x);
        for (double& z : negz) z = -z;
        const double brute = -ref::cvar(rf.scenarios.p, negz, alpha);
        worst = std::max({worst, std::abs(lhs - rhs), std::abs(lhs - brute)});
    }
    o.pass = worst <= 1e-8;
    o.detail = "100 instances, max |O_u(Z) + CVaR(-Z)| " + sci(worst) + ", tol 1e-8";
    o.report = {{"worst", io::number(worst)}};
    return o;
}

Outcome deviation_identities() {
    Outcome o;
    Rng rng(kSeed + 4);
    double worst = 0.0;
    const Center mean{CenterKind::mean, 0.5};
    for (int i = 0; i < 100; ++i) {
        const auto rf = inst::random_rf(rng);
        const DcFunction ad = deviation_dc(rf, DeviationKind::abs, mean);
        const DcFunction asd = deviation_dc(rf, DeviationKind::pos, mean);
        for (int k = 0; k < 5; ++k) {
            const Vector x = rf.domain.sample(rng);
            worst = std::max(worst, std::abs(ad.value(x) - 2.0 * asd.value(x)));
        }
    }
    const auto z01 = constants({0.5, 0.5}, {0.0, 1.0});
    const Center cv{CenterKind::cvar, 0.5};
    const double abs_c = deviation_dc(z01, DeviationKind::abs, cv).value(pt(0));
    const double pos_c = deviation_dc(z01, DeviationKind::pos, cv).value(pt(0));
    const bool broken = std::abs(abs_c - 0.5) <= 1e-10 && std::abs(pos_c) <= 1e-10;
    o.pass = worst <= 1e-9 && broken;
    o.detail = "mean center max |AD - 2 ASD| " + sci(worst) + " (tol 1e-9); CVaR center on Z in {0,1}: abs = " +
               std::to_string(abs_c) + ", 2 pos = " + std::to_string(2 * pos_c);
    o.report = {{"worst", io::number(worst)}, {"abs_cvar", io::number(abs_c)}, {"pos_cvar", io::number(pos_c)}};
    return o;
}

Outcome qp_value() {
    Outcome o;
    Rng rng(kSeed + 5);
    const QpInstance scalar(Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 1.0));
    const QpInstance swap((Matrix(2, 2) << 0, 1, 1, 0).finished(), Matrix::Identity(2, 2));
    double brute_err = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Vector q = vec({rng.uniform(-2, 2)}), b = vec({rng.uniform(-2, 2)});
        const double brute = ref::qp_grid(scalar.Q(), scalar.D(), q, b, b, b + Vector::Constant(1, 5.0), 1e-3);
        brute_err = std::max(brute_err, std::abs(qp_solve(scalar, q, b).value - brute));
    }
    for (int i = 0; i < 5; ++i) {
        const Vector b = vec({rng.uniform(-0.5, 1), rng.uniform(-0.5, 1)});
        const Vector q = vec({rng.uniform(-b[1], 1), rng.uniform(-b[0], 1)});
        const double brute = ref::qp_grid(swap.Q(), swap.D(), q, b, b, b + Vector::Constant(2, 2.0), 1e-3);
        brute_err = std::max(brute_err, std::abs(qp_solve(swap, q, b).value - brute));
    }

    // (q, b) grids: full plane for the scalar QP, a (q1, b1) slice for the swap QP.
    const Domain scalar_region = Domain::box(2, -2, 2);
    const Domain swap_region = Domain::box(vec({0.5, 0.5, -0.5, -0.5}), vec({1, 1, 1, 1}));
    double piece_err = 0.0, dc_err = 0.0;
    for (const auto& [inst, region] : {std::pair{&scalar, scalar_region}, std::pair{&swap, swap_region}}) {
        const auto pieces = enumerate_pieces(*inst, region);
        const DcFunction f = value_dc(*inst, region, kSeed);
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j) {
                const double s = i / 19.0, t = j / 19.0;
                const Vector y = inst->m() == 1 ? vec({-2 + 4 * s, -2 + 4 * t}) : vec({0.5 + 0.5 * s, 0.8, -0.5 + 1.5 * t, 0.2});
                const double v = qp_solve(*inst, inst->q_of(y), inst->b_of(y)).value;
                piece_err = std::max(piece_err, std::abs(min_of_pieces(pieces, y) - v));
                dc_err = std::max(dc_err, std::abs(f.value(y) - v));
            }
        for (const auto& r : check_components(inst->m() == 1 ? "qp.scalar" : "qp.swap", f, kSeed)) track(o, r);
    }
    o.pass = o.pass && brute_err <= 1e-4 && piece_err <= 1e-6 && dc_err <= 1e-6;
    o.detail = "solve vs grid " + sci(brute_err) + " (tol 1e-4), pieces vs solve " + sci(piece_err) +
               " (tol 1e-6), value_dc vs solve " + sci(dc_err) + " (tol 1e-6), components convex: " +
               (o.report.size() == 4 && o.pass ? "yes" : "see report");
    o.report["brute"] = io::number(brute_err);
    o.report["pieces"] = io::number(piece_err);
    o.report["dc"] = io::number(dc_err);
    return o;
}

Outcome eaves_domain() {
    Outcome o;
    const QpInstance lp(Matrix::Zero(1, 1), Matrix::Constant(1, 1, 1.0));
    Rng rng(kSeed + 6);
    int wrong = 0;
    for (int i = 0; i < 200; ++i) {
        const double q = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
        if (dom_membership(lp, pt(q), pt(b)) != (q >= 0)) ++wrong;
    }
    o.pass = wrong == 0;
    o.detail = "200 random (q, b) for Q = 0, D = 1: " + std::to_string(wrong) + " misclassified";
    o.report = {{"misclassified", wrong}};
    return o;
}

Outcome piecewise_min() {
    Outcome o;
    const auto half = [](double s, double r) { return Polyhedron(Matrix::Constant(1, 1, s), pt(r)); };
    const PiecewiseLc1 abs_pw({QuadraticPiece::affine(pt(1), 0), QuadraticPiece::affine(pt(-1), 0)},
                              {half(-1, 0), half(1, 0)}, Domain::box(1, -2, 2));
    const PiecewiseLc1 sq_pw({{Matrix::Constant(1, 1, 2), pt(0), 0}, {Matrix::Constant(1, 1, 2), pt(-2), 1}},
                             {half(1, 0.5), half(-1, -0.5)}, Domain::box(1, -1, 2));
    double recon = 0.0, major = 0.0;
    for (const auto* pw : {&abs_pw, &sq_pw}) {
        const auto rep = build_min_representation(*pw, kSeed);
        Rng rng(kSeed + 7);
        for (int k = 0; k < 1000; ++k) {
            const Vector x = pw->sample_union(rng);
            const double th = pw->value(x);
            recon = std::max(recon, std::abs(rep.theta.value(x) - th));
            for (const auto& psi : rep.psi) major = std::max(major, th - psi.value(x));
        }
    }
    Rng rng(kSeed + 8);
    double pwa = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const double b1 = rng.uniform(-0.8, 0.2), b2 = rng.uniform(b1 + 0.1, 0.9);
        std::vector<double> breaks{b1, b2};
        std::vector<AffinePiece> pieces;
        double slope = rng.uniform(-3, 3), icpt = rng.uniform(-1, 1);
        pieces.push_back({pt(slope), icpt});
        for (double b : breaks) {
            const double next = rng.uniform(-3, 3);
            icpt += (slope - next) * b;
            slope = next;
            pieces.push_back({pt(slope), icpt});
        }
        const std::vector<Polyhedron> regions{Polyhedron::box(pt(-1), pt(b1)), Polyhedron::box(pt(b1), pt(b2)),
                                              Polyhedron::box(pt(b2), pt(1))};
        const DcFunction f = pwa_min_representation(pieces, regions, Domain::box(1, -1, 1), kSeed);
        for (int k = 0; k < 200; ++k) {
            const double x = rng.uniform(-1, 1);
            const int i = x <= b1 ? 0 : (x <= b2 ? 1 : 2);
            const double direct = pieces[i].a[0] * x + pieces[i].alpha;
            pwa = std::max(pwa, std::abs(f.value(pt(x)) - direct));
        }
    }
    o.pass = recon <= 1e-8 && major <= 1e-12 && pwa <= 1e-8;
    o.detail = "reconstruction " + sci(recon) + " (tol 1e-8), max(theta - psi_i) " + sci(major) +
               ", 50 random PWAs max error " + sci(pwa);
    o.report = {{"reconstruction", io::number(recon)}, {"majorization", io::number(major)}, {"pwa", io::number(pwa)}};
    return o;
}

Outcome folded_cases() {
    Outcome o;
    std::vector<std::string> failed;
    const auto a = decompose(make_folded("fig1a"));
    bool concave = a.kase == 'a';
    for (double t = -10; t <= 10; t += 0.5) concave = concave && a.dc.components(pt(t)).first == 0.0;
    if (!concave) failed.push_back("case (a) not purely concave");
    const auto b1 = decompose(make_folded("fig1b1"));
    if (!(std::abs(b1.t_minus + 4) <= 1e-8 && std::abs(b1.t_plus - 4) <= 1e-8)) failed.push_back("case (b)1 roots");
    const auto b2 = decompose(make_folded("fig1b2"));
    if (!(std::abs(b2.t_minus + 8) <= 1e-8)) failed.push_back("case (b)2 t*- = " + sci(b2.t_minus) + ", expected -8");
    double recon = 0.0;
    for (const std::string id : {"fig1a", "fig1b1", "fig1b2"}) {
        const auto spec = make_folded(id);
        const auto d = id == "fig1a" ? a : (id == "fig1b1" ? b1 : b2);
        Rng rng(kSeed + 9);
        for (int k = 0; k < 1000; ++k) {
            const double t = rng.uniform(-10, 10);
            recon = std::max(recon, std::abs(d.dc.value(pt(t)) - spec.f(std::abs(t))));
        }
    }
    if (recon > 1e-8) failed.push_back("reconstruction " + sci(recon));
    bool rejected = false;
    try {
        decompose(make_folded("sqrtabs"));
    } catch (const NotDcError&) {
        rejected = true;
    }
    if (!rejected) failed.push_back("sqrt|t| accepted");
    o.pass = failed.empty();
    std::ostringstream s;
    s << "(a) case " << a.kase << "; (b)1 t = " << b1.t_minus << ", " << b1.t_plus << "; (b)2 t = " << b2.t_minus
      << ", " << b2.t_plus << "; reconstruction " << sci(recon) << "; sqrt|t| "
      << (rejected ? "NotDcError" : "accepted");
    for (const auto& f : failed) s << "; FAILED: " << f;
    o.detail = s.str();
    o.report = {{"b1", {io::number(b1.t_minus), io::number(b1.t_plus)}},
                {"b2", {io::number(b2.t_minus), io::number(b2.t_plus)}},
                {"reconstruction", io::number(recon)}};
    return o;
}

Outcome determinism(const std::vector<std::function<Outcome()>>& cheap) {
    Outcome o;
    auto suite = [] {
        std::ostringstream out, err;
        cli::run({"dcforge", "verify-suite", "--json", "--seed", "42"}, out, err);
        return out.str();
    };
    const std::string s1 = suite(), s2 = suite();
    bool same = s1 == s2 && !s1.empty();
    for (const auto& c : cheap) same = same && c().report.dump() == c().report.dump();
    o.pass = same;
    o.detail = std::string("verify-suite JSON (") + std::to_string(s1.size()) + " bytes) and criteria 2-8 reports " +
               (same ? "byte-identical" : "differ") + " across runs";
    return o;
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"risk oracle equivalence", risk_equivalence},
        {"VaR-CVaR linkage", var_cvar_linkage},
        {"OCE specialization", oce_specialization},
        {"deviation identities", deviation_identities},
        {"QP value function", qp_value},
        {"dom membership", eaves_domain},
        {"piecewise min-representation", piecewise_min},
        {"folded concave", folded_cases},
    };
    std::vector<std::function<Outcome()>> cheap;
    for (std::size_t i = 1; i < criteria.size(); ++i) cheap.push_back(criteria[i].second);

    int unexpected = 0, red = 0;
    auto emit = [&](int id, const std::string& name, const Outcome& o) {
        const auto known = kKnownDeviations.find(id);
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << o.detail << "\n";
        if (!o.pass) {
            ++red;
            if (known == kKnownDeviations.end()) ++unexpected;
            else
                for (const auto& line : known->second) std::cout << "      known deviation: " << line << "\n";
        }
        std::cout.flush();
    };
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        emit(static_cast<int>(i + 1), criteria[i].first, o);
    }
    emit(9, "determinism", determinism(cheap));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "summary: " << (9 - red) << "/9 pass, " << red << " red (" << (red - unexpected)
              << " known deviation), " << sci(secs) << " s\n";
    return unexpected == 0 ? 0 : 1;
}

#include "dcforge/cli.hpp"

#include "dcforge/errors.hpp"
#include "dcforge/folded.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <typeinfo>

namespace dcforge::cli {

namespace {

using io::Json;

struct Outcome {
    Json input;
    Json results = Json::object();
    std::vector<CheckReport> checks;
};

int samples_or(const RunConfig& cfg, int fallback) { return cfg.samples.value_or(fallback); }
double tol_or(const RunConfig& cfg, double fallback) { return cfg.tol.value_or(fallback); }

std::string error_type(const Error& e) {
#define DCFORGE_NAME(T) \
    if (dynamic_cast<const T*>(&e)) return #T
    DCFORGE_NAME(NotDcError);
    DCFORGE_NAME(DomainError);
    DCFORGE_NAME(UnboundedDomainError);
    DCFORGE_NAME(UnboundedAuxiliary);
    DCFORGE_NAME(CertificationError);
    DCFORGE_NAME(ScaleError);
    DCFORGE_NAME(EmptyPolyhedron);
    DCFORGE_NAME(NotInDomain);
    DCFORGE_NAME(FailedCopositivity);
    DCFORGE_NAME(NotPositiveDefinite);
    DCFORGE_NAME(RegionNotInDomain);
    DCFORGE_NAME(PieceNotQuadratic);
    DCFORGE_NAME(EmptyRegion);
    DCFORGE_NAME(NonConvexUnion);
    DCFORGE_NAME(ArgumentError);
    DCFORGE_NAME(ParseError);
#undef DCFORGE_NAME
    return "Error";
}

CheckReport flag_check(const std::string& name, bool ok, std::uint64_t seed) {
    CheckReport r;
    r.check = name;
    r.trials = 1;
    r.max_violation = ok ? 0.0 : 1.0;
    r.tol = 0.0;
    r.pass = ok;
    r.seed = seed;
    return r;
}

/// parse -> serialize -> parse -> serialize must be a fixed point.
template <class Parse, class Serialize>
Json roundtrip(const Json& raw, Parse parse, Serialize serialize, std::vector<CheckReport>& checks, std::uint64_t seed) {
    const Json first = serialize(parse(raw));
    const Json second = serialize(parse(first));
    checks.push_back(flag_check("input.roundtrip", first.dump() == second.dump(), seed));
    return first;
}

Json dc_summary(const DcFunction& f) {
    return {{"g", std::string(f.g().kind_name())}, {"h", std::string(f.h().kind_name())},
            {"g_nodes", node_count(f.g())}, {"h_nodes", node_count(f.h())}};
}

void append(std::vector<CheckReport>& dst, std::vector<CheckReport> src) {
    for (auto& r : src) dst.push_back(std::move(r));
}

std::string normalize_measure(const std::string& m, const RunConfig& cfg) {
    auto fmt = [](double v) {
        std::ostringstream s;
        s << std::setprecision(17) << v;
        return s.str();
    };
    if (m == "cvar" || m == "var") return m + ":" + fmt(cfg.alpha);
    if (m == "Rlambda") return "Rlambda:" + fmt(cfg.lambda) + ":variance";
    if (m.rfind("Rlambda:", 0) == 0) {
        const std::string rest = m.substr(8);
        const bool numeric = !rest.empty() && (std::isdigit(static_cast<unsigned char>(rest[0])) || rest[0] == '.');
        if (!numeric) return "Rlambda:" + fmt(cfg.lambda) + ":" + rest;
    }
    return m;
}

// ---------------------------------------------------------------------------

Outcome risk_command(const RunConfig& cfg) {
    if (cfg.in.empty()) throw ParseError("risk: --in is required");
    Outcome o;
    const Json raw = io::read_file(cfg.in);
    o.input = roundtrip(raw, io::scenario_from, io::scenario_json, o.checks, cfg.seed);
    const io::ScenarioFile sf = io::scenario_from(raw);
    const auto& rf = sf.rf;
    if (!rf.domain.bounded()) throw ParseError("risk: the scenario domain must be bounded");
    std::vector<std::string> measures = cfg.measures;
    if (measures.empty()) measures = {"expectation", "cvar", "var", "variance", "std"};
    const PwlUtility u = sf.utility.value_or(PwlUtility::cvar(cfg.alpha));

    Json list = Json::array();
    Rng rng(cfg.seed);
    std::vector<Vector> points;
    for (int i = 0; i < 5; ++i) points.push_back(rf.domain.sample(rng));
    for (const auto& m : measures) {
        const MeasureSpec spec = parse_measure(normalize_measure(m, cfg));
        const DcFunction dc = build_measure(spec, rf, u);
        Json pts = Json::array();
        for (const auto& x : points)
            pts.push_back({{"x", io::vector_json(x)}, {"value", io::number(dc.value(x))},
                           {"oracle", io::number(risk_oracle(spec, rf, x, u))}});
        Json entry = {{"measure", spec.text}, {"decomposition", dc_summary(dc)}, {"points", pts}};
        list.push_back(entry);
        if (cfg.verify) {
            o.checks.push_back(check_dc_identity(
                spec.text + ".oracle", dc, [&](const Vector& x) { return risk_oracle(spec, rf, x, u); }, cfg.seed,
                samples_or(cfg, 200), tol_or(cfg, 1e-7)));
            append(o.checks, check_components(spec.text, dc, cfg.seed, samples_or(cfg, 200), 1e-8));
        }
    }
    o.results["measures"] = list;
    return o;
}

std::vector<Vector> grid_points(const Domain& region, int m, int n_q, int n_b) {
    const Vector lo = region.lower(), hi = region.upper();
    const int d = static_cast<int>(lo.size());
    std::vector<int> counts(d);
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) {
        counts[i] = i < m ? n_q : n_b;
        total *= static_cast<std::size_t>(counts[i]);
        if (total > 200000) throw ParseError("query: grid exceeds 200000 points");
    }
    std::vector<Vector> out;
    std::vector<int> idx(d, 0);
    for (std::size_t t = 0; t < total; ++t) {
        Vector y(d);
        for (int i = 0; i < d; ++i)
            y[i] = counts[i] == 1 ? 0.5 * (lo[i] + hi[i]) : lo[i] + (hi[i] - lo[i]) * idx[i] / (counts[i] - 1);
        if (region.contains(y)) out.push_back(y);
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[i] < counts[i]) break;
            idx[i] = 0;
        }
    }
    return out;
}

Json face_json(const QpFace& f) {
    return {{"active", f.active}, {"z", io::vector_json(f.z)}, {"eta", io::vector_json(f.eta)}};
}

Outcome qp_command(const RunConfig& cfg) {
    if (cfg.in.empty()) throw ParseError("qp: --in is required");
    if (cfg.query.empty()) throw ParseError("qp: --query is required");
    Outcome o;
    const Json raw = io::read_file(cfg.in);
    const Json raw_query = io::read_file(cfg.query);
    const Json qp_in = roundtrip(raw, io::qp_from, io::qp_json, o.checks, cfg.seed);
    const Json q_in = io::query_json(io::query_from(io::query_json(io::query_from(raw_query))));
    o.checks.push_back(flag_check("query.roundtrip", q_in.dump() == io::query_json(io::query_from(raw_query)).dump(), cfg.seed));
    o.input = {{"qp", qp_in}, {"query", q_in}};
    const io::QpFile file = io::qp_from(raw);
    const io::QpQuery query = io::query_from(raw_query);
    const QpInstance inst(file.Q, file.D, cfg.seed);
    Json cop = {{"pass", inst.verdict().pass()}};
    if (inst.verdict().witness) cop["witness"] = io::vector_json(*inst.verdict().witness);
    o.results["copositive"] = cop;

    if (query.q) {
        if (query.q->size() != inst.m() || query.b->size() != inst.k())
            throw ParseError("query: q and b must match the columns and rows of D");
        const bool in_dom = dom_membership(inst, *query.q, *query.b);
        Json point = {{"q", io::vector_json(*query.q)}, {"b", io::vector_json(*query.b)}, {"in_dom", in_dom}};
        if (in_dom) {
            const QpSolution sol = qp_solve(inst, *query.q, *query.b);
            point["value"] = io::number(sol.value);
            Json faces = Json::array();
            double resid = 0.0;
            for (const auto& f : sol.faces) {
                faces.push_back(face_json(f));
                resid = std::max(resid, kkt_residual(inst, *query.q, *query.b, f));
            }
            point["faces"] = faces;
            CheckReport r = flag_check("qp.kkt_residual", resid <= tol_or(cfg, 1e-7), cfg.seed);
            r.max_violation = resid;
            r.tol = tol_or(cfg, 1e-7);
            o.checks.push_back(r);
        }
        o.results["point"] = point;
    }

    if (query.region) {
        const Domain& region = *query.region;
        if (region.dim() != inst.param_dim()) throw ParseError("query: region dimension must equal m + k");
        if (!region.bounded()) throw ParseError("query: region must be bounded");
        const auto pieces = enumerate_pieces(inst, region);
        Json table = Json::array();
        for (const auto& p : pieces)
            table.push_back({{"active", p.active}, {"A", io::matrix_json(p.value.A)}, {"a", io::vector_json(p.value.a)},
                             {"c", io::number(p.value.c)}});
        o.results["pieces"] = table;
        const auto pts = grid_points(region, inst.m(), query.grid[0], query.grid[1]);
        CheckReport r;
        r.check = "qp.pieces_vs_solve";
        r.tol = tol_or(cfg, 1e-6);
        r.seed = cfg.seed;
        int used = 0;
        for (const auto& y : pts) {
            const Vector q = inst.q_of(y), b = inst.b_of(y);
            if (!dom_membership(inst, q, b)) continue;
            ++used;
            const double v = qp_solve(inst, q, b).value;
            const double err = std::abs(min_of_pieces(pieces, y) - v) / (1.0 + std::abs(v));
            if (!(err <= r.max_violation)) {
                r.max_violation = err;
                r.witness.assign(y.data(), y.data() + y.size());
            }
        }
        r.trials = used;
        r.pass = r.max_violation <= r.tol;
        o.checks.push_back(r);
        o.results["grid_points"] = used;

        if (cfg.dc) {
            const DcFunction dc = value_dc(inst, region, cfg.seed);
            o.results["value_dc"] = dc_summary(dc);
            append(o.checks, check_components("qp.value_dc", dc, cfg.seed, samples_or(cfg, 1000), 1e-8));
            o.checks.push_back(check_dc_identity(
                "qp.value_dc.identity", dc,
                [&](const Vector& y) { return qp_solve(inst, inst.q_of(y), inst.b_of(y)).value; }, cfg.seed,
                samples_or(cfg, 200), tol_or(cfg, 1e-6)));
        }
    }
    return o;
}

Outcome recourse_command(const RunConfig& cfg) {
    if (cfg.in.empty()) throw ParseError("recourse: --in is required");
    Outcome o;
    const Json raw = io::read_file(cfg.in);
    o.input = roundtrip(raw, io::recourse_from, io::recourse_json, o.checks, cfg.seed);
    const io::RecourseFile file = io::recourse_from(raw);
    if (!file.x_region.bounded()) throw ParseError("recourse: x_region must be bounded");
    const QpInstance inst(file.qp.Q, file.qp.D, cfg.seed);
    Json list = Json::array();
    for (std::size_t s = 0; s < file.scenarios.size(); ++s) {
        const auto& sc = file.scenarios[s];
        const DcFunction dc = recourse_dc(inst, sc, file.x_region, cfg.seed);
        auto direct = [&](const Vector& x) { return qp_solve(inst, sc.f + sc.G * x, sc.xi - sc.C * x).value; };
        const std::string name = "recourse[" + std::to_string(s) + "]";
        Rng rng(cfg.seed);
        Json pts = Json::array();
        for (int i = 0; i < 5; ++i) {
            const Vector x = file.x_region.sample(rng);
            pts.push_back({{"x", io::vector_json(x)}, {"value", io::number(dc.value(x))}, {"direct", io::number(direct(x))}});
        }
        list.push_back({{"scenario", s}, {"decomposition", dc_summary(dc)}, {"points", pts}});
        o.checks.push_back(check_dc_identity(name + ".identity", dc, direct, cfg.seed, samples_or(cfg, 200), tol_or(cfg, 1e-6)));
        append(o.checks, check_components(name, dc, cfg.seed, samples_or(cfg, 500), 1e-8));
    }
    o.results["scenarios"] = list;
    return o;
}

std::vector<CheckReport> piecewise_checks(const PiecewiseLc1& pw, const MinRepresentation& rep, const std::string& name,
                                          std::uint64_t seed, int samples, double tol) {
    std::vector<CheckReport> out;
    auto draw = [&](Rng& r) { return pw.sample_union(r); };
    out.push_back(check_sampled(name + ".identity", samples, tol, seed, draw, [&](const Vector& x) {
        const double ref = pw.value(x);
        return std::abs(rep.theta.value(x) - ref) / (1.0 + std::abs(ref));
    }));
    out.push_back(check_sampled(name + ".majorization", samples, tol, seed, draw, [&](const Vector& x) {
        const double th = pw.value(x);
        double worst = 0.0;
        for (const auto& psi : rep.psi) worst = std::max(worst, (th - psi.value(x)) / (1.0 + std::abs(th)));
        return worst;
    }));
    append(out, check_components(name + ".theta", rep.theta, seed, samples, 1e-8));
    out.push_back(check_boundary_agreement(pw, seed));
    out.back().check = name + ".boundary_agreement";
    out.push_back(check_selection(pw, seed));
    out.back().check = name + ".selection";
    out.push_back(check_lc1_bound(name + ".lc1", pw.pieces(), pw.moduli(), pw.domain(), seed));
    return out;
}

Outcome piecewise_command(const RunConfig& cfg) {
    if (cfg.in.empty()) throw ParseError("piecewise: --in is required");
    Outcome o;
    const Json raw = io::read_file(cfg.in);
    o.input = roundtrip(raw, io::piecewise_from, io::piecewise_json, o.checks, cfg.seed);
    const io::PiecewiseFile file = io::piecewise_from(raw);
    const PiecewiseLc1 pw(file.pieces, file.regions, file.domain);
    const MinRepresentation rep = build_min_representation(pw, cfg.seed);
    Json psi = Json::array();
    for (int i = 0; i < pw.size(); ++i)
        psi.push_back({{"piece", i}, {"modulus", io::number(pw.piece_modulus(i))}, {"decomposition", dc_summary(rep.psi[i])}});
    o.results["psi"] = psi;
    o.results["theta"] = dc_summary(rep.theta);
    append(o.checks, piecewise_checks(pw, rep, "piecewise", cfg.seed, samples_or(cfg, 1000), tol_or(cfg, 1e-8)));

    const bool affine = std::all_of(file.pieces.begin(), file.pieces.end(), [](const QuadraticPiece& p) { return p.is_affine(); });
    if (affine) {
        std::vector<AffinePiece> ap;
        for (const auto& p : file.pieces) ap.push_back(AffinePiece{p.a, p.c});
        const DcFunction pwa = pwa_min_representation(ap, file.regions, file.domain, cfg.seed);
        o.results["pwa"] = dc_summary(pwa);
        o.checks.push_back(check_sampled("piecewise.pwa_identity", samples_or(cfg, 1000), tol_or(cfg, 1e-8), cfg.seed,
                                         [&](Rng& r) { return pw.sample_union(r); }, [&](const Vector& x) {
                                             const double ref = pw.value(x);
                                             return std::abs(pwa.value(x) - ref) / (1.0 + std::abs(ref));
                                         }));
    }
    return o;
}

Outcome folded_command(const RunConfig& cfg) {
    if (cfg.penalty.empty()) throw ParseError("folded: --penalty is required");
    Outcome o;
    o.input = {{"penalty", cfg.penalty}, {"width", io::number(cfg.width)}};
    const FoldedSpec spec = make_folded(cfg.penalty, cfg.width);
    const FoldedSpec again = make_folded(spec.name, spec.T);
    bool same = again.name == spec.name && again.T == spec.T;
    for (int i = 0; i <= 100 && same; ++i) {
        const double u = spec.T * i / 100.0;
        same = again.f(u) == spec.f(u) || (std::isnan(again.f(u)) && std::isnan(spec.f(u)));
    }
    o.checks.push_back(flag_check("input.roundtrip", same, cfg.seed));
    const FoldedDecomposition d = decompose(spec);
    o.results["case"] = std::string(1, d.kase);
    o.results["derivative"] = io::number(d.derivative);
    o.results["t_minus"] = io::number(d.t_minus);
    o.results["t_plus"] = io::number(d.t_plus);
    o.results["decomposition"] = dc_summary(d.dc);
    Json ts = Json::array(), vals = Json::array();
    for (int i = 0; i <= 20; ++i) {
        const double t = -spec.T + spec.T * i / 10.0;
        Vector x(1);
        x[0] = t;
        ts.push_back(io::number(t));
        vals.push_back(io::number(d.dc.value(x)));
    }
    o.results["curve"] = {{"t", ts}, {"theta", vals}};
    append(o.checks, folded_checks(spec, d, cfg.seed, samples_or(cfg, 1000), tol_or(cfg, 1e-8)));
    return o;
}

Outcome suite_command(const RunConfig& cfg) {
    Outcome o;
    o.input = Json::object();
    o.checks = verification_suite(cfg.seed, cfg.samples, cfg.tol);
    return o;
}

} // namespace

std::vector<CheckReport> verification_suite(std::uint64_t seed, std::optional<int> samples, std::optional<double> tol) {
    std::vector<CheckReport> out;
    const int n = samples.value_or(200);

    // Two equally likely outcomes 0 and 1, shifted by x on [-1, 1].
    const Domain line = Domain::box(1, -1.0, 1.0);
    std::vector<ConvexExpr> pe, qe;
    for (double z : {0.0, 1.0}) {
        pe.push_back(ConvexExpr::affine(Vector::Ones(1), z));
        qe.push_back(ConvexExpr::zero(1));
    }
    const RandomDcFunctional rf(ScenarioSet({0.5, 0.5}), pe, qe, line);
    const PwlUtility u = PwlUtility::cvar(0.5);
    for (const std::string m : {"expectation", "cvar:0.5", "var:0.5", "oce", "mu", "variance", "std", "dev:abs@mean",
                                "dev:pos@cvar:0.5", "Rlambda:0.5:variance"}) {
        const MeasureSpec spec = parse_measure(m);
        const DcFunction dc = build_measure(spec, rf, u);
        out.push_back(check_dc_identity("risk." + m + ".oracle", dc,
                                        [&](const Vector& x) { return risk_oracle(spec, rf, x, u); }, seed, n,
                                        tol.value_or(1e-7)));
        append(out, check_components("risk." + m, dc, seed, n, 1e-8));
    }

    Matrix Q(1, 1), D(1, 1);
    Q(0, 0) = 2.0;
    D(0, 0) = 1.0;
    const QpInstance inst(Q, D, seed);
    const Domain region = Domain::box(2, -2.0, 2.0);
    const DcFunction vdc = value_dc(inst, region, seed);
    out.push_back(check_dc_identity("qp.value_dc.identity", vdc,
                                    [&](const Vector& y) { return qp_solve(inst, inst.q_of(y), inst.b_of(y)).value; },
                                    seed, n, tol.value_or(1e-6)));
    append(out, check_components("qp.value_dc", vdc, seed, n, 1e-8));

    const Domain wide = Domain::box(1, -2.0, 2.0);
    Matrix neg(1, 1), pos(1, 1);
    neg(0, 0) = -1.0;
    pos(0, 0) = 1.0;
    Vector zero = Vector::Zero(1);
    const PiecewiseLc1 absval({QuadraticPiece{Matrix::Zero(1, 1), -Vector::Ones(1), 0.0},
                               QuadraticPiece{Matrix::Zero(1, 1), Vector::Ones(1), 0.0}},
                              {Polyhedron(pos, zero), Polyhedron(neg, zero)}, wide);
    append(out, piecewise_checks(absval, build_min_representation(absval, seed), "piecewise.abs", seed, n,
                                 tol.value_or(1e-8)));

    const FoldedSpec fs = make_folded("fig1b1");
    append(out, folded_checks(fs, decompose(fs), seed, n, tol.value_or(1e-8)));

    return merge_reports(std::move(out));
}

io::Json execute(const RunConfig& cfg) {
    Json report;
    report["subcommand"] = cfg.subcommand;
    report["seed"] = cfg.seed;
    Outcome o;
    try {
        if (cfg.subcommand == "risk") o = risk_command(cfg);
        else if (cfg.subcommand == "qp") o = qp_command(cfg);
        else if (cfg.subcommand == "recourse") o = recourse_command(cfg);
        else if (cfg.subcommand == "piecewise") o = piecewise_command(cfg);
        else if (cfg.subcommand == "folded") o = folded_command(cfg);
        else if (cfg.subcommand == "verify-suite") o = suite_command(cfg);
        else throw ParseError("unknown subcommand '" + cfg.subcommand + "'");
    } catch (const ParseError&) {
        throw;
    } catch (const ArgumentError&) {
        throw;
    } catch (const Error& e) {
        report["input"] = o.input;
        report["status"] = "rejected";
        report["error"] = {{"type", error_type(e)}, {"message", e.what()}};
        report["checks"] = Json::array();
        return report;
    }
    o.checks = merge_reports(std::move(o.checks));
    report["input"] = o.input;
    report["results"] = o.results;
    Json checks = Json::array();
    for (const auto& c : o.checks) checks.push_back(io::report_json(c));
    report["checks"] = checks;
    report["status"] = all_pass(o.checks) ? "pass" : "fail";
    return report;
}

namespace {

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
    } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
    } else {
        rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
    }
}

} // namespace

std::string format_table(const io::Json& report) {
    std::ostringstream s;
    s << std::left;
    s << std::setw(40) << "subcommand" << report.value("subcommand", "") << '\n';
    s << std::setw(40) << "seed" << report.value("seed", std::uint64_t{0}) << '\n';
    s << std::setw(40) << "status" << report.value("status", "") << '\n';
    if (report.contains("error")) {
        s << std::setw(40) << "error.type" << report["error"]["type"].get<std::string>() << '\n';
        s << std::setw(40) << "error.message" << report["error"]["message"].get<std::string>() << '\n';
    }
    if (report.contains("results")) {
        std::vector<std::pair<std::string, std::string>> rows;
        flatten(report["results"], "", rows);
        if (!rows.empty()) s << '\n' << std::setw(40) << "result" << "value" << '\n';
        for (const auto& [k, v] : rows) s << std::setw(40) << k << v << '\n';
    }
    const auto& checks = report["checks"];
    if (!checks.empty()) {
        s << '\n'
          << std::setw(44) << "check" << std::setw(8) << "trials" << std::setw(16) << "max_violation" << std::setw(10)
          << "tol" << std::setw(6) << "pass" << "seed" << '\n';
        for (const auto& c : checks) {
            auto num = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
            std::ostringstream viol;
            if (c["max_violation"].is_number())
                viol << std::scientific << std::setprecision(3) << c["max_violation"].get<double>();
            else
                viol << num(c["max_violation"]);
            std::ostringstream tl;
            if (c["tol"].is_number()) tl << std::scientific << std::setprecision(1) << c["tol"].get<double>();
            else tl << num(c["tol"]);
            s << std::setw(44) << c["check"].get<std::string>() << std::setw(8) << c["trials"].get<int>()
              << std::setw(16) << viol.str() << std::setw(10) << tl.str() << std::setw(6)
              << (c["pass"].get<bool>() ? "yes" : "NO") << c["seed"].get<std::uint64_t>() << '\n';
        }
    }
    return s.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"dc decompositions: construction and numerical verification", "dcforge"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::optional<double> tol;
    std::optional<int> samples;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "write the JSON report to this path");
        sub->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
        sub->add_option("--tol", tol, "tolerance override for identity checks");
        sub->add_option("--samples", samples, "sample count override")->check(CLI::PositiveNumber);
        sub->add_flag("--json", cfg.json, "print the JSON report instead of the table");
    };
    CLI::App* risk = app.add_subcommand("risk", "risk and deviation measures of a scenario file");
    common(risk);
    risk->add_option("--in", cfg.in, "scenario file")->required()->check(CLI::ExistingFile);
    risk->add_option("--measure", cfg.measures, "measure spec (repeatable)");
    risk->add_option("--alpha", cfg.alpha, "level for bare cvar/var and the default utility")->capture_default_str();
    risk->add_option("--lambda", cfg.lambda, "weight for bare Rlambda")->capture_default_str();
    risk->add_flag("--verify", cfg.verify, "check decompositions against the oracles");

    CLI::App* qp = app.add_subcommand("qp", "value function of a parametric QP");
    common(qp);
    qp->add_option("--in", cfg.in, "QP file")->required()->check(CLI::ExistingFile);
    qp->add_option("--query", cfg.query, "query file")->required()->check(CLI::ExistingFile);
    qp->add_flag("--dc", cfg.dc, "build and verify the dc decomposition on the query region");

    CLI::App* rec = app.add_subcommand("recourse", "two-stage recourse functions");
    common(rec);
    rec->add_option("--in", cfg.in, "recourse file")->required()->check(CLI::ExistingFile);

    CLI::App* pw = app.add_subcommand("piecewise", "min-representation of a piecewise function");
    common(pw);
    pw->add_option("--in", cfg.in, "piecewise file")->required()->check(CLI::ExistingFile);

    CLI::App* fo = app.add_subcommand("folded", "folded concave penalties");
    common(fo);
    fo->add_option("--penalty", cfg.penalty, "catalog id or expression in u")->required();
    fo->add_option("--width", cfg.width, "half-width T of the working interval")->capture_default_str();

    CLI::App* vs = app.add_subcommand("verify-suite", "fixed reference checks over every module");
    common(vs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "dcforge: error: " << e.what() << '\n';
        return 2;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.tol = tol;
    cfg.samples = samples;

    Json report;
    try {
        report = execute(cfg);
    } catch (const ParseError& e) {
        err << "dcforge: input error: " << e.what() << '\n';
        return 2;
    } catch (const ArgumentError& e) {
        err << "dcforge: input error: " << e.what() << '\n';
        return 2;
    } catch (const Json::exception& e) {
        err << "dcforge: input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "dcforge: internal error: " << e.what() << '\n';
        return 2;
    }
    try {
        if (!cfg.out.empty()) io::write_file(cfg.out, report);
    } catch (const ParseError& e) {
        err << "dcforge: " << e.what() << '\n';
        return 2;
    }
    if (cfg.json) out << report.dump(2) << '\n';
    else out << format_table(report);
    return report["status"] == "pass" ? 0 : 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace dcforge::cli

#include "dcforge/cli.hpp"
#include "dcforge/errors.hpp"
#include "dcforge/io.hpp"

#include "instances.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace dcforge;

namespace {

std::string data(const std::string& name) { return std::string(DCFORGE_DATA_DIR) + "/" + name; }

struct CliRun {
    int code;
    std::string out, err;
    io::Json json() const { return io::Json::parse(out); }
};

CliRun invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "dcforge");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path scratch(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("dcforge_test_" + std::to_string(::getpid()) + "_" + name);
}

} // namespace

TEST(Io, NumbersAndNonFinite) {
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_EQ(io::number(inf), "inf");
    EXPECT_EQ(io::number(-inf), "-inf");
    EXPECT_TRUE(std::isnan(io::to_double(io::number(std::nan("")), "x")));
    EXPECT_EQ(io::to_double(io::number(-inf), "x"), -inf);
    EXPECT_EQ(io::to_double(io::number(0.1), "x"), 0.1);
    EXPECT_THROW(io::to_double(io::Json("abc"), "x"), ParseError);
}

TEST(Io, MatrixAndPolyhedronRoundTrip) {
    const Matrix m = (Matrix(2, 3) << 1, 2, 3, 4, 5, 6.5).finished();
    EXPECT_EQ(io::matrix_from(io::matrix_json(m), "m"), m);
    const Polyhedron p((Matrix(2, 2) << 1, 0, 0, -1).finished(), (Vector(2) << 1, 2).finished(), {1});
    const Polyhedron back = io::polyhedron_from(io::polyhedron_json(p));
    EXPECT_EQ(back.A, p.A);
    EXPECT_EQ(back.b, p.b);
    EXPECT_EQ(io::polyhedron_json(back).dump(), io::polyhedron_json(p).dump());
    EXPECT_EQ(io::polyhedron_from(io::polyhedron_json(Polyhedron::whole_space(3))).dim(), 3);
}

TEST(Io, ExpressionRoundTripPreservesValues) {
    Rng rng(12);
    for (int k = 0; k < 30; ++k) {
        const auto rf = inst::random_rf(rng);
        for (int s = 0; s < rf.size(); ++s) {
            const ConvexExpr e = ConvexExpr::max_of(
                {rf.p[s], ConvexExpr::scale(0.5, ConvexExpr::sum({rf.q[s], ConvexExpr::norm2_affine(
                                                                            Matrix::Identity(rf.domain.dim(), rf.domain.dim()),
                                                                            Vector::Zero(rf.domain.dim()))}))});
            const ConvexExpr back = io::expr_from(io::expr_json(e));
            EXPECT_EQ(io::expr_json(back).dump(), io::expr_json(e).dump());
            const Vector x = rf.domain.sample(rng);
            EXPECT_EQ(evaluate(back, x), evaluate(e, x));
        }
    }
}

TEST(Io, UnserializableKindRejected) {
    const auto c = ConvexExpr::callable(1, [](const Vector& x) { return x[0]; }, "id");
    EXPECT_THROW(io::expr_json(c), ArgumentError);
}

TEST(Io, DataFilesRoundTrip) {
    const auto s = io::read_file(data("scen_portfolio.json"));
    EXPECT_EQ(io::scenario_json(io::scenario_from(s)), io::scenario_json(io::scenario_from(io::scenario_json(io::scenario_from(s)))));
    const auto q = io::read_file(data("qp_q2d1.json"));
    EXPECT_EQ(io::qp_json(io::qp_from(q)), io::qp_json(io::qp_from(io::qp_json(io::qp_from(q)))));
    const auto g = io::read_file(data("grid_q2d1.json"));
    EXPECT_EQ(io::query_json(io::query_from(g)), io::query_json(io::query_from(io::query_json(io::query_from(g)))));
    const auto r = io::read_file(data("recourse.json"));
    EXPECT_EQ(io::recourse_json(io::recourse_from(r)),
              io::recourse_json(io::recourse_from(io::recourse_json(io::recourse_from(r)))));
    const auto p = io::read_file(data("pw_minsq.json"));
    EXPECT_EQ(io::piecewise_json(io::piecewise_from(p)),
              io::piecewise_json(io::piecewise_from(io::piecewise_json(io::piecewise_from(p)))));
}

TEST(Io, MissingFieldsAreParseErrors) {
    EXPECT_THROW(io::qp_from(io::Json::parse(R"({"Q": [[1]]})")), ParseError);
    EXPECT_THROW(io::piecewise_from(io::Json::parse(R"({"pieces": [], "regions": []})")), ParseError);
    EXPECT_THROW(io::read_file(data("does_not_exist.json")), ParseError);
}

TEST(Cli, RiskCvarOnZeroOne) {
    const CliRun r = invoke({"risk", "--in", data("scen_z01.json"), "--measure", "cvar:0.5", "--verify", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    EXPECT_EQ(j["status"], "pass");
    const auto& m = j["results"]["measures"][0];
    EXPECT_EQ(m["measure"], "cvar:0.5");
    ASSERT_FALSE(m["points"].empty());
    for (const auto& s : m["points"]) EXPECT_NEAR(s["value"].get<double>(), 1.0, 1e-10);
    bool saw_identity = false;
    for (const auto& c : j["checks"]) {
        EXPECT_TRUE(c["pass"].get<bool>()) << c["check"];
        saw_identity |= c["check"].get<std::string>().find(".oracle") != std::string::npos;
    }
    EXPECT_TRUE(saw_identity);
}

TEST(Cli, QpGridWithDc) {
    const CliRun r = invoke({"qp", "--in", data("qp_q2d1.json"), "--query", data("grid_q2d1.json"), "--dc", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    EXPECT_EQ(j["results"]["pieces"].size(), 2u);
    EXPECT_EQ(j["status"], "pass");
}

TEST(Cli, FoldedSqrtRejected) {
    const CliRun r = invoke({"folded", "--penalty", "sqrtabs", "--json"});
    EXPECT_EQ(r.code, 1);
    const auto j = r.json();
    EXPECT_EQ(j["status"], "rejected");
    EXPECT_EQ(j["error"]["type"], "NotDcError");
}

TEST(Cli, OtherSubcommandsPass) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"risk", "--in", data("scen_portfolio.json"), "--verify"},
             {"qp", "--in", data("qp_q2d1.json"), "--query", data("point_q2d1.json")},
             {"recourse", "--in", data("recourse.json")},
             {"piecewise", "--in", data("pw_abs.json")},
             {"piecewise", "--in", data("pw_minsq.json")},
             {"folded", "--penalty", "fig1b1"},
             {"folded", "--penalty", "scad:a=3.7,lambda=1"},
             {"verify-suite"}}) {
        const CliRun r = invoke(args);
        EXPECT_EQ(r.code, 0) << args[0] << " " << args.back() << "\n" << r.out << r.err;
    }
}

TEST(Cli, InputErrorsExitTwo) {
    EXPECT_EQ(invoke({"risk", "--in", data("bad.json")}).code, 2);
    EXPECT_EQ(invoke({"risk"}).code, 2);
    EXPECT_EQ(invoke({"nonsense"}).code, 2);
    EXPECT_EQ(invoke({"risk", "--in", data("scen_z01.json"), "--measure", "bogus"}).code, 2);
    EXPECT_EQ(invoke({"qp", "--in", data("scen_z01.json"), "--query", data("grid_q2d1.json")}).code, 2);
    const CliRun r = invoke({"risk", "--in", data("bad.json")});
    EXPECT_NE(r.err.find("input error"), std::string::npos);
}

TEST(Cli, NonConcavePenaltyIsRejected) {
    EXPECT_EQ(invoke({"folded", "--penalty", "u^2"}).code, 1);
}

TEST(Cli, EveryReportRoundTripsItsInput) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"risk", "--in", data("scen_portfolio.json"), "--json"},
             {"qp", "--in", data("qp_q2d1.json"), "--query", data("point_q2d1.json"), "--json"},
             {"recourse", "--in", data("recourse.json"), "--json"},
             {"piecewise", "--in", data("pw_minsq.json"), "--json"},
             {"folded", "--penalty", "fig1b1", "--json"}}) {
        const auto j = invoke(args).json();
        bool found = false;
        for (const auto& c : j["checks"])
            if (c["check"] == "input.roundtrip") found = c["pass"].get<bool>();
        EXPECT_TRUE(found) << args[0];
    }
}

TEST(Cli, OutFileMatchesStdoutAndIsDeterministic) {
    const auto a = scratch("a.json"), b = scratch("b.json");
    const CliRun r1 = invoke({"verify-suite", "--json", "--out", a.string()});
    const CliRun r2 = invoke({"verify-suite", "--json", "--out", b.string()});
    ASSERT_EQ(r1.code, 0);
    EXPECT_EQ(r1.out, r2.out);
    EXPECT_EQ(slurp(a.string()), slurp(b.string()));
    EXPECT_EQ(io::read_file(a.string()), r1.json());
    const CliRun other = invoke({"verify-suite", "--json", "--seed", "7"});
    EXPECT_NE(other.out, r1.out);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}

TEST(Cli, TableMirrorsJson) {
    const CliRun t = invoke({"folded", "--penalty", "fig1b1"});
    const CliRun j = invoke({"folded", "--penalty", "fig1b1", "--json"});
    EXPECT_EQ(t.out, cli::format_table(j.json()));
    EXPECT_NE(t.out.find("folded.reconstruction"), std::string::npos);
}

TEST(Cli, BinaryExitCodes) {
    const std::string bin = DCFORGE_CLI;
    auto status = [&](const std::string& args) {
        const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status("folded --penalty fig1a"), 0);
    EXPECT_EQ(status("folded --penalty sqrtabs"), 1);
    EXPECT_EQ(status("risk --in " + data("bad.json")), 2);
}

#include "dcforge/errors.hpp"
#include "dcforge/risk.hpp"
#include "dcforge/verification.hpp"
#include "instances.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace dcforge;

namespace {

Vector pt(double x) { return Vector::Constant(1, x); }

/// Scenario outcomes z_s + c * x on [-1, 1].
RandomDcFunctional constants(std::vector<double> p, const std::vector<double>& z, double slope = 0.0) {
    std::vector<ConvexExpr> pe, qe;
    for (double v : z) {
        pe.push_back(ConvexExpr::affine(Vector::Constant(1, slope), v));
        qe.push_back(ConvexExpr::zero(1));
    }
    return RandomDcFunctional(ScenarioSet(std::move(p)), pe, qe, Domain::box(1, -1, 1));
}

RandomDcFunctional z01() { return constants({0.5, 0.5}, {0.0, 1.0}); }

double measure(const std::string& m, const RandomDcFunctional& rf, double x = 0.0,
               const std::optional<PwlUtility>& u = std::nullopt) {
    return build_measure(parse_measure(m), rf, u).value(pt(x));
}

const PwlUtility kCvarU = PwlUtility::cvar(0.5);

} // namespace

TEST(Risk, ScenarioSetValidation) {
    EXPECT_THROW(ScenarioSet({0.5, 0.4}), ArgumentError);
    EXPECT_THROW(ScenarioSet({1.0, 0.0}), ArgumentError);
    EXPECT_NO_THROW(ScenarioSet({0.25, 0.75}));
}

TEST(Risk, UtilityValidation) {
    EXPECT_THROW(PwlUtility({2.0, 0.0}, {0.1, 0.0}), ArgumentError); // u(0) = 0.1... min alpha must be 0
    EXPECT_THROW(PwlUtility({0.5, 0.2}, {0.0, 0.0}), ArgumentError);  // 1 not in the superdifferential
    EXPECT_THROW(PwlUtility({-1.0, 2.0}, {0.0, 0.0}), ArgumentError);
    EXPECT_NO_THROW(PwlUtility({1.0}, {0.0}));
}

TEST(Risk, ExpectationExamples) {
    std::vector<ConvexExpr> pe = {ConvexExpr::zero(1), ConvexExpr::affine(Vector::Ones(1), 0)};
    const RandomDcFunctional rf(ScenarioSet({0.5, 0.5}), pe, {ConvexExpr::zero(1), ConvexExpr::zero(1)},
                                Domain::box(1, -1, 1));
    EXPECT_NEAR(expectation_dc(rf).value(pt(1)), 0.5, 1e-15);
    EXPECT_NEAR(measure("expectation", constants({0.2, 0.3, 0.5}, {1, 2, 4})), 2.8, 1e-15);
}

TEST(Risk, CvarExamples) {
    EXPECT_NEAR(measure("cvar:0.5", z01()), 1.0, 1e-12);
    for (double a : {0.1, 0.5, 0.9}) EXPECT_NEAR(cvar_dc(constants({1.0}, {3.5}), a).value(pt(0)), 3.5, 1e-12);
    const auto rf = constants({0.3, 0.7}, {0.0, 1.0}, 1.0);
    const auto base = constants({0.3, 0.7}, {0.0, 1.0});
    for (double x : {-0.8, 0.1, 0.9})
        EXPECT_NEAR(cvar_dc(rf, 0.6).value(pt(x)), x + cvar_dc(base, 0.6).value(pt(0)), 1e-12);
    EXPECT_THROW(cvar_dc(z01(), 1.0), ArgumentError);
    EXPECT_THROW(cvar_dc(z01(), 0.0), ArgumentError);
}

TEST(Risk, VarExamples) {
    const auto w1 = WPolytope::build(0.5, {1.0});
    ASSERT_EQ(w1.vertices.size(), 1u);
    EXPECT_NEAR(w1.vertices[0][0], 2.0, 1e-12);
    EXPECT_NEAR(var_dc(constants({1.0}, {-0.7}), 0.5).value(pt(0)), -0.7, 1e-12);
    const auto w2 = WPolytope::build(0.5, {0.5, 0.5});
    ASSERT_EQ(w2.vertices.size(), 1u);
    EXPECT_NEAR((w2.vertices[0] - Vector::Ones(2)).norm(), 0.0, 1e-12);
    EXPECT_NEAR(measure("var:0.5", z01()), 0.0, 1e-12);
}

TEST(Risk, VarScaleCap) {
    std::vector<double> p(13, 1.0 / 13);
    p.back() = 1.0 - 12.0 / 13;
    std::vector<double> z(13);
    for (int i = 0; i < 13; ++i) z[i] = i;
    EXPECT_THROW(var_dc(constants(p, z), 0.5), ScaleError);
}

TEST(Risk, OceExamples) {
    EXPECT_NEAR(oce_dc(z01(), kCvarU).value(pt(0)), 0.0, 1e-12);
    const PwlUtility lin({1.0}, {0.0});
    const auto rf = constants({0.2, 0.3, 0.5}, {1, -2, 4});
    EXPECT_NEAR(oce_dc(rf, lin).value(pt(0)), 1.6, 1e-12);
    const auto shifted = constants({0.2, 0.3, 0.5}, {1, -2, 4}, 1.0);
    for (double x : {-0.5, 0.3}) EXPECT_NEAR(oce_dc(shifted, kCvarU).value(pt(x)), oce_dc(rf, kCvarU).value(pt(0)) + x, 1e-12);
}

TEST(Risk, MuExamples) {
    EXPECT_NEAR(mu_dc(z01(), kCvarU).value(pt(0)), 1.0, 1e-12);
    EXPECT_NEAR(mu_dc(constants({1.0}, {2.5}), kCvarU).value(pt(0)), 2.5, 1e-12);
}

TEST(Risk, MuScaleCap) {
    std::vector<double> p(8, 0.125);
    const auto rf = constants(p, {0, 1, 2, 3, 4, 5, 6, 7});
    EXPECT_THROW(mu_dc(rf, kCvarU), ScaleError);
}

TEST(Risk, MomentExamples) {
    EXPECT_NEAR(measure("variance", z01()), 0.25, 1e-9);
    EXPECT_NEAR(measure("std", z01()), 0.5, 1e-9);
    EXPECT_NEAR(measure("variance", constants({0.4, 0.6}, {2, 2})), 0.0, 1e-9);
    EXPECT_NEAR(measure("std", constants({0.4, 0.6}, {2, 2})), 0.0, 1e-9);
    const auto z = constants({0.3, 0.7}, {0.0, 1.0});
    const auto z2 = constants({0.3, 0.7}, {0.0, 2.0});
    const auto zn = constants({0.3, 0.7}, {0.0, -3.0});
    EXPECT_NEAR(measure("variance", z2), 4 * measure("variance", z), 1e-8);
    EXPECT_NEAR(measure("std", zn), 3 * measure("std", z), 1e-8);
}

TEST(Risk, DeviationExamples) {
    EXPECT_NEAR(measure("dev:pos@mean", z01()), 0.25, 1e-9);
    EXPECT_NEAR(measure("dev:abs@mean", z01()), 0.5, 1e-9);
    EXPECT_NEAR(measure("dev:pos@cvar:0.5", z01()), 0.0, 1e-9);
    EXPECT_NEAR(measure("dev:abs@cvar:0.5", z01()), 0.5, 1e-9);
    const auto c = constants({0.4, 0.6}, {1.5, 1.5});
    for (const char* m : {"dev:sq@mean", "dev:sqrt_sq@mean", "dev:pos@mean", "dev:abs@mean"})
        EXPECT_NEAR(measure(m, c), 0.0, 1e-8) << m;
}

TEST(Risk, RiskLambdaExamples) {
    const auto rf = constants({0.2, 0.3, 0.5}, {1, -2, 4});
    EXPECT_NEAR(measure("Rlambda:0:variance", rf), measure("expectation", rf), 1e-12);
    EXPECT_NEAR(measure("Rlambda:1:variance", z01()), 0.75, 1e-9);
    const double a = measure("Rlambda:0.3:dev:abs@mean", rf), b = measure("Rlambda:0.9:dev:abs@mean", rf);
    const double c = measure("Rlambda:1.2:dev:abs@mean", rf);
    EXPECT_NEAR(a + b - measure("expectation", rf), c, 1e-9);
    DeviationSpec d;
    EXPECT_THROW(risk_lambda_dc(rf, -0.1, d), ArgumentError);
}

TEST(Risk, OracleExamples) {
    const std::vector<double> p = {0.5, 0.5}, z = {0.0, 1.0};
    EXPECT_DOUBLE_EQ(oracle::cvar(p, z, 0.5), 1.0);
    EXPECT_DOUBLE_EQ(oracle::var(p, z, 0.5), 0.0);
    EXPECT_DOUBLE_EQ(oracle::variance(p, z), 0.25);
}

TEST(Risk, ParseMeasure) {
    EXPECT_EQ(parse_measure("cvar:0.9").kind, MeasureSpec::Kind::cvar);
    EXPECT_DOUBLE_EQ(parse_measure("var:0.9").alpha, 0.9);
    const auto d = parse_measure("dev:abs@cvar:0.9");
    EXPECT_EQ(d.kind, MeasureSpec::Kind::deviation);
    EXPECT_EQ(d.dev.dev, DeviationKind::abs);
    EXPECT_EQ(d.dev.center.kind, CenterKind::cvar);
    EXPECT_DOUBLE_EQ(d.dev.center.alpha, 0.9);
    const auto r = parse_measure("Rlambda:0.5:variance");
    EXPECT_EQ(r.kind, MeasureSpec::Kind::risk_lambda);
    EXPECT_DOUBLE_EQ(r.lambda, 0.5);
    for (const char* bad : {"", "cvar", "cvar:x", "dev:cube@mean", "Rlambda:-1:variance", "foo"})
        EXPECT_THROW(parse_measure(bad), ParseError) << bad;
}

TEST(RiskProperty, LibraryOracleMatchesBruteForce) {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const int S = rng.uniform_int(1, 5);
        const auto p = inst::random_probs(rng, S);
        std::vector<double> z(S);
        for (auto& v : z) v = std::round(rng.normal() * 4.0) / 2.0; // ties are common
        const double alpha = rng.uniform(0.05, 0.95);
        EXPECT_NEAR(oracle::cvar(p, z, alpha), ref::cvar(p, z, alpha), 1e-9);
        EXPECT_NEAR(oracle::var(p, z, alpha), ref::var(p, z, alpha), 1e-12);
        EXPECT_NEAR(oracle::variance(p, z), ref::variance(p, z), 1e-12);
        if (trial % 4 == 0) {
            const auto u = inst::random_utility(rng);
            EXPECT_NEAR(oracle::oce(p, z, u), ref::oce(p, z, u.a, u.alpha), 1e-8);
            EXPECT_NEAR(oracle::mu(p, z, u), ref::mu(p, z, u.a, u.alpha), 1e-6);
        }
    }
}

TEST(RiskProperty, DcMatchesOracleOnRandomInstances) {
    Rng rng(23);
    const std::vector<std::string> measures = {"expectation", "cvar:0.3", "var:0.7", "variance", "std",
                                               "dev:sq@mean", "dev:abs@cvar:0.6", "dev:pos@var:0.4", "oce", "mu"};
    for (int trial = 0; trial < 25; ++trial) {
        const auto rf = inst::random_rf(rng);
        const auto u = inst::random_utility(rng);
        for (const auto& m : measures) {
            const auto spec = parse_measure(m);
            const DcFunction f = build_measure(spec, rf, u);
            const auto r = check_dc_identity(m, f, [&](const Vector& x) { return risk_oracle(spec, rf, x, u); },
                                             100 + trial, 20, 1e-7);
            EXPECT_TRUE(r.pass) << m << " trial " << trial << " violation " << r.max_violation;
        }
    }
}

TEST(RiskProperty, CvarDominatesVar) {
    Rng rng(25);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rf = inst::random_rf(rng);
        const double alpha = rng.uniform(0.1, 0.9);
        const auto c = cvar_dc(rf, alpha), v = var_dc(rf, alpha);
        for (int k = 0; k < 10; ++k) {
            const Vector x = rf.domain.sample(rng);
            EXPECT_GE(c.value(x), v.value(x) - 1e-9);
        }
    }
}

TEST(RiskProperty, PolytopesDependOnlyOnProbabilities) {
    Rng rng(27);
    for (int trial = 0; trial < 10; ++trial) {
        const int S = rng.uniform_int(2, 5);
        const auto p = inst::random_probs(rng, S);
        const double alpha = rng.uniform(0.1, 0.9);
        const auto w = WPolytope::build(alpha, p);
        EXPECT_EQ(w.vertices, WPolytope::build(alpha, p).vertices);
        const double k = 1.0 / (1.0 - alpha);
        for (int s = 0; s < S; ++s) {
            for (int t = 0; t < S; ++t) EXPECT_EQ(w.set.A(s, t), (s == t ? 1.0 : 0.0) - p[s] * k);
            EXPECT_EQ(w.set.b[s], -p[s] * k);
        }
        // A permutation of scenario values leaves VaR unchanged when probabilities move with them.
        std::vector<double> z(S);
        for (auto& v : z) v = rng.normal();
        std::vector<int> perm(S);
        std::iota(perm.begin(), perm.end(), 0);
        std::reverse(perm.begin(), perm.end());
        std::vector<double> pz(S), pp(S);
        for (int s = 0; s < S; ++s) {
            pz[s] = z[perm[s]];
            pp[s] = p[perm[s]];
        }
        double acc = 0.0;
        for (int s = 0; s + 1 < S; ++s) acc += pp[s];
        pp[S - 1] = 1.0 - acc;
        EXPECT_NEAR(var_dc(constants(p, z), alpha).value(pt(0)), var_dc(constants(pp, pz), alpha).value(pt(0)), 1e-9);
    }
    const auto phi = PhiPolytope::build(kCvarU, {0.5, 0.5});
    EXPECT_EQ(phi.vertices, PhiPolytope::build(kCvarU, {0.5, 0.5}).vertices);
    EXPECT_EQ(phi.A(0, 0), 0.5 * 2.0 - 1.0);
    EXPECT_EQ(phi.A(0, 1), 0.5 * 2.0);
}

TEST(RiskProperty, ComponentsAreConvex) {
    Rng rng(29);
    for (int trial = 0; trial < 5; ++trial) {
        const auto rf = inst::random_rf(rng);
        const auto u = inst::random_utility(rng);
        for (const char* m : {"cvar:0.5", "var:0.5", "oce", "mu", "variance", "std", "dev:abs@var:0.5"}) {
            for (const auto& r : check_components(m, build_measure(parse_measure(m), rf, u), trial, 200))
                EXPECT_TRUE(r.pass) << r.check << " trial " << trial << " violation " << r.max_violation;
        }
    }
}

TEST(RiskProperty, AdEqualsTwiceAsdAtMeanCenter) {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rf = inst::random_rf(rng);
        const auto ad = build_measure(parse_measure("dev:abs@mean"), rf);
        const auto asd = build_measure(parse_measure("dev:pos@mean"), rf);
        const Vector x = rf.domain.sample(rng);
        EXPECT_NEAR(ad.value(x), 2 * asd.value(x), 1e-9 * (1 + std::abs(ad.value(x))));
    }
}

#include "oracles.hpp"
#include "settings.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace satdesign;

namespace {

void expect_design(const Design& got, const std::vector<double>& points, const std::vector<double>& weights, double tol) {
    ASSERT_EQ(got.size(), points.size()) << got.to_string();
    for (std::size_t i = 0; i < points.size(); ++i) {
        EXPECT_NEAR(got.point(i), points[i], tol) << "point " << i;
        EXPECT_NEAR(got.weight(i), weights[i], tol) << "weight " << i;
    }
}

} // namespace

TEST(ZVector, RoundTrip) {
    const ZVector z{{0.2, 0.7}, {0.3, 0.25, 0.1}};
    const Vector v = z.to_vector();
    ASSERT_EQ(v.size(), 5);
    const ZVector back = ZVector::from_vector(v, 2);
    EXPECT_EQ(back.free_points, z.free_points);
    EXPECT_EQ(back.free_weights, z.free_weights);
}

TEST(ReducedObjective, AssemblesFixedEndpointsAndFirstWeight) {
    const auto model = make_linexp(1.0, 0.5, -1.0, 1.0);
    const ReducedObjective obj(*model, CriterionSpec::A(), DesignSpace(0.0, 1.0), 4, true, true);
    EXPECT_EQ(obj.size(), 5u);
    const ZVector z{{0.22, 0.72}, {0.32, 0.34, 0.18}};
    const Design d = obj.assemble(z);
    expect_design(d, {0.0, 0.22, 0.72, 1.0}, {0.16, 0.32, 0.34, 0.18}, 1e-15);
    const ZVector back = obj.encode(d);
    EXPECT_EQ(back.free_points, z.free_points);
    EXPECT_NEAR(obj.value(z), oracle::phi_p(-1.0, oracle::info(*model, d)), 1e-9);
    // Weights within (0, 1) summing to one.
    double sum = 0.0;
    for (double w : d.weights()) {
        EXPECT_GT(w, 0.0);
        sum += w;
    }
    EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(ReducedObjective, ZeroWeightPointContributesNothing) {
    const auto model = make_emax(0.0, 0.5, 20.0);
    const ReducedObjective obj(*model, CriterionSpec::D(), DesignSpace(0.0, 150.0), 4, true, true);
    const ZVector z{{10.0, 40.0}, {0.4, 0.0, 0.3}};
    const Design reduced({0.0, 10.0, 150.0}, {0.3, 0.4, 0.3});
    EXPECT_NEAR(obj.value(z), phi_value(CriterionSpec::D(), info_matrix(*model, reduced)), 1e-12);
}

// Gradient of the reduced objective against a five-point difference of the objective.
TEST(ReducedObjectiveProperty, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(31);
    for (const auto& s : satdesign::testing::all_settings()) {
        const ClassDescriptor desc = classify(*s.model, s.region);
        const ReducedObjective obj(*s.model, CriterionSpec::D(), s.region, desc.m, desc.fix_lower, desc.fix_upper);
        for (const auto& crit : {CriterionSpec::D(), CriterionSpec::A()}) {
            for (int trial = 0; trial < 20; ++trial) {
                const ZVector z = oracle::spread_z(rng, desc.free_points(), desc.m, s.lo, s.hi);
                const auto slack = obj.slacks(z);
                const double max_step = 0.2 * *std::min_element(slack.begin(), slack.end());
                const Vector g = objective_gradient(*s.model, crit, desc, z);
                const Vector fd = oracle::fd_gradient(
                    [&](const Vector& v) { return objective(*s.model, crit, desc, ZVector::from_vector(v, desc.free_points())); },
                    z.to_vector(), max_step);
                EXPECT_LT((g - fd).cwiseAbs().maxCoeff(), 1e-5 * std::max(1e-12, fd.cwiseAbs().maxCoeff()))
                    << s.label << " " << crit.label();
            }
        }
    }
}

TEST(ReducedObjective, GradientVanishesAtExplicitOptima) {
    // Poisson D-optimal: {(L - 2/θ2, 1/2), (L, 1/2)} for θ2 < 0.
    const auto poisson = make_poisson(0.3, -1.0);
    const DesignSpace half(0.0, kInfinity);
    const auto pd = classify(*poisson, half);
    const ZVector zp{{2.0}, {0.5}};
    EXPECT_LT(objective_gradient(*poisson, CriterionSpec::D(), pd, zp).cwiseAbs().maxCoeff(), 1e-8);

    // Emax e3-optimal: {(L, 1/4), (x*, 1/2), (U, 1/4)}.
    const auto emax = make_emax(0.0, 0.7, 20.0);
    const DesignSpace dose(0.0, 150.0);
    const auto ed = classify(*emax, dose);
    const ZVector ze{{oracle::emax_x(0.0, 150.0, 20.0)}, {0.5, 0.25}};
    const Vector g = objective_gradient(*emax, CriterionSpec::e(3, 3), ed, ze);
    EXPECT_LT(g.cwiseAbs().maxCoeff() / objective(*emax, CriterionSpec::e(3, 3), ed, ze), 1e-8);
}

TEST(NewtonSolve, PoissonAOnTheHalfLine) {
    const auto r = newton_solve(*make_poisson(1.0, -1.0), CriterionSpec::A(), DesignSpace(0.0, kInfinity));
    EXPECT_TRUE(r.feasible);
    EXPECT_TRUE(r.certificate.passed);
    expect_design(r.design, {0.0, 2.261}, {0.444, 0.556}, 1e-3);
}

TEST(NewtonSolve, EmaxAOnTheDoseRange) {
    const auto r = newton_solve(*make_emax(0.0, 7.0 / 15.0, 15.0), CriterionSpec::A(), DesignSpace(0.0, 150.0));
    EXPECT_TRUE(r.feasible);
    expect_design(r.design, {0.0, 12.50, 150.0}, {0.250, 0.500, 0.250}, 1e-3);
}

TEST(NewtonSolve, ExponentialAWithTwoTerms) {
    const auto r = newton_solve(*make_exponential(Vector{{1.0, 1.0, 1.0, 2.0}}), CriterionSpec::A(), DesignSpace(0.0, kInfinity));
    EXPECT_TRUE(r.feasible);
    expect_design(r.design, {0.0, 0.275, 1.196, 3.416}, {0.078, 0.178, 0.251, 0.493}, 2e-3);
}

// The computed LINEXP A-optimum beats every design on a 100x100 grid of interior-point perturbations.
TEST(NewtonSolve, LinexpOptimumIsALocalMaximumOnAGrid) {
    const auto model = make_linexp(1.0, 0.5, -1.0, 1.0);
    const DesignSpace region(0.0, 1.0);
    const auto r = newton_solve(*model, CriterionSpec::A(), region);
    ASSERT_TRUE(r.feasible);
    const double best = oracle::phi_p(-1.0, oracle::info(*model, r.design));
    std::vector<double> xs(r.design.points().begin(), r.design.points().end());
    std::vector<double> ws(r.design.weights().begin(), r.design.weights().end());
    double worst_gain = -kInfinity;
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            auto p = xs;
            p[1] += (i - 49.5) * 2e-4;
            p[2] += (j - 49.5) * 2e-4;
            worst_gain = std::max(worst_gain, oracle::phi_p(-1.0, oracle::info(*model, p, ws)) - best);
        }
    }
    EXPECT_LE(worst_gain, 1e-12 * best);
}

TEST(NewtonSolve, DeterministicForAFixedSeed) {
    const auto model = make_linexp(1.0, 1.0, -2.0, 1.0);
    SolveOptions opts;
    opts.seed = 99;
    const auto a = newton_solve(*model, CriterionSpec::A(), DesignSpace(0.0, 1.0), opts);
    const auto b = newton_solve(*model, CriterionSpec::A(), DesignSpace(0.0, 1.0), opts);
    EXPECT_EQ(a.design.distance(b.design), 0.0);
    EXPECT_EQ(a.criterion_value, b.criterion_value);
}

TEST(NewtonSolve, BoundaryOptimumFallsBackToTheEndpoint) {
    const auto r = newton_solve(*make_poisson(1.0, -1.0), CriterionSpec::A(), DesignSpace(0.0, 1.0));
    EXPECT_TRUE(r.feasible);
    ASSERT_EQ(r.design.size(), 2u);
    EXPECT_EQ(r.design.point(0), 0.0);
    EXPECT_NEAR(r.design.point(1), 1.0, 1e-12);
    EXPECT_TRUE(r.certificate.passed);
}

TEST(SolveOptions, Validation) {
    SolveOptions o;
    o.grad_tol = -1.0;
    EXPECT_THROW(o.validate(), Error);
    o = {};
    o.epsilon_schedule = {1e-3, 1e-2};
    EXPECT_THROW(o.validate(), Error);
    o = {};
    o.multistart = 0;
    EXPECT_THROW(o.validate(), Error);
}

TEST(RestrictRegion, PoissonDichotomy) {
    const auto model = make_poisson(1.0, -1.0);
    const auto full = newton_solve(*model, CriterionSpec::A(), DesignSpace(0.0, kInfinity));
    const auto wide = restrict_region(full, DesignSpace(0.0, 3.0), *model, CriterionSpec::A());
    EXPECT_EQ(wide.design.distance(full.design), 0.0);
    const auto narrow = restrict_region(full, DesignSpace(0.0, 2.0), *model, CriterionSpec::A());
    ASSERT_EQ(narrow.design.size(), 2u);
    EXPECT_EQ(narrow.design.point(0), 0.0);
    EXPECT_NEAR(narrow.design.point(1), 2.0, 1e-12);
    // The weights on {0, 2} maximize A over the two-point family.
    const auto best = oracle::best_two_point(*model, 0.0, 2.0 - 1e-12, 2.0, [](const Matrix& M) { return oracle::phi_p(-1.0, M); });
    EXPECT_NEAR(narrow.design.weight(1), best.w, 1e-6);
}

TEST(VerifyOptimality, FlagsASuboptimalDesign) {
    const auto model = make_emax(0.0, 0.5, 20.0);
    const auto cert = verify_optimality(*model, CriterionSpec::D(), Design({0.0, 50.0, 150.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}),
                                        DesignSpace(0.0, 150.0));
    EXPECT_FALSE(cert.passed);
    EXPECT_GT(cert.max_sensitivity_violation, 0.0);
    const double x = oracle::emax_x(0.0, 150.0, 20.0);
    const auto good = verify_optimality(*model, CriterionSpec::D(), Design({0.0, x, 150.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}),
                                        DesignSpace(0.0, 150.0));
    EXPECT_TRUE(good.passed);
    EXPECT_GE(good.scan_points, 2048u);
}

TEST(UniquenessProbe, StartsAgreeForStrictlyConcaveCriteria) {
    const auto probe = uniqueness_probe(*make_linexp(1.0, 0.5, -1.0, 1.0), CriterionSpec::D(), DesignSpace(0.0, 1.0), 16);
    EXPECT_EQ(probe.converged, 16u);
    EXPECT_LT(probe.agreement, 1e-6);
}

TEST(EpsilonSequence, RejectsPAboveMinusOne) {
    EXPECT_THROW((void)epsilon_c_solve(*make_emax(0.0, 0.5, 25.0), Vector{{0.0, 1.0, 0.0}}, -0.5, DesignSpace(0.0, 150.0)),
                 CriterionError);
}

TEST(CReference, ElfvingWhenTheDirectClassFails) {
    const auto model = make_emax(0.0, 7.0 / 15.0, 25.0);
    const auto ref = c_optimal_reference(*model, Vector{{0.0, 1.0, 0.0}}, DesignSpace(0.0, 150.0));
    ASSERT_TRUE(ref.has_value());
    EXPECT_EQ(ref->method, "elfving");
    const Design d = ref->design.pruned(1e-6);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_NEAR(d.point(0), 25.0 / 6.0, 1e-6);
    EXPECT_NEAR(d.point(1), 150.0, 1e-9);
    // No sampled three-point design does better.
    std::mt19937_64 rng(32);
    for (int i = 0; i < 500; ++i) {
        const auto xs = oracle::sorted_uniform(rng, 3, 0.0, 150.0);
        EXPECT_LE(oracle::c_value(Vector{{0.0, 1.0, 0.0}}, oracle::info(*model, xs, oracle::dirichlet(rng, 3))), ref->value * (1 + 1e-9));
    }
}

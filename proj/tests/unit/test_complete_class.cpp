#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace satdesign;
using Case = ClassDescriptor::Case;

TEST(Classify, PoissonFixesTheEndWhereTheRateIsLargest) {
    const auto down = classify(*make_poisson(1.0, -1.0), DesignSpace(0.0, kInfinity));
    EXPECT_EQ(down.which, Case::a);
    EXPECT_EQ(down.m, 2u);
    EXPECT_EQ(down.k, 3u);
    EXPECT_TRUE(down.fix_lower);
    EXPECT_FALSE(down.fix_upper);
    const auto up = classify(*make_poisson(1.0, 2.0), DesignSpace(-kInfinity, 0.0));
    EXPECT_EQ(up.which, Case::b);
    EXPECT_TRUE(up.fix_upper);
    EXPECT_FALSE(up.fix_lower);
}

TEST(Classify, ThreeAndFourParameterModelsFixBothEnds) {
    for (const auto& [model, m] : {std::pair{make_emax(0.0, 1.0, 20.0), 3u}, std::pair{make_log_linear(0.0, 1.0, 5.0), 3u},
                                   std::pair{make_linexp(1.0, 0.5, -1.0, 1.0), 4u}}) {
        const DesignSpace region = model->kind() == ModelKind::linexp ? DesignSpace(0.0, 1.0) : DesignSpace(0.0, 150.0);
        const auto d = classify(*model, region);
        EXPECT_EQ(d.which, Case::d) << model->name();
        EXPECT_EQ(d.m, m);
        EXPECT_EQ(d.k, 2 * m - 2);
        EXPECT_TRUE(d.fix_lower && d.fix_upper);
        EXPECT_EQ(d.free_points(), m - 2);
    }
}

TEST(Classify, LinexpCarriesItsDecompositionMatrix) {
    const auto d = classify(*make_linexp(1.0, 0.5, -2.0, 1.0), DesignSpace(0.0, 1.0));
    ASSERT_TRUE(d.P.has_value());
    EXPECT_DOUBLE_EQ((*d.P)(2, 3), 0.5 / -2.0);
    EXPECT_DOUBLE_EQ((*d.P)(3, 2), 1.0 / -2.0);
    EXPECT_EQ(d.psi.size(), d.k);
    const Matrix F = fc_matrix_linexp(0.3);
    EXPECT_DOUBLE_EQ(F(0, 0), 8.0);
    EXPECT_DOUBLE_EQ(F(0, 1), 2.0 * std::exp(0.3));
    EXPECT_DOUBLE_EQ(F(1, 1), 8.0 * std::exp(0.6));
}

TEST(Classify, ExponentialValidityRegion) {
    const DesignSpace half(0.0, kInfinity);
    const auto d = classify(*make_exponential(Vector{{1.0, 1.0, 1.0, 2.0}}), half);
    EXPECT_EQ(d.m, 4u);
    EXPECT_TRUE(d.fix_lower);
    EXPECT_FALSE(d.fix_upper);
    EXPECT_THROW((void)classify(*make_exponential(Vector{{1.0, 1.0, 1.0, 70.0}}), half), NoCompleteClassError);
    EXPECT_THROW((void)classify(*make_exponential(Vector{{1.0, 1.0}}), half), NoCompleteClassError);
    EXPECT_THROW((void)classify(*make_exponential(Vector{{1.0, 1.0, 1.0, 2.0, 1.0, 4.0}}), half), NoCompleteClassError);
    EXPECT_NO_THROW((void)classify(*make_exponential(Vector{{1.0, 1.0, 1.0, 2.0, 1.0, 3.0}}), half));
}

TEST(Classify, RegionMustLieInTheNaturalSpace) {
    EXPECT_THROW((void)classify(*make_emax(0.0, 1.0, 20.0), DesignSpace(-5.0, 150.0)), DesignSpaceError);
}

TEST(Chebyshev, RegisteredSystemsShowNoViolation) {
    const std::vector<std::pair<ModelPtr, DesignSpace>> cases{
        {make_poisson(1.0, -1.0), DesignSpace(0.0, kInfinity)},
        {make_poisson(0.0, 2.0), DesignSpace(-3.0, 1.0)},
        {make_emax(0.0, 1.0, 20.0), DesignSpace(0.0, 150.0)},
        {make_linexp(1.0, 0.5, -1.0, 1.0), DesignSpace(0.0, 1.0)},
    };
    for (const auto& [model, region] : cases) {
        const auto report = verify_psi_chebyshev(classify(*model, region), 500, 1);
        EXPECT_FALSE(report.violated) << model->name() << ": " << report.reason;
        EXPECT_GT(report.tuples_tested, 0u);
    }
}

TEST(Chebyshev, DetectsAnEvenSystem) {
    const std::vector<std::function<double(double)>> even{[](double) { return 1.0; }, [](double c) { return c * c; }};
    const auto report = verify_chebyshev_system(even, -1.0, 1.0, 500, 2);
    EXPECT_TRUE(report.violated);
    EXPECT_EQ(report.witness.size(), 2u);
    const std::vector<std::function<double(double)>> monomials{[](double) { return 1.0; }, [](double c) { return c; },
                                                               [](double c) { return c * c; }};
    EXPECT_FALSE(verify_chebyshev_system(monomials, 0.0, 1.0, 500, 3).violated);
    EXPECT_THROW((void)verify_chebyshev_system(monomials, 0.0, kInfinity, 10, 3), DesignSpaceError);
}

TEST(Estimability, PoissonSlopeAndLinexpTailParameters) {
    const auto poisson = make_poisson(1.0, -1.0);
    EXPECT_FALSE(check_estimability(*poisson, Vector{{0.0, 1.0}}, DesignSpace(0.0, kInfinity), 500, 4).violated);
    const auto linexp = make_linexp(1.0, 0.5, -1.0, 1.0);
    for (int j : {2, 3}) {
        Vector a = Vector::Zero(4);
        a(j) = 1.0;
        EXPECT_FALSE(check_estimability(*linexp, a, DesignSpace(0.0, 1.0), 500, 5).violated) << "e" << j + 1;
    }
}

// det[f(x1), f(x2), e2] for Emax, from the regression functions written out here.
TEST(Estimability, EmaxSlopeFailsOnlyWhenTheShiftIsInside) {
    const double t2 = 0.5;
    auto det = [&](double t3, double x1, double x2) {
        auto f = [&](double x) { return Vector{{1.0, x / (x + t3), -t2 * x / ((x + t3) * (x + t3))}}; };
        Matrix A(3, 3);
        A.col(0) = f(x1);
        A.col(1) = f(x2);
        A.col(2) = Vector{{0.0, 1.0, 0.0}};
        return A.determinant();
    };
    // Inside: the determinant changes sign across tuples, so the system is not Chebyshev.
    bool positive = false;
    bool negative = false;
    for (double x1 = 1.0; x1 < 150.0; x1 += 7.0)
        for (double x2 = x1 + 3.0; x2 <= 150.0; x2 += 11.0) {
            const double v = det(20.0, x1, x2);
            positive = positive || v > 0.0;
            negative = negative || v < 0.0;
        }
    ASSERT_TRUE(positive && negative);
    const Vector e2{{0.0, 1.0, 0.0}};
    EXPECT_TRUE(check_estimability(*make_emax(0.0, t2, 20.0), e2, DesignSpace(0.0, 150.0), 2000, 6).violated);
    EXPECT_FALSE(check_estimability(*make_emax(0.0, t2, 200.0), e2, DesignSpace(0.0, 150.0), 2000, 6).violated);
}

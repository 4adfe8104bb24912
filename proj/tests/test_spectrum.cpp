#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "shyp/catalog.hpp"
#include "shyp/spectrum.hpp"

using namespace shyp;

TEST(Generator, Evaluate) {
    EXPECT_NEAR(Generator(PowerLaw{2.0, 1.5}).evaluate(4).value(), 16.0, 1e-12);
    EXPECT_NEAR(Generator(ExpLaw{3.0, 0.5}).evaluate(2).value(), 3.0 * std::exp(1.0), 1e-12);
    EXPECT_NEAR(Generator(LogLaw{1.0, 2.0, 1.0}).evaluate(4).value(), std::pow(std::log(5.0), 2), 1e-12);
    EXPECT_NEAR(Generator(LogLogLaw{1.0, 3.0}).evaluate(1).value(), std::log(std::log(4.0)), 1e-14);
    EXPECT_EQ(Generator(Constant{0.0}).evaluate(7).sign, 0);
    EXPECT_THROW(Generator(Explicit{{1, 2}}).evaluate(3), std::out_of_range);
    EXPECT_THROW(Generator(PowerLaw{}).evaluate(0), std::out_of_range);
}

TEST(Generator, AlternatingSign) {
    const Generator g(PowerLaw{1.0, 1.0}, true);
    for (std::int64_t k = 1; k <= 6; ++k) EXPECT_NEAR(g.evaluate(k).value(), (k % 2 ? -1.0 : 1.0) * double(k), 1e-12);
    EXPECT_FALSE(g.power_term().has_value());
}

TEST(Generator, HugeValuesStayInLogSpace) {
    const SignedLog v = Generator(ExpLaw{1.0, 1.0}).evaluate(800);
    EXPECT_EQ(v.sign, 1);
    EXPECT_NEAR(v.log_abs, 800.0, 1e-12);
    const catalog::Entry e = catalog::lookup("exponential_spectrum_loglog_damping", 1);
    const EigenvalueQuad q = eigenvalues(e.spectrum, 800);
    EXPECT_TRUE(q.overflow);
    EXPECT_NEAR(q.logs[0].log_abs, 1600.0, 1e-9);
    EXPECT_NEAR(q.values[3], std::log(std::log(803.0)), 1e-13);
}

TEST(LambdaMu, AffineInTheta) {
    const catalog::Entry e = catalog::lookup("bilaplacian_zero_order_stiffness", 2);
    for (std::int64_t k : {1, 5, 40}) {
        const EigenvalueQuad q = eigenvalues(e.spectrum, k);
        for (double t1 : {-1.0, 0.5, 2.0})
            for (double t2 : {-0.3, 0.0, 1.0}) {
                const LambdaMu lm = lambda_mu(e.spectrum, t1, t2, k);
                const double lam = q.values[0] + t1 * q.values[1], mu = q.values[2] + t2 * q.values[3];
                EXPECT_NEAR(lm.lambda, lam, 1e-12 * (std::fabs(q.values[0]) + std::fabs(t1 * q.values[1]) + 1));
                EXPECT_NEAR(lm.mu, mu, 1e-12 * (std::fabs(q.values[2]) + std::fabs(t2 * q.values[3]) + 1));
            }
    }
}

TEST(Classify, ScaledLaplacianExponents) {
    const catalog::Entry e = catalog::lookup("scaled_laplacian_linear_damping", 1);
    const AlgebraicClass c = classify_algebraic(e.spectrum, e.params, {1, 2000});
    ASSERT_TRUE(c.algebraic) << c.reason;
    EXPECT_NEAR(c.alpha, 2.0, 1e-9);
    EXPECT_NEAR(c.alpha1, 2.0, 1e-9);
    EXPECT_NEAR(c.beta, 0.0, 1e-9);
    EXPECT_NEAR(c.beta1, 0.0, 1e-9);
    const ConsistencyVerdict v = consistency_conditions(c);
    EXPECT_NEAR(v.gamma1, 2.0, 1e-9);
    EXPECT_NEAR(v.gamma2, 0.0, 1e-9);
    EXPECT_TRUE(v.theta1_ok);
    EXPECT_TRUE(v.theta2_ok);
}

TEST(Classify, ConsistencyArithmetic) {
    std::mt19937_64 g(4);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 10; ++i) {
        AlgebraicClass c;
        c.alpha = u(g);
        c.alpha1 = u(g);
        c.beta = u(g);
        c.beta1 = u(g);
        const ConsistencyVerdict v = consistency_conditions(c);
        const double g1 = 2 * c.alpha1 - c.alpha - c.beta, g2 = 2 * c.beta1 - c.beta;
        EXPECT_DOUBLE_EQ(v.gamma1, g1);
        EXPECT_DOUBLE_EQ(v.gamma2, g2);
        EXPECT_EQ(v.theta1_ok, g1 >= -1);
        EXPECT_EQ(v.theta2_ok, g2 >= -1);
    }
    AlgebraicClass edge;
    edge.beta = 1;
    EXPECT_TRUE(consistency_conditions(edge).theta1_ok);  // gamma1 = -1 exactly
}

TEST(Hyperbolic, VerdictsAndWitnesses) {
    for (const char* name : {"wave_damped", "kelvin_voigt"}) {
        const catalog::Entry e = catalog::lookup(name, 1);
        EXPECT_EQ(check_hyperbolic(e.spectrum, e.params, {1, 2000}, 8).hyperbolic, Verdict::pass) << name;
    }
    for (const char* name : {"anti_kelvin_voigt", "bilaplacian_amplified"}) {
        const catalog::Entry e = catalog::lookup(name, 1);
        const ConditionReport r = check_hyperbolic(e.spectrum, e.params, {1, 2000}, 8);
        EXPECT_EQ(r.hyperbolic, Verdict::fail) << name;
        ASSERT_FALSE(r.witnesses.empty());
        for (const Witness& w : r.witnesses) {
            EXPECT_TRUE(witness_violates(e.spectrum, e.params, r, w)) << name << " k=" << w.k;
            EXPECT_TRUE(e.params.theta1_box.contains(w.theta1));
            EXPECT_TRUE(e.params.theta2_box.contains(w.theta2));
        }
    }
}

TEST(SlowlyIncreasing, RatioCurve) {
    // r_n = sum a^2 / (sum a)^2; constants give 1/n.
    const auto one = [](std::int64_t) { return SignedLog::from_value(1.0); };
    const SlowlyIncreasingResult a = slowly_increasing_test(one, 1000);
    EXPECT_NEAR(a.final_ratio, 1e-3, 1e-12);
    EXPECT_EQ(a.verdict, Verdict::pass);
    const auto ex = [](std::int64_t k) { return SignedLog::from_log(1, double(k)); };
    const SlowlyIncreasingResult b = slowly_increasing_test(ex, 1000);
    EXPECT_NEAR(b.final_ratio, (1 - std::exp(-1.0)) / (1 + std::exp(-1.0)), 1e-9);
    EXPECT_EQ(b.verdict, Verdict::fail);
    EXPECT_THROW(slowly_increasing_test(one, 5), std::invalid_argument);
}

TEST(Params, Validation) {
    ModelParams p;
    p.theta1_box = {1, 1};
    p.theta2_box = {0, 1};
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p.theta1_box = {0, 1};
    p.T = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

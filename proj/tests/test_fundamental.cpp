#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "shyp/catalog.hpp"
#include "shyp/fundamental.hpp"

using namespace shyp;
using boost::math::quadrature::gauss_kronrod;
constexpr double pi = std::numbers::pi;

namespace {

// Textbook fundamental solution, written independently of the library.
double f_ref(double lambda, double mu, double t) {
    const double b = mu / 2, D = b * b - lambda;
    if (D < 0) {
        const double l = std::sqrt(-D);
        return std::exp(b * t) * std::sin(l * t) / l;
    }
    if (D == 0) return t * std::exp(b * t);
    const double l = std::sqrt(D);
    return std::exp(b * t) * std::sinh(l * t) / l;
}

double fdot_ref(double lambda, double mu, double t) {
    const double b = mu / 2, D = b * b - lambda;
    if (D < 0) {
        const double l = std::sqrt(-D);
        return std::exp(b * t) * (b * std::sin(l * t) / l + std::cos(l * t));
    }
    if (D == 0) return std::exp(b * t) * (1 + b * t);
    const double l = std::sqrt(D);
    return std::exp(b * t) * (b * std::sinh(l * t) / l + std::cosh(l * t));
}

template <class F>
double integrate(F f, double a, double b, int periods = 1) {
    double s = 0;
    for (int i = 0; i < periods; ++i) {
        const double lo = a + (b - a) * i / periods, hi = a + (b - a) * (i + 1) / periods;
        s += gauss_kronrod<double, 61>::integrate(f, lo, hi, 8, 1e-13);
    }
    return s;
}

int panels(double lambda, double mu, double t) {
    const double D = mu * mu / 4 - lambda;
    return D < 0 ? 4 + int(std::sqrt(-D) * t / pi) * 2 : 8;
}

long double m_direct(long double x) { return (std::exp(x) - x - 1) / (2 * x * x); }
long double v_direct(long double x) {
    return (std::exp(2 * x) + 4 * std::exp(x) - 4 * x * std::exp(x) - 2 * x - 5) / (4 * x * x * x * x);
}

}  // namespace

TEST(Fundamental, ClosedFormsOfTheThreeBranches) {
    EXPECT_NEAR(fund_solution(1, 0, 1.3).f, std::sin(1.3), 1e-15);
    EXPECT_NEAR(fund_solution(1, 0, 1.3).fdot, std::cos(1.3), 1e-15);
    // Double root r = -1: f = t e^{-t}.
    EXPECT_NEAR(fund_solution(1, -2, 1.0).f, std::exp(-1.0), 1e-15);
    EXPECT_NEAR(fund_solution(1, -2, 1.0).fdot, 0.0, 1e-15);
    // Roots -1, -2: f = e^{-t} - e^{-2t}.
    EXPECT_NEAR(fund_solution(2, -3, 0.7).f, std::exp(-0.7) - std::exp(-1.4), 1e-15);
}

TEST(Fundamental, MatchesReferenceAcrossRegimes) {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 500; ++i) {
        const double lambda = std::exp(std::log(1e-3) + U(g) * std::log(1e7));
        const double mu = -40 + 45 * U(g);
        const double t = U(g);
        const FundValue f = fund_solution(lambda, mu, t);
        const double scale = std::max(1.0, std::exp(mu * t / 2) * (1 + std::fabs(mu) + std::sqrt(lambda)));
        EXPECT_NEAR(f.f, f_ref(lambda, mu, t), 1e-12 * scale) << lambda << " " << mu << " " << t;
        EXPECT_NEAR(f.fdot, fdot_ref(lambda, mu, t), 1e-12 * scale) << lambda << " " << mu << " " << t;
        // The ODE itself.
        EXPECT_NEAR(f.fddot, mu * f.fdot - lambda * f.f, 1e-9 * scale * (1 + lambda));
    }
}

TEST(Fundamental, RootClassification) {
    EXPECT_EQ(characteristic_roots(1, 0).tag, RootTag::complex_pair);
    EXPECT_EQ(characteristic_roots(1, -2).tag, RootTag::double_root);
    EXPECT_EQ(characteristic_roots(1, -2 * (1 + 1e-10)).tag, RootTag::double_root);
    EXPECT_EQ(characteristic_roots(2, -3).tag, RootTag::real_pair);
    EXPECT_DOUBLE_EQ(characteristic_roots(2, -3).r_plus, -1.0);
    EXPECT_DOUBLE_EQ(characteristic_roots(2, -3).r_minus, -2.0);
}

TEST(MV, ExactAtZeroAndAgainstLongDouble) {
    EXPECT_EQ(m_func(0.0), 0.25);
    EXPECT_EQ(v_func(0.0), 1.0 / 24.0);
    for (double x : {-500.0, -30.0, -5.0, -1.5, -1.0, -0.3, 0.3, 1.0, 2.0, 10.0, 40.0}) {
        EXPECT_NEAR(m_func(x), double(m_direct(x)), 1e-13 * double(m_direct(x))) << x;
        EXPECT_NEAR(v_func(x), double(v_direct(x)), 1e-10 * double(v_direct(x))) << x;
    }
}

TEST(MV, ContinuousAcrossSwitchPoints) {
    for (double x0 : {1e-3, 1.0, -1e-3, -1.0}) {
        const double a = std::nextafter(x0, 0.0), b = std::nextafter(x0, 2 * x0);
        EXPECT_NEAR(m_func(a), m_func(b), 1e-14);
        EXPECT_NEAR(v_func(a), v_func(b), 1e-14);
    }
    EXPECT_NEAR(m_func(1e-9), 0.25, 1e-9);
    EXPECT_NEAR(v_func(1e-9), 1.0 / 24, 1e-9);
}

TEST(MV, AsymptoticForms) {
    EXPECT_NEAR(m_func(-1e3) * 2e3, 1.0, 5e-3);
    EXPECT_NEAR(v_func(-1e3) / (4 / std::pow(2e3, 3)), 1.0, 5e-3);
    EXPECT_NEAR(m_func(50) / (2 * std::exp(50.0) / (100.0 * 100.0)), 1.0, 0.03);
    EXPECT_NEAR(log_m_func(800), std::log(2.0) + 800 - 2 * std::log(1600.0), 0.01);
    EXPECT_NEAR(log_m_func(3), std::log(m_func(3)), 1e-14);
}

TEST(EnergyIntegrals, ClosedFormAgainstGaussKronrod) {
    const double cases[][3] = {{1, 0, 2 * pi}, {3, -4, 1}, {1e4, -1, 1}, {100, 3, 0.5}, {5, -100, 1},
                               {25, -10.5, 1}, {25, -10, 1}, {2, -3, 2}, {0.5, 1, 1}};
    for (const auto& c : cases) {
        const double l = c[0], m = c[1], t = c[2];
        const int p = panels(l, m, t);
        const double ff = integrate([&](double s) { return f_ref(l, m, s) * f_ref(l, m, s); }, 0, t, p);
        const double dd = integrate([&](double s) { return fdot_ref(l, m, s) * fdot_ref(l, m, s); }, 0, t, p);
        const double f1 = integrate([&](double s) { return f_ref(l, m, s); }, 0, t, p);
        const double dff = integrate([&](double s) { return (t - s) * f_ref(l, m, s) * f_ref(l, m, s); }, 0, t, p);
        const double ddd = integrate([&](double s) { return (t - s) * fdot_ref(l, m, s) * fdot_ref(l, m, s); }, 0, t, p);
        for (const EnergyIntegrals& e : {energy_integrals_closed(l, m, t), energy_integrals_quadrature(l, m, t)}) {
            EXPECT_NEAR(e.ff, ff, 1e-10 * ff) << l << " " << m;
            EXPECT_NEAR(e.dd, dd, 1e-10 * dd) << l << " " << m;
            EXPECT_NEAR(e.f1, f1, 1e-10 * std::fabs(f1) + 1e-15) << l << " " << m;
            EXPECT_NEAR(e.dff, dff, 1e-10 * dff) << l << " " << m;
            EXPECT_NEAR(e.ddd, ddd, 1e-10 * ddd) << l << " " << m;
            EXPECT_NEAR(e.fd, 0.5 * f_ref(l, m, t) * f_ref(l, m, t), 1e-12 * (ff + 1e-300)) << l << " " << m;
            EXPECT_NEAR(e.d1, f_ref(l, m, t), 1e-12) << l << " " << m;
            EXPECT_NEAR(e.lambda_ff, l * e.ff, 1e-12 * l * e.ff);
        }
    }
}

TEST(EnergyIntegrals, SmoothThroughTheDoubleRoot) {
    for (double rel : {1e-14, 1e-10, 1e-6, 1e-3}) {
        for (double s : {-1.0, 1.0}) {
            const double l = 25 * (1 + s * rel);
            const EnergyIntegrals a = energy_integrals(l, -10, 1), b = energy_integrals(25, -10, 1);
            EXPECT_NEAR(a.ff, b.ff, 10 * rel * b.ff + 1e-15);
            EXPECT_NEAR(a.dd, b.dd, 10 * rel * b.dd + 1e-15);
        }
    }
}

TEST(ModeMoments, UndampedOscillator) {
    const ModeMoments m = mode_moments(1, 0, 2 * pi);
    EXPECT_NEAR(m.int_f2, pi, 1e-9);
    EXPECT_NEAR(m.int_fdot2, pi, 1e-9);
    EXPECT_NEAR(m.int_f_fdot, 0.0, 1e-12);
    // int_0^T (T - s) sin^2 s ds = T^2/4 for T = 2 pi.
    EXPECT_NEAR(m.double_int_f2, pi * pi, 1e-8);
}

TEST(ModeMoments, QuadratureAndClosedFormAgree) {
    for (const auto& [l, m] : std::vector<std::pair<double, double>>{{1e6, -1e3}, {4e4, -0.5}, {10, 2}, {1, -2}}) {
        const ModeMoments q = mode_moments(l, m, 1), c = mode_moments_closed(l, m, 1);
        EXPECT_NEAR(q.int_f2, c.int_f2, 1e-9 * c.int_f2);
        EXPECT_NEAR(q.double_int_fdot2, c.double_int_fdot2, 1e-9 * c.double_int_fdot2);
    }
    // Overflowing lambda goes through the scaled members.
    const ModeMoments big = mode_moments(std::numeric_limits<double>::infinity(), 1.0, 1.0);
    EXPECT_TRUE(big.closed_form);
    EXPECT_NEAR(big.double_int_fdot2, m_func(1.0), 1e-12);
    EXPECT_NEAR(big.lambda_double_int_f2, m_func(1.0), 1e-12);
}

TEST(ModeMoments, LargeEigenvalueApproximation) {
    for (double mu : {-2.0, 0.0, 1.5}) {
        const double lambda = 1e8, T = 1;
        const ModeMoments m = mode_moments(lambda, mu, T);
        const PredictedMoments p = predicted_moments(lambda, mu, T);
        EXPECT_NEAR(m.double_int_fdot2 / p.EintV2_asym, 1.0, 1e-3) << mu;
        EXPECT_NEAR(m.double_int_f2 / p.EintU2_asym, 1.0, 1e-3) << mu;
    }
}

TEST(Covariance, MarkovFormMatchesConvolution) {
    for (const auto& c : std::vector<std::array<double, 4>>{{1, 0, pi, 2 * pi}, {30, -1, 0.3, 0.9}, {4, 0.5, 0.2, 0.2}}) {
        EXPECT_NEAR(covariance_u(c[0], c[1], c[2], c[3]), covariance_u_markov(c[0], c[1], c[2], c[3]), 1e-9);
    }
    EXPECT_NEAR(covariance_u(1, 0, pi, 2 * pi), -pi / 2, 1e-9);
    EXPECT_DOUBLE_EQ(covariance_u(3, -1, 0.4, 0.7), covariance_u(3, -1, 0.7, 0.4));
}

TEST(Psi, SingleModeEqualsMoments) {
    const catalog::Entry e = catalog::lookup("scaled_laplacian_linear_damping", 1);
    const PsiValues p = psi(e.spectrum, e.params, 1);
    const LambdaMu lm = lambda_mu(e.spectrum, e.params.theta1, e.params.theta2, 1);
    const ModeMoments m = mode_moments(lm.lambda, lm.mu, 1);
    EXPECT_NEAR(p.psi1, m.double_int_f2, 1e-12);  // tau_1 = 1
    EXPECT_NEAR(p.psi2, m.double_int_fdot2, 1e-12);
}

TEST(Psi, TableEqualsDirectSums) {
    const catalog::Entry e = catalog::lookup("laplacian_stiffness_and_damping", 2);
    const auto tab = psi_table(e.spectrum, 1, 1, 1, {5, 40, 100});
    for (const auto& row : tab) {
        const PsiValues d = psi(e.spectrum, 1, 1, 1, row.N);
        EXPECT_NEAR(row.psi1, d.psi1, 1e-12 * d.psi1);
        EXPECT_NEAR(row.psi2, d.psi2, 1e-12 * d.psi2);
        double s1 = 0;
        for (std::int64_t k = 1; k <= row.N; ++k) s1 += psi_terms(e.spectrum, 1, 1, 1, k).t1;
        EXPECT_NEAR(row.psi1, s1, 1e-12 * s1);
    }
    EXPECT_THROW(psi_table(e.spectrum, 1, 1, 1, {10, 5}), std::invalid_argument);
}

TEST(Psi, AsymptoticColumnsTrackExact) {
    const catalog::Entry e = catalog::lookup("scaled_laplacian_linear_damping", 1);
    const PsiValues p = psi(e.spectrum, e.params, 800);
    EXPECT_NEAR(p.psi1 / p.psi1_asym, 1.0, 0.02);
    EXPECT_NEAR(p.psi2 / p.psi2_asym, 1.0, 0.02);
}

TEST(Upsilon, PowerAndLog) {
    EXPECT_DOUBLE_EQ(upsilon(100, 1), 1e4);
    EXPECT_DOUBLE_EQ(upsilon(100, -1), std::log(100.0));
    EXPECT_DOUBLE_EQ(upsilon(100, -1 + 1e-13), std::log(100.0));
    EXPECT_NEAR(upsilon(100, -0.5), 10.0, 1e-12);
}

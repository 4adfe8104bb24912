// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "shyp/catalog.hpp"
#include "shyp/fundamental.hpp"
#include "shyp/montecarlo.hpp"
#include "shyp/rng.hpp"
#include "shyp/simulate.hpp"
#include "shyp/spectrum.hpp"

using namespace shyp;
namespace odeint = boost::numeric::odeint;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail, double seconds) {
    std::printf("%s C%-2d %-44s %s  (%.1fs)\n", ok ? "PASS" : "FAIL", id, title, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

template <class... A>
std::string fmt(const char* f, A... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// f'' = mu f' - lambda f with f(0) = 0, f'(0) = 1, plus the running integrals
// of f^2, f f' and f'^2.
using State = std::array<double, 5>;

State integrate_mode(double lambda, double mu, double t) {
    State x{0.0, 1.0, 0.0, 0.0, 0.0};
    auto rhs = [&](const State& s, State& d, double) {
        d[0] = s[1];
        d[1] = mu * s[1] - lambda * s[0];
        d[2] = s[0] * s[0];
        d[3] = s[0] * s[1];
        d[4] = s[1] * s[1];
    };
    auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_fehlberg78<State>());
    odeint::integrate_adaptive(stepper, rhs, x, 0.0, t, 1e-4);
    return x;
}

ExperimentConfig alg_config(const std::string& name, int d, std::vector<std::int64_t> N_list, int M,
                            std::int64_t n_steps, std::uint64_t seed) {
    const catalog::Entry e = catalog::lookup(name, d);
    ExperimentConfig c;
    c.name = name;
    c.spectrum = e.spectrum;
    c.params = e.params;
    c.N_list = std::move(N_list);
    c.replicates = M;
    c.grid = {e.params.T, n_steps};
    c.seed = seed;
    return c;
}

std::vector<std::int64_t> geometric(double lo, double hi, int n) {
    std::vector<std::int64_t> v;
    for (int i = 0; i < n; ++i) v.push_back(std::llround(lo * std::pow(hi / lo, double(i) / (n - 1))));
    return v;
}

// ---------------------------------------------------------------------------

void c1_fundamental() {
    Timer tm;
    std::mt19937_64 gen(20241014);
    std::uniform_real_distribution<double> log_lambda(std::log(0.05), std::log(2000.0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double lambda = std::exp(log_lambda(gen));
        // Amplification bounded so that e^{mu/2} stays moderate; damping up to 60.
        const double mu = -60.0 + 66.0 * unit(gen);
        for (double t : {0.25, 0.5, 0.75, 1.0}) {
            const State ref = integrate_mode(lambda, mu, t);
            const FundValue f = fund_solution(lambda, mu, t);
            worst = std::max({worst, std::fabs(f.f - ref[0]), std::fabs(f.fdot - ref[1])});
        }
    }
    // Either side of the double root lambda = mu^2 / 4 against the ODE.
    double jump = 0.0;
    for (double mu : {-8.0, -2.0, 0.5, 3.0}) {
        const double l0 = mu * mu / 4.0;
        for (double t : {0.3, 1.0})
            for (double rel : {0.0, 1e-12, 1e-9, 1e-6, 1e-4})
                for (double s : {-1.0, 1.0}) {
                    const double lambda = l0 * (1 + s * rel);
                    const FundValue f = fund_solution(lambda, mu, t);
                    const State ref = integrate_mode(lambda, mu, t);
                    jump = std::max({jump, std::fabs(f.f - ref[0]), std::fabs(f.fdot - ref[1])});
                }
    }
    report(1, "fundamental solution vs ODE", worst < 1e-8 && jump < 1e-6,
           fmt("max|err| %.2e (<1e-8), branch jump %.2e (<1e-6)", worst, jump), tm.seconds());
}

void c2_mv() {
    Timer tm;
    const double x = -1e3;
    const double rm = m_func(x) / (1.0 / (2.0 * std::fabs(x)));
    const double rv = v_func(x) / (4.0 / std::pow(2.0 * std::fabs(x), 3));
    const bool ok = m_func(0.0) == 0.25 && v_func(0.0) == 1.0 / 24.0 && std::fabs(rm - 1) < 5e-3 &&
                    std::fabs(rv - 1) < 5e-3;
    report(2, "M/V values and asymptotics", ok,
           fmt("M(0)=%.17g V(0)=%.17g, ratios at -1e3: %.5f %.5f", m_func(0.0), v_func(0.0), rm, rv), tm.seconds());
}

void c3_marginals() {
    Timer tm;
    const std::array<std::pair<double, double>, 3> cases{{{1.0, 0.0}, {1e4, -1.0}, {25.0, -10.0}}};
    const int M = 100000;
    const TimeGrid grid{1.0, 16};
    double worst_z = 0.0;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const auto [lambda, mu] = cases[c];
        const Transition tr = transition(lambda, mu, grid.dt());
        const State ref = integrate_mode(lambda, mu, grid.T);
        std::vector<double> uu(M), uv(M), vv(M);
        ModeTrajectory traj;
        for (int r = 0; r < M; ++r) {
            rng::NormalStream s(7, r, c + 1, rng::Channel::noise);
            simulate_mode(tr, grid, s, traj);
            const double u = traj.u.back(), v = traj.v.back();
            uu[r] = u * u;
            uv[r] = u * v;
            vv[r] = v * v;
        }
        // Mean-zero process: second moments are the covariances.
        auto z = [&](const std::vector<double>& x, double truth) {
            double m = 0, s2 = 0;
            for (double e : x) m += e;
            m /= M;
            for (double e : x) s2 += (e - m) * (e - m);
            return std::fabs(m - truth) / std::sqrt(s2 / (M - 1) / M);
        };
        worst_z = std::max({worst_z, z(uu, ref[2]), z(uv, ref[3]), z(vv, ref[4])});
    }
    report(3, "exact-in-law simulation marginals", worst_z < 4.0, fmt("max |z| %.2f (<4 SE)", worst_z), tm.seconds());
}

void c4_c5_isometry_identity() {
    Timer tm;
    ExperimentConfig cfg = alg_config("scaled_laplacian_linear_damping", 1, {400}, 500, 1024, 4);
    const ExperimentData data = run_experiment(cfg);
    const LlnReport lln = lln_report(data);
    const double iso = lln.rows.back().iota1_isometry;
    const double t = tm.seconds();
    report(4, "isometry E iota1^2 / Psi1", iso >= 0.9 && iso <= 1.1,
           fmt("%.4f +- %.4f in [0.9, 1.1]", iso, lln.rows.back().iota1_isometry_se), t);
    const bool all = data.identity_checked == cfg.replicates;
    report(5, "error-decomposition identity", all && data.identity_violations == 0,
           fmt("%d/%d replicates checked, max rel residual %.2e (<1e-9)", data.identity_checked, cfg.replicates,
               data.identity_max_residual),
           0.0);
}

void c6_psi_slopes() {
    Timer tm;
    const auto Ns = geometric(50, 800, 9);
    auto growth = [&](const char* name, int d) {
        const catalog::Entry e = catalog::lookup(name, d);
        return fit_growth(psi_table(e.spectrum, e.params.theta1, e.params.theta2, e.params.T, Ns));
    };
    const auto g1 = growth("scaled_laplacian_linear_damping", 1);
    const auto g2 = growth("laplacian_stiffness_and_damping", 1);
    const auto g3a = growth("laplacian_stiffness_bilaplacian_damping", 2);
    const auto g3b = growth("laplacian_stiffness_bilaplacian_damping", 1);
    const bool ok = std::fabs(g1[0].slope - 3) <= 0.1 && std::fabs(g1[1].slope - 1) <= 0.1 &&
                    std::fabs(g2[0].slope - 1) <= 0.1 && std::fabs(g2[1].slope - 3) <= 0.1 && g3a[0].logarithmic &&
                    std::fabs(g3a[0].slope) <= 0.15 && std::fabs(g3b[1].slope - 5) <= 0.1;
    report(6, "Psi growth exponents", ok,
           fmt("ex1 (%.3f, %.3f), ex2 (%.3f, %.3f), ex3 d=2 Psi1 slope %.3f log=%d, ex3 d=1 Psi2 %.3f", g1[0].slope,
               g1[1].slope, g2[0].slope, g2[1].slope, g3a[0].slope, int(g3a[0].logarithmic), g3b[1].slope),
           tm.seconds());
}

void c7_consistency() {
    Timer tm;
    ExperimentConfig cfg = alg_config("scaled_laplacian_linear_damping", 1, {25, 50, 100, 200, 400}, 200, 1024, 7);
    const ConsistencyTable t = run_consistency(cfg);
    const bool ok = std::fabs(t.slope1.slope + 1.5) <= 0.3 && std::fabs(t.slope2.slope + 0.5) <= 0.2 &&
                    t.exclusions_ok;
    report(7, "consistency decay slopes", ok,
           fmt("slope1 %.3f (-1.5+-0.3), slope2 %.3f (-0.5+-0.2)", t.slope1.slope, t.slope2.slope), tm.seconds());
}

void c8_normality() {
    Timer tm;
    ExperimentConfig cfg = alg_config("scaled_laplacian_linear_damping", 1, {200}, 300, 1024, 8);
    const NormalityReport r = run_normality(cfg);
    const double crit = r.ks1.critical.at(0.01);
    const bool ok = r.ks1.D < crit && r.ks2.D < crit && std::fabs(r.corr12) < 0.15 && r.exclusions_ok;
    report(8, "asymptotic normality and independence", ok,
           fmt("ks1 %.4f ks2 %.4f (<%.4f), corr12 %.3f (<0.15)", r.ks1.D, r.ks2.D, crit, r.corr12), tm.seconds());
}

void c9_negative_control() {
    Timer tm;
    int ks_fail = 0, flat = 0;
    const int reps = 20;
    for (int m = 0; m < reps; ++m) {
        ExperimentConfig cfg =
            alg_config("bilaplacian_zero_order_stiffness", 1, {25, 50, 100, 200, 400}, 100, 1024, 900 + m);
        cfg.route = EstimatorRoute::innovation;
        cfg.significance = 0.05;
        const ExperimentData data = run_experiment(cfg);
        const ConsistencyTable t = consistency_table(data, cfg);
        const NormalityReport r = normality_report(data, cfg);
        flat += t.rows.back().mean_abs_err1 > 0.5 * t.rows.front().mean_abs_err1;
        ks_fail += r.ks1.rejects(0.05);
    }
    report(9, "negative control (theta1 not identifiable)", ks_fail >= 16 && flat == reps,
           fmt("KS rejects in %d/%d (>=16), error flat in %d/%d", ks_fail, reps, flat, reps), tm.seconds());
}

void c10_general_case() {
    Timer tm;
    const catalog::Entry e = catalog::lookup("exponential_spectrum_loglog_damping", 1);
    const Conditions12 c12 = conditions_1_2(e.spectrum, e.params, 2000);
    ExperimentConfig cfg;
    cfg.spectrum = e.spectrum;
    cfg.params = e.params;
    cfg.N_list = {200};
    cfg.replicates = 300;
    cfg.grid = {e.params.T, 1024};
    cfg.seed = 10;
    cfg.route = EstimatorRoute::innovation;
    const NormalityReport r = run_normality(cfg);
    const auto Ns = geometric(100, 800, 8);
    const auto tab = psi_table(e.spectrum, e.params.theta1, e.params.theta2, e.params.T, Ns);
    std::vector<double> ratio;
    double mean = 0.0;
    for (const auto& p : tab) {
        const double n = double(p.N);
        ratio.push_back(p.psi2 / (n * std::pow(std::log(n), e.params.T * e.params.theta2)));
        mean += ratio.back() / tab.size();
    }
    double spread = 0.0;
    for (double x : ratio) spread = std::max(spread, std::fabs(x / mean - 1));
    const double crit = r.ks1.critical.at(0.01);
    const bool ok = c12.cond1 == Verdict::pass && c12.cond2 == Verdict::pass && r.ks1.D < crit && r.ks2.D < crit &&
                    spread <= 0.2;
    report(10, "general (exponential) spectrum", ok,
           fmt("cond1 %s cond2 %s, ks1 %.4f ks2 %.4f (<%.4f), Psi2/(N lnN^T) spread %.3f (<0.2)",
               to_string(c12.cond1), to_string(c12.cond2), r.ks1.D, r.ks2.D, crit, spread),
           tm.seconds());
}

void c11_classifier() {
    Timer tm;
    const std::array<std::pair<const char*, Verdict>, 6> cases{{{"wave_amplified", Verdict::pass},
                                                                {"wave_damped", Verdict::pass},
                                                                {"kelvin_voigt", Verdict::pass},
                                                                {"bilaplacian_damped", Verdict::pass},
                                                                {"anti_kelvin_voigt", Verdict::fail},
                                                                {"bilaplacian_amplified", Verdict::fail}}};
    int right = 0;
    std::string got;
    for (const auto& [name, want] : cases) {
        const catalog::Entry e = catalog::lookup(name, 1);
        const Verdict v = check_hyperbolic(e.spectrum, e.params, {1, 100000}, 4).hyperbolic;
        right += v == want;
        got += std::string(to_string(v)) + " ";
    }
    report(11, "hyperbolicity classifier", right == 6, fmt("%d/6 as stated: %s", right, got.c_str()), tm.seconds());
}

void c12_slowly_increasing() {
    Timer tm;
    const std::int64_t n = 100000;
    auto run = [&](std::function<SignedLog(std::int64_t)> f) { return slowly_increasing_test(f, n); };
    const auto inv = run([](std::int64_t k) { return SignedLog::from_log(1, -std::log(double(k))); });
    const auto esq = run([](std::int64_t k) { return SignedLog::from_log(1, std::sqrt(double(k))); });
    const auto p15 = run([](std::int64_t k) { return SignedLog::from_log(1, -1.5 * std::log(double(k))); });
    const auto ek = run([](std::int64_t k) { return SignedLog::from_log(1, double(k)); });
    const bool ok = inv.verdict == Verdict::pass && esq.verdict == Verdict::pass && p15.verdict == Verdict::fail &&
                    ek.verdict == Verdict::fail;
    report(12, "slowly-increasing verdicts", ok,
           fmt("k^-1 %s (%.4f), e^sqrt(k) %s (%.4f), k^-1.5 %s (%.4f), e^k %s (%.4f)", to_string(inv.verdict),
               inv.final_ratio, to_string(esq.verdict), esq.final_ratio, to_string(p15.verdict), p15.final_ratio,
               to_string(ek.verdict), ek.final_ratio),
           tm.seconds());
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> steps{c1_fundamental,  c2_mv,          c3_marginals,
                                                   c4_c5_isometry_identity, c6_psi_slopes, c7_consistency,
                                                   c8_normality,    c9_negative_control, c10_general_case,
                                                   c11_classifier,  c12_slowly_increasing};
    for (const auto& s : steps) {
        try {
            s();
        } catch (const std::exception& e) {
            std::printf("FAIL     exception: %s\n", e.what());
            ++failures;
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

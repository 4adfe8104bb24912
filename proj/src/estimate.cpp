#include "shyp/estimate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "shyp/error.hpp"
#include "shyp/fundamental.hpp"

namespace shyp {

namespace {

struct Neumaier {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double t = s + x;
        c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

// a * b * x without forming a * b, which may overflow on its own.
double wprod(SignedLog a, SignedLog b, double x) {
    if (a.sign == 0 || b.sign == 0 || x == 0.0) return 0.0;
    const int sign = a.sign * b.sign * (x > 0 ? 1 : -1);
    return sign * std::exp(a.log_abs + b.log_abs + std::log(std::fabs(x)));
}

double wprod(SignedLog a, double x) {
    if (a.sign == 0 || x == 0.0) return 0.0;
    return a.sign * (x > 0 ? 1 : -1) * std::exp(a.log_abs + std::log(std::fabs(x)));
}

std::size_t count(std::span<const ModeContribution> c, std::int64_t N) {
    if (N < 0) return c.size();
    if (static_cast<std::size_t>(N) > c.size()) throw std::invalid_argument("N exceeds the number of trajectories");
    return static_cast<std::size_t>(N);
}

}  // namespace

ModeContribution mode_contribution(const ModeTrajectory& t, const TimeGrid& grid, double lambda, double mu,
                                   const kernels::KernelSet& ks) {
    const auto n = static_cast<std::size_t>(grid.n_steps);
    if (t.u.size() != n + 1 || t.v.size() != n + 1) throw std::invalid_argument("trajectory does not match the grid");
    const bool has_dw = t.dw.size() == n;
    if (!has_dw && !t.dw.empty()) throw std::invalid_argument("trajectory dw length does not match the grid");
    const double dt = grid.dt();
    kernels::SchemeCoeffs sc;
    sc.want_scheme = std::isfinite(lambda) && std::isfinite(mu);
    sc.lam_dt = sc.want_scheme ? lambda * dt : 0.0;
    sc.mu_dt = sc.want_scheme ? mu * dt : 0.0;
    std::vector<double> local;
    const double* dw = t.dw.data();
    if (!has_dw) {
        local.assign(n, 0.0);
        dw = local.data();
    }
    const kernels::ModeSums s = ks.mode_sums(t.u.data(), t.v.data(), dw, n, sc);
    ModeContribution c;
    c.k = t.k;
    c.int_u2 = s.uu * dt;
    c.int_v2 = s.vv * dt;
    c.int_uv = s.uv * dt;
    c.u_dv = s.u_dv;
    c.v_dv = s.v_dv;
    c.u_dw = s.u_dw;
    c.v_dw = s.v_dw;
    c.u_dws = s.u_dws;
    c.v_dws = s.v_dws;
    c.uT2 = t.u[n] * t.u[n];
    c.vT2 = t.v[n] * t.v[n];
    c.uTvT = t.u[n] * t.v[n];
    c.T = grid.T;
    c.has_dw = has_dw;
    return c;
}

Stats assemble_stats(std::span<const ModeContribution> contrib, const SpectrumSpec& spec, bool endpoint,
                     std::int64_t N) {
    const std::size_t n = count(contrib, N);
    Neumaier A1, A2, F1, F2, K1, K2, K12, L1, L2;
    for (std::size_t i = 0; i < n; ++i) {
        const ModeContribution& c = contrib[i];
        const SignedLog kap = spec.kappa.evaluate(c.k), tau = spec.tau.evaluate(c.k);
        const SignedLog rho = spec.rho.evaluate(c.k), nu = spec.nu.evaluate(c.k);
        const double uv = endpoint ? 0.5 * c.uT2 : c.int_uv;
        const double u_dv = endpoint ? c.uTvT - c.int_v2 : c.u_dv;
        const double v_dv = endpoint ? 0.5 * (c.vT2 - c.T) : c.v_dv;
        A1.add(-wprod(tau, u_dv));
        A2.add(wprod(nu, v_dv));
        F1.add(wprod(kap, tau, c.int_u2));
        F2.add(wprod(rho, nu, c.int_v2));
        K1.add(wprod(tau, tau, c.int_u2));
        K2.add(wprod(nu, nu, c.int_v2));
        K12.add(-wprod(tau, nu, uv));
        L1.add(-wprod(rho, tau, uv));
        L2.add(-wprod(kap, nu, uv));
    }
    Stats s;
    s.A1 = A1.value();
    s.A2 = A2.value();
    s.F1 = F1.value();
    s.F2 = F2.value();
    s.K1 = K1.value();
    s.K2 = K2.value();
    s.K12 = K12.value();
    s.L1 = L1.value();
    s.L2 = L2.value();
    s.N = static_cast<std::int64_t>(n);
    s.endpoint_variant = endpoint;
    return s;
}

Stats sufficient_statistics(std::span<const ModeTrajectory> trajs, const SpectrumSpec& spec, const TimeGrid& grid,
                            bool endpoint) {
    std::vector<ModeContribution> c;
    c.reserve(trajs.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& t : trajs) c.push_back(mode_contribution(t, grid, nan, nan));
    return assemble_stats(c, spec, endpoint);
}

Estimate mle(const Stats& s) {
    if (!(s.K1 > 0) || !(s.K2 > 0))
        throw SingularSystemError("normal equations are singular: K1 or K2 is not positive", 0.0);
    const double D = (s.K12 / s.K1) * (s.K12 / s.K2);
    if (!(1.0 - D >= 1e-12)) throw SingularSystemError("normal equations are near-singular", 1.0 - D);
    const double r1 = s.A1 - s.F1 - s.L1;
    const double r2 = s.A2 - s.F2 - s.L2;
    const double det = s.K1 * s.K2 * (1.0 - D);
    return {(s.K2 * r1 - s.K12 * r2) / det, (s.K1 * r2 - s.K12 * r1) / det, D};
}

Innovations innovations(std::span<const ModeContribution> contrib, const SpectrumSpec& spec, bool scheme,
                        std::int64_t N) {
    const std::size_t n = count(contrib, N);
    Neumaier i1, i2;
    for (std::size_t i = 0; i < n; ++i) {
        const ModeContribution& c = contrib[i];
        if (!scheme && !c.has_dw) throw std::invalid_argument("innovations need simulated Brownian increments");
        i1.add(-wprod(spec.tau.evaluate(c.k), scheme ? c.u_dws : c.u_dw));
        i2.add(wprod(spec.nu.evaluate(c.k), scheme ? c.v_dws : c.v_dw));
    }
    return {i1.value(), i2.value()};
}

Estimate estimate_from_innovations(const Stats& s, const Innovations& iota, double theta1, double theta2) {
    if (!(s.K1 > 0) || !(s.K2 > 0))
        throw SingularSystemError("normal equations are singular: K1 or K2 is not positive", 0.0);
    const double D = (s.K12 / s.K1) * (s.K12 / s.K2);
    if (!(1.0 - D >= 1e-12)) throw SingularSystemError("normal equations are near-singular", 1.0 - D);
    const double e1 = (iota.iota1 / s.K1 - iota.iota2 * s.K12 / (s.K1 * s.K2)) / (1.0 - D);
    const double e2 = (iota.iota2 / s.K2 - iota.iota1 * s.K12 / (s.K1 * s.K2)) / (1.0 - D);
    return {theta1 + e1, theta2 + e2, D};
}

ErrorDecomposition error_decomposition(std::span<const ModeContribution> contrib, const SpectrumSpec& spec,
                                       const ModelParams& params, std::int64_t N) {
    ErrorDecomposition d;
    const Stats riemann = assemble_stats(contrib, spec, false, N);
    d.iota = innovations(contrib, spec, false, N);
    d.iota_scheme = innovations(contrib, spec, true, N);
    const Estimate direct = mle(riemann);
    d.D_N = direct.D_N;
    d.direct1 = direct.theta1 - params.theta1;
    d.direct2 = direct.theta2 - params.theta2;
    const Estimate rec = estimate_from_innovations(riemann, d.iota_scheme, 0.0, 0.0);
    d.reconstructed1 = rec.theta1;
    d.reconstructed2 = rec.theta2;
    const Stats endpoint = assemble_stats(contrib, spec, true, N);
    const Estimate iso = estimate_from_innovations(endpoint, d.iota, 0.0, 0.0);
    d.isometry1 = iso.theta1;
    d.isometry2 = iso.theta2;
    return d;
}

ErrorDecomposition error_decomposition(std::span<const ModeTrajectory> trajs, const SpectrumSpec& spec,
                                       const ModelParams& params, const TimeGrid& grid) {
    std::vector<ModeContribution> c;
    c.reserve(trajs.size());
    for (const auto& t : trajs) {
        const LambdaMu lm = lambda_mu(spec, params.theta1, params.theta2, t.k);
        c.push_back(mode_contribution(t, grid, lm.lambda, lm.mu));
    }
    return error_decomposition(c, spec, params);
}

EstimateResult estimate(std::span<const ModeTrajectory> trajs, const SpectrumSpec& spec, const ModelParams& params,
                        const TimeGrid& grid, const EstimateOptions& opts) {
    EstimateResult r;
    std::vector<ModeContribution> c;
    c.reserve(trajs.size());
    for (const auto& t : trajs) {
        double lam = std::numeric_limits<double>::quiet_NaN(), mu = lam;
        if (opts.truth_known) {
            const LambdaMu lm = lambda_mu(spec, params.theta1, params.theta2, t.k);
            lam = lm.lambda;
            mu = lm.mu;
        }
        c.push_back(mode_contribution(t, grid, lam, mu));
    }
    r.stats = assemble_stats(c, spec, opts.use_endpoint_identities);
    const Estimate e = mle(r.stats);
    r.theta1_hat = e.theta1;
    r.theta2_hat = e.theta2;
    r.D_N = e.D_N;
    const std::int64_t N = static_cast<std::int64_t>(trajs.size());
    r.psi_source = opts.truth_known ? PsiSource::truth : PsiSource::plug_in;
    const double t1 = opts.truth_known ? params.theta1 : e.theta1;
    const double t2 = opts.truth_known ? params.theta2 : e.theta2;
    try {
        const PsiValues p = psi(spec, t1, t2, grid.T, N);
        r.psi1 = p.psi1;
        r.psi2 = p.psi2;
    } catch (const std::exception&) {
        r.psi1 = r.psi2 = std::numeric_limits<double>::quiet_NaN();
    }
    if (opts.truth_known) {
        r.norm_err1 = std::sqrt(r.psi1) * (e.theta1 - params.theta1);
        r.norm_err2 = std::sqrt(r.psi2) * (e.theta2 - params.theta2);
    }
    if (opts.with_innovations) {
        const Innovations io = innovations(c, spec, false);
        r.iota1 = io.iota1;
        r.iota2 = io.iota2;
    }
    return r;
}

std::string to_json(const EstimateResult& r, const TimeGrid& grid, std::optional<std::uint64_t> seed) {
    nlohmann::ordered_json j;
    const Stats& s = r.stats;
    j["N"] = s.N;
    j["A1"] = s.A1;
    j["A2"] = s.A2;
    j["F1"] = s.F1;
    j["F2"] = s.F2;
    j["K1"] = s.K1;
    j["K2"] = s.K2;
    j["K12"] = s.K12;
    j["L1"] = s.L1;
    j["L2"] = s.L2;
    j["endpoint_variant"] = s.endpoint_variant;
    j["theta1_hat"] = r.theta1_hat;
    j["theta2_hat"] = r.theta2_hat;
    j["psi1"] = r.psi1;
    j["psi2"] = r.psi2;
    j["psi_source"] = r.psi_source == PsiSource::truth ? "truth" : "plug_in";
    j["norm_err1"] = r.norm_err1 ? nlohmann::ordered_json(*r.norm_err1) : nullptr;
    j["norm_err2"] = r.norm_err2 ? nlohmann::ordered_json(*r.norm_err2) : nullptr;
    j["D_N"] = r.D_N;
    j["iota1"] = r.iota1 ? nlohmann::ordered_json(*r.iota1) : nullptr;
    j["iota2"] = r.iota2 ? nlohmann::ordered_json(*r.iota2) : nullptr;
    j["T"] = grid.T;
    j["n_steps"] = grid.n_steps;
    j["dt"] = grid.dt();
    j["seed"] = seed ? nlohmann::ordered_json(*seed) : nullptr;
    return j.dump(2);
}

}  // namespace shyp

#include "shyp/fundamental.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "shyp/error.hpp"
#include "shyp/quadrature.hpp"

namespace shyp {

namespace {

using cplx = std::complex<double>;

// |D| t^2 below this uses the series in D t^2.
constexpr double kSeriesBand = 0.01;

// S(x) = sum x^n/(2n+1)!, C(x) = sum x^n/(2n)!
void sc_series(double x, double& S, double& C) {
    double ts = 1.0, tc = 1.0;
    S = 1.0;
    C = 1.0;
    for (int n = 1; n < 40; ++n) {
        tc *= x / ((2.0 * n - 1) * (2.0 * n));
        ts *= x / ((2.0 * n) * (2.0 * n + 1));
        C += tc;
        S += ts;
        if (std::fabs(tc) < 1e-18 * std::fabs(C) && std::fabs(ts) < 1e-18 * std::fabs(S)) break;
    }
}

// phi1(x) = (e^x - 1)/x, phi2(x) = (e^x - 1 - x)/x^2
double phi1(double x) {
    if (x == 0.0) return 1.0;
    return std::expm1(x) / x;
}

double phi2(double x) {
    if (std::fabs(x) < 0.5) {
        double term = 0.5, sum = 0.5;
        for (int n = 1; n < 30; ++n) {
            term *= x / (n + 2);
            sum += term;
            if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
        }
        return sum;
    }
    return (std::expm1(x) - x) / (x * x);
}

cplx phi1(cplx z) {
    if (std::abs(z) < 0.5) {
        cplx term = 1.0, sum = 1.0;
        for (int n = 1; n < 30; ++n) {
            term *= z / double(n + 1);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

cplx phi2(cplx z) {
    if (std::abs(z) < 0.5) {
        cplx term = 0.5, sum = 0.5;
        for (int n = 1; n < 30; ++n) {
            term *= z / double(n + 2);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::exp(z) - 1.0 - z) / (z * z);
}

void check_finite(const FundValue& v, double lambda, double mu, double t) {
    if (!std::isfinite(v.f) || !std::isfinite(v.fdot))
        throw NumericalError("fundamental solution overflows at lambda=" + std::to_string(lambda) +
                             " mu=" + std::to_string(mu) + " t=" + std::to_string(t));
}

// Stable real roots for D > 0.
void real_roots(double lambda, double b, double ell, double& rp, double& rm) {
    if (b >= 0) {
        rp = b + ell;
        rm = rp != 0.0 ? lambda / rp : b - ell;
    } else {
        rm = b - ell;
        rp = lambda / rm;
    }
}

}  // namespace

RootKind characteristic_roots(double lambda, double mu, double eps) {
    RootKind r;
    r.half_mu = 0.5 * mu;
    r.disc = r.half_mu * r.half_mu - lambda;
    r.ell = std::sqrt(std::fabs(r.disc));
    const double scale = std::max(r.half_mu * r.half_mu, std::fabs(lambda));
    if (std::fabs(r.disc) <= eps * scale) {
        r.tag = RootTag::double_root;
        r.r_plus = r.r_minus = r.half_mu;
        r.ell = 0.0;
    } else if (r.disc < 0) {
        r.tag = RootTag::complex_pair;
    } else {
        r.tag = RootTag::real_pair;
        real_roots(lambda, r.half_mu, r.ell, r.r_plus, r.r_minus);
    }
    return r;
}

FundValue fund_solution(double lambda, double mu, double t) {
    if (!(t >= 0)) throw std::invalid_argument("fund_solution: t must be nonnegative");
    if (!std::isfinite(lambda)) throw NumericalError("fund_solution: lambda is not finite");
    FundValue v;
    if (t == 0.0) {
        v.f = 0.0;
        v.fdot = 1.0;
        v.fddot = mu;
        return v;
    }
    const double b = 0.5 * mu;
    const double D = b * b - lambda;
    const double x = D * t * t;
    if (std::fabs(x) < kSeriesBand) {
        double S, C;
        sc_series(x, S, C);
        const double E = std::exp(b * t);
        const double G = t * S;  // sum D^n t^{2n+1}/(2n+1)!
        v.f = E * G;
        v.fdot = E * (b * G + C);
        v.fddot = E * ((b * b + D) * G + 2.0 * b * C);
    } else if (D < 0) {
        const double ell = std::sqrt(-D);
        const double E = std::exp(b * t);
        const double s = std::sin(ell * t), c = std::cos(ell * t);
        v.f = E * s / ell;
        v.fdot = E * (b * s / ell + c);
        v.fddot = E * ((b * b - ell * ell) * s / ell + 2.0 * b * c);
    } else {
        const double ell = std::sqrt(D);
        double rp, rm;
        real_roots(lambda, b, ell, rp, rm);
        const double ep = std::exp(rp * t);
        const double em = std::exp(rm * t);
        v.f = -ep * std::expm1(-2.0 * ell * t) / (2.0 * ell);
        v.fdot = (rp * ep - rm * em) / (2.0 * ell);
        v.fddot = (rp * rp * ep - rm * rm * em) / (2.0 * ell);
    }
    check_finite(v, lambda, mu, t);
    return v;
}

// ---------------------------------------------------------------------------

double m_func(double x) {
    // expm1(x) - x cancels about -log10|x| digits, so the series covers |x| < 1.
    if (std::fabs(x) < 1.0) {
        // 1/2 sum_{n>=0} x^n/(n+2)!
        double term = 0.5, sum = 0.5;
        for (int n = 1; n < 40; ++n) {
            term *= x / (n + 2);
            sum += term;
            if (std::fabs(term) < 1e-18 * sum) break;
        }
        return 0.5 * sum;
    }
    return (std::expm1(x) - x) / (2.0 * x * x);
}

double log_m_func(double x) {
    if (x > 30.0) return x + std::log1p(-(x + 1.0) * std::exp(-x)) - std::log(2.0) - 2.0 * std::log(x);
    return std::log(m_func(x));
}

double v_func(double x) {
    // The direct formula loses about 4 digits per decade of |x| below 1, so the
    // series covers |x| < 1.
    if (std::fabs(x) < 1.0) {
        // sum_{n>=4} (2^n + 4 - 4n) x^{n-4} / (4 n!)
        double sum = 0.0, xp = 1.0, fact = 24.0, p2 = 16.0;
        for (int n = 4; n < 60; ++n) {
            const double term = (p2 + 4.0 - 4.0 * n) * xp / (4.0 * fact);
            sum += term;
            if (n > 8 && std::fabs(term) < 1e-18 * std::fabs(sum)) break;
            xp *= x;
            fact *= (n + 1);
            p2 *= 2.0;
        }
        return sum;
    }
    const double e1 = std::expm1(x);
    const double e2 = std::expm1(2.0 * x);
    return (e2 + 4.0 * e1 - 4.0 * x * e1 - 6.0 * x) / (4.0 * x * x * x * x);
}

// ---------------------------------------------------------------------------

EnergyIntegrals energy_integrals_closed(double lambda, double mu, double t) {
    EnergyIntegrals e;
    e.closed_form = true;
    if (t <= 0) return e;
    const double b = 0.5 * mu;
    const double D = b * b - lambda;
    if (D < 0) {
        const double ell = std::isfinite(lambda) ? std::sqrt(-D) : std::numeric_limits<double>::infinity();
        const double P1 = t * phi1(2 * b * t), P2 = t * t * phi2(2 * b * t);
        cplx Z1 = 0.0, Z2 = 0.0, W1 = 0.0;
        if (std::isfinite(ell)) {
            const cplx z(2 * b * t, 2 * ell * t);
            Z1 = t * phi1(z);
            Z2 = t * t * phi2(z);
            W1 = t * phi1(cplx(b * t, ell * t));
        }
        // lambda / ell^2 and b / ell with lambda possibly infinite
        const double lam_over = std::isfinite(lambda) ? lambda / (ell * ell) : 1.0;
        const double b_over = std::isfinite(ell) ? b / ell : 0.0;
        const double inv_ell2 = std::isfinite(ell) ? 1.0 / (ell * ell) : 0.0;
        e.ff = (P1 - Z1.real()) * 0.5 * inv_ell2;
        e.dff = (P2 - Z2.real()) * 0.5 * inv_ell2;
        e.lambda_ff = (P1 - Z1.real()) * 0.5 * lam_over;
        e.lambda_dff = (P2 - Z2.real()) * 0.5 * lam_over;
        e.dd = b_over * b_over * (P1 - Z1.real()) * 0.5 + b_over * Z1.imag() + (P1 + Z1.real()) * 0.5;
        e.ddd = b_over * b_over * (P2 - Z2.real()) * 0.5 + b_over * Z2.imag() + (P2 + Z2.real()) * 0.5;
        if (std::isfinite(ell)) {
            const double f = std::exp(b * t) * std::sin(ell * t) / ell;
            e.f1 = W1.imag() / ell;
            e.d1 = f;
            e.fd = 0.5 * f * f;
        }
    } else {
        const double ell = std::sqrt(D);
        if (ell == 0.0) return energy_integrals_quadrature(lambda, mu, t);
        double rp, rm;
        real_roots(lambda, b, ell, rp, rm);
        const double inv = 1.0 / (4.0 * D);
        const double ap = t * phi1(2 * rp * t), a0 = t * phi1(2 * b * t), am = t * phi1(2 * rm * t);
        const double cp = t * t * phi2(2 * rp * t), c0 = t * t * phi2(2 * b * t), cm = t * t * phi2(2 * rm * t);
        e.ff = (ap - 2 * a0 + am) * inv;
        e.dff = (cp - 2 * c0 + cm) * inv;
        e.dd = (rp * rp * ap - 2 * lambda * a0 + rm * rm * am) * inv;
        e.ddd = (rp * rp * cp - 2 * lambda * c0 + rm * rm * cm) * inv;
        e.lambda_ff = lambda * e.ff;
        e.lambda_dff = lambda * e.dff;
        e.f1 = (t * phi1(rp * t) - t * phi1(rm * t)) / (2 * ell);
        const double f = -std::exp(rp * t) * std::expm1(-2.0 * ell * t) / (2.0 * ell);
        e.d1 = f;
        e.fd = 0.5 * f * f;
    }
    for (double x : {e.ff, e.dd, e.dff, e.ddd, e.f1, e.lambda_ff, e.lambda_dff})
        if (!std::isfinite(x)) throw NumericalError("energy integrals overflow");
    return e;
}

EnergyIntegrals energy_integrals_quadrature(double lambda, double mu, double t, double rel_tol) {
    EnergyIntegrals e;
    if (t <= 0) return e;
    const RootKind rk = characteristic_roots(lambda, mu);
    quad::Options opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-300;
    opt.min_panels = static_cast<std::size_t>(std::ceil(std::max(1.0, rk.ell * t / std::numbers::pi)));
    auto res = quad::integrate<5>(
        [&](double s) {
            const FundValue v = fund_solution(lambda, mu, s);
            return quad::Vec<5>{v.f * v.f, v.fdot * v.fdot, (t - s) * v.f * v.f, (t - s) * v.fdot * v.fdot, v.f};
        },
        0.0, t, opt);
    if (!res.converged) throw QuadratureError("energy integrals did not converge", res.achieved_rel);
    const FundValue end = fund_solution(lambda, mu, t);
    e.ff = res.value[0];
    e.dd = res.value[1];
    e.dff = res.value[2];
    e.ddd = res.value[3];
    e.f1 = res.value[4];
    e.d1 = end.f;
    e.fd = 0.5 * end.f * end.f;
    e.lambda_ff = lambda * e.ff;
    e.lambda_dff = lambda * e.dff;
    return e;
}

EnergyIntegrals energy_integrals(double lambda, double mu, double t) {
    const double b = 0.5 * mu;
    const double D = b * b - lambda;
    if (std::isfinite(D) && std::fabs(D) * t * t < kSeriesBand) return energy_integrals_quadrature(lambda, mu, t);
    return energy_integrals_closed(lambda, mu, t);
}

// ---------------------------------------------------------------------------

ModeMoments mode_moments_closed(double lambda, double mu, double T) {
    const EnergyIntegrals e = energy_integrals_closed(lambda, mu, T);
    ModeMoments m;
    m.int_f2 = e.ff;
    m.int_fdot2 = e.dd;
    m.double_int_f2 = e.dff;
    m.double_int_fdot2 = e.ddd;
    m.int_f_fdot = e.fd;
    m.lambda_int_f2 = e.lambda_ff;
    m.lambda_double_int_f2 = e.lambda_dff;
    m.closed_form = true;
    return m;
}

ModeMoments mode_moments(double lambda, double mu, double T, double rel_tol, std::size_t max_panels) {
    if (!(T > 0)) throw std::invalid_argument("mode_moments: T must be positive");
    const RootKind rk = characteristic_roots(lambda, mu);
    const double panels = std::ceil(std::max(1.0, rk.ell * T / std::numbers::pi));
    if (!std::isfinite(lambda) || panels > double(max_panels)) return mode_moments_closed(lambda, mu, T);
    const EnergyIntegrals e = energy_integrals_quadrature(lambda, mu, T, rel_tol);
    ModeMoments m;
    m.int_f2 = e.ff;
    m.int_fdot2 = e.dd;
    m.double_int_f2 = e.dff;
    m.double_int_fdot2 = e.ddd;
    m.int_f_fdot = e.fd;
    m.lambda_int_f2 = e.lambda_ff;
    m.lambda_double_int_f2 = e.lambda_dff;
    return m;
}

double covariance_u(double lambda, double mu, double s, double t, double rel_tol) {
    if (s < 0 || t < 0) throw std::invalid_argument("covariance_u: negative time");
    const double lo = std::min(s, t);
    if (lo == 0.0) return 0.0;
    const RootKind rk = characteristic_roots(lambda, mu);
    const double scale = std::sqrt(energy_integrals(lambda, mu, s).ff * energy_integrals(lambda, mu, t).ff);
    quad::Options opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-13 * scale;
    opt.min_panels = static_cast<std::size_t>(std::ceil(std::max(1.0, rk.ell * std::max(s, t) / std::numbers::pi)));
    auto res = quad::integrate_scalar(
        [&](double r) { return fund_solution(lambda, mu, s - r).f * fund_solution(lambda, mu, t - r).f; }, 0.0, lo,
        opt);
    if (!res.converged) throw QuadratureError("covariance_u did not converge", res.achieved_rel);
    return res.value[0];
}

double covariance_u_markov(double lambda, double mu, double s, double t) {
    if (s < 0 || t < 0) throw std::invalid_argument("covariance_u_markov: negative time");
    if (s > t) std::swap(s, t);
    if (s == 0.0) return 0.0;
    const EnergyIntegrals e = energy_integrals(lambda, mu, s);
    const FundValue h = fund_solution(lambda, mu, t - s);
    const double g = h.fdot - mu * h.f;
    return g * e.ff + h.f * e.fd;
}

PredictedMoments predicted_moments(double lambda, double mu, double T) {
    if (!(lambda > 0)) throw std::invalid_argument("predicted_moments: lambda must be positive");
    PredictedMoments p;
    const double x = T * mu;
    const double M = m_func(x), V = v_func(x);
    p.Eu2T_asym = T * phi1(x) / (2.0 * lambda);
    p.VarU2T_asym = 3.0 * p.Eu2T_asym * p.Eu2T_asym;
    p.EintU2_asym = T * T * M / lambda;
    p.VarIntU2_asym = T * T * T * T * V / (lambda * lambda);
    p.EintV2_asym = T * T * M;
    p.VarIntV2_asym = T * T * T * T * V;
    return p;
}

// ---------------------------------------------------------------------------

ModePsiTerms psi_terms(const SpectrumSpec& spec, double theta1, double theta2, double T, std::int64_t k) {
    const LambdaMu lm = lambda_mu(spec, theta1, theta2, k);
    if (lm.log_mu.overflows()) throw NumericalError("mu_k overflows at k=" + std::to_string(k));
    const SignedLog tau = spec.tau.evaluate(k);
    const SignedLog nu = spec.nu.evaluate(k);
    const ModeMoments m = mode_moments(lm.lambda, lm.mu, T);
    ModePsiTerms out;
    const bool lam_pos = lm.log_lambda.sign > 0;
    auto lg = [](double v) { return v > 0 ? std::log(v) : -std::numeric_limits<double>::infinity(); };
    if (tau.sign != 0) {
        if (lam_pos) {
            out.t1 = std::exp(2 * tau.log_abs - lm.log_lambda.log_abs + lg(m.lambda_double_int_f2));
            out.a1 = std::exp(2 * tau.log_abs - lm.log_lambda.log_abs + 2 * std::log(T) + log_m_func(T * lm.mu));
        } else {
            out.t1 = std::exp(2 * tau.log_abs + lg(m.double_int_f2));
            out.a1 = std::numeric_limits<double>::quiet_NaN();
        }
    }
    if (nu.sign != 0) {
        out.t2 = std::exp(2 * nu.log_abs + lg(m.double_int_fdot2));
        out.a2 = std::exp(2 * nu.log_abs + 2 * std::log(T) + log_m_func(T * lm.mu));
    }
    if (tau.sign != 0 && nu.sign != 0) {
        const double lff = lam_pos ? lg(m.lambda_int_f2) - lm.log_lambda.log_abs : lg(m.int_f2);
        out.t12 = -0.5 * tau.sign * nu.sign * std::exp(tau.log_abs + nu.log_abs + lff);
    }
    return out;
}

std::vector<PsiValues> psi_table(const SpectrumSpec& spec, double theta1, double theta2, double T,
                                 const std::vector<std::int64_t>& N_list) {
    std::vector<PsiValues> out;
    if (N_list.empty()) return out;
    for (std::size_t i = 0; i < N_list.size(); ++i) {
        if (N_list[i] < 1) throw std::invalid_argument("psi: N must be >= 1");
        if (i > 0 && N_list[i] <= N_list[i - 1]) throw std::invalid_argument("psi: N list must be ascending");
    }
    if (N_list.back() > spec.max_index()) throw std::invalid_argument("psi: N exceeds the spectrum's k_max");
    // Neumaier sums in k order.
    struct Acc {
        double s = 0.0, c = 0.0;
        void add(double x) {
            const double t = s + x;
            c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
            s = t;
        }
        double value() const { return s + c; }
    };
    Acc p1, p2, p12, a1, a2;
    std::size_t next = 0;
    for (std::int64_t k = 1; k <= N_list.back(); ++k) {
        const ModePsiTerms t = psi_terms(spec, theta1, theta2, T, k);
        p1.add(t.t1);
        p2.add(t.t2);
        p12.add(t.t12);
        a1.add(t.a1);
        a2.add(t.a2);
        if (k == N_list[next]) {
            out.push_back({k, p1.value(), p2.value(), p12.value(), a1.value(), a2.value()});
            ++next;
        }
    }
    return out;
}

PsiValues psi(const SpectrumSpec& spec, double theta1, double theta2, double T, std::int64_t N) {
    return psi_table(spec, theta1, theta2, T, {N}).front();
}

PsiValues psi(const SpectrumSpec& spec, const ModelParams& params, std::int64_t N) {
    return psi(spec, params.theta1, params.theta2, params.T, N);
}

double upsilon(double N, double gamma) {
    if (!(N >= 2)) throw std::invalid_argument("upsilon: N must be >= 2");
    if (std::fabs(gamma + 1.0) <= 1e-12) return std::log(N);
    if (gamma < -1.0) throw std::invalid_argument("upsilon: gamma must be >= -1");
    return std::pow(N, gamma + 1.0);
}

}  // namespace shyp

#pragma once

#include <cstdint>
#include <vector>

#include "shyp/spectrum.hpp"

namespace shyp {

// Roots of r^2 - mu r + lambda = 0.
enum class RootTag { complex_pair, double_root, real_pair };

struct RootKind {
    RootTag tag = RootTag::complex_pair;
    double half_mu = 0.0;  // b = mu/2
    double disc = 0.0;     // D = mu^2/4 - lambda
    double ell = 0.0;      // sqrt(|D|)
    double r_plus = 0.0;   // real roots (real_pair and double_root only)
    double r_minus = 0.0;
};

// |D| <= eps * max(mu^2/4, |lambda|) is tagged double_root.
RootKind characteristic_roots(double lambda, double mu, double eps = 1e-8);

struct FundValue {
    double f = 0.0;
    double fdot = 0.0;
    double fddot = 0.0;  // from the branch formulas, not from the ODE
};

// Solution of  f'' - mu f' + lambda f = 0,  f(0) = 0, f'(0) = 1.
FundValue fund_solution(double lambda, double mu, double t);

// M(x) = (e^x - x - 1) / (2 x^2), V(x) = (e^{2x} + 4e^x - 4x e^x - 2x - 5) / (4 x^4).
double m_func(double x);
double v_func(double x);
double log_m_func(double x);

// Integrals over [0, t] of f^2, f f', f'^2, f, f', and the iterated
// integrals int_0^t int_0^s of f^2 and f'^2.  The lambda_* members hold
// lambda times the matching integral; they stay finite when lambda overflows.
struct EnergyIntegrals {
    double ff = 0.0;
    double fd = 0.0;
    double dd = 0.0;
    double f1 = 0.0;
    double d1 = 0.0;
    double dff = 0.0;
    double ddd = 0.0;
    double lambda_ff = 0.0;
    double lambda_dff = 0.0;
    bool closed_form = false;
};

EnergyIntegrals energy_integrals_closed(double lambda, double mu, double t);
EnergyIntegrals energy_integrals_quadrature(double lambda, double mu, double t, double rel_tol = 1e-11);
// Closed form unless the roots nearly coincide over [0, t].
EnergyIntegrals energy_integrals(double lambda, double mu, double t);

// Second moments of one mode over [0, T]:
//   int_f2 = E u(T)^2, int_fdot2 = E v(T)^2, and the time integrals
//   double_int_f2 = E int u^2, double_int_fdot2 = E int v^2.
struct ModeMoments {
    double int_f2 = 0.0;
    double int_fdot2 = 0.0;
    double double_int_f2 = 0.0;
    double double_int_fdot2 = 0.0;
    double int_f_fdot = 0.0;  // f(T)^2 / 2
    double lambda_int_f2 = 0.0;
    double lambda_double_int_f2 = 0.0;
    bool closed_form = false;
};

// Quadrature with at least ceil(ell*T/pi) panels; falls back to the closed
// form when that would take more than max_panels or lambda overflows.
ModeMoments mode_moments(double lambda, double mu, double T, double rel_tol = 1e-9,
                         std::size_t max_panels = 1u << 14);
ModeMoments mode_moments_closed(double lambda, double mu, double T);

// Cov(u(s), u(t)) = int_0^{min(s,t)} f(s-r) f(t-r) dr.
double covariance_u(double lambda, double mu, double s, double t, double rel_tol = 1e-10);
// Same covariance from the Markov property of (u, v).
double covariance_u_markov(double lambda, double mu, double s, double t);

// Large-eigenvalue approximations of the mode moments (lambda > 0).
struct PredictedMoments {
    double Eu2T_asym = 0.0;
    double VarU2T_asym = 0.0;
    double EintU2_asym = 0.0;
    double VarIntU2_asym = 0.0;
    double EintV2_asym = 0.0;
    double VarIntV2_asym = 0.0;
};

PredictedMoments predicted_moments(double lambda, double mu, double T);

// Fisher information growth sums.
struct PsiValues {
    std::int64_t N = 0;
    double psi1 = 0.0;
    double psi2 = 0.0;
    double psi12 = 0.0;
    double psi1_asym = 0.0;
    double psi2_asym = 0.0;
};

struct ModePsiTerms {
    double t1 = 0.0;   // tau^2 E int u^2
    double t2 = 0.0;   // nu^2 E int v^2
    double t12 = 0.0;  // -tau nu E int u v
    double a1 = 0.0;   // tau^2 T^2 M(T mu) / lambda
    double a2 = 0.0;   // nu^2 T^2 M(T mu)
};

ModePsiTerms psi_terms(const SpectrumSpec& spec, double theta1, double theta2, double T, std::int64_t k);

PsiValues psi(const SpectrumSpec& spec, double theta1, double theta2, double T, std::int64_t N);
PsiValues psi(const SpectrumSpec& spec, const ModelParams& params, std::int64_t N);

// Prefix sums at each N in the (ascending) list, from a single pass over k.
std::vector<PsiValues> psi_table(const SpectrumSpec& spec, double theta1, double theta2, double T,
                                 const std::vector<std::int64_t>& N_list);

// Growth scale of sum_{k<=N} k^gamma: N^{gamma+1}, or ln N when gamma == -1
// (within 1e-12).  Requires N >= 2 and gamma >= -1.
double upsilon(double N, double gamma);

}  // namespace shyp

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "shyp/spectrum.hpp"

namespace shyp::catalog {

// Named example spectra on the d-dimensional Dirichlet Laplacian, whose
// eigenvalues are taken as L_k = k^{2/d}.  With lambda = kappa + th1 tau and
// mu = rho + th2 nu the mode equation is u'' = -lambda u + mu u' + w'.
//
//   scaled_laplacian_linear_damping          u_tt = th1 Lap u + th2 u_t
//   laplacian_stiffness_and_damping          u_tt = Lap (th1 u + th2 u_t)
//   laplacian_stiffness_bilaplacian_damping  u_tt = th1 Lap u - th2 Lap^2 u_t
//   shifted_laplacian_pair                   u_tt = (Lap u + th1 u) + (Lap u_t + th2 u_t)
//   bilaplacian_zero_order_stiffness         u_tt + (Lap^2 u + th1 u) = th2 Lap u_t - Lap^2 u_t
//   bilaplacian_laplacian_stiffness          u_tt + (Lap^2 u + th1 Lap u) = th2 u_t - Lap^2 u_t
//   exponential_spectrum_loglog_damping      kappa = e^{2k}, tau = e^k, nu = ln ln(k+3)
//   exponential_unbounded_amplification      tau = e^k, nu = ln k
//
// Fixed equations with no unknown parameter (tau = nu = 0):
//   wave_amplified       u_tt = Lap u + u_t
//   wave_damped          u_tt = Lap u - u_t
//   kelvin_voigt         u_tt = Lap (u + u_t)
//   bilaplacian_damped   u_tt = Lap u - Lap^2 u_t
//   anti_kelvin_voigt    u_tt = Lap (u - u_t)
//   bilaplacian_amplified u_tt = Lap u + Lap^2 u_t
struct Entry {
    std::string name;
    SpectrumSpec spectrum;
    ModelParams params;
    std::string equation;
};

std::vector<std::string> names();
Entry lookup(std::string_view name, int dimension = 1);  // throws std::out_of_range

// The six algebraic examples in table order.
std::vector<std::string> algebraic_examples();

}  // namespace shyp::catalog

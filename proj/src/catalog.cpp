#include "shyp/catalog.hpp"

#include <stdexcept>

namespace shyp::catalog {

namespace {

Generator zero() { return Generator(Constant{0.0}); }
Generator constant(double c) { return Generator(Constant{c}); }
// c * L^p with L = k^{2/d}
Generator lap(double c, double p, int d) { return Generator(PowerLaw{c, 2.0 * p / d}); }

SpectrumSpec make(Generator kappa, Generator tau, Generator rho, Generator nu, int d) {
    SpectrumSpec s;
    s.kappa = std::move(kappa);
    s.tau = std::move(tau);
    s.rho = std::move(rho);
    s.nu = std::move(nu);
    s.dimension = d;
    return s;
}

ModelParams params(double t1, Interval b1, double t2, Interval b2, double T = 1.0) {
    ModelParams p;
    p.theta1 = t1;
    p.theta2 = t2;
    p.theta1_box = b1;
    p.theta2_box = b2;
    p.T = T;
    return p;
}

ModelParams fixed() { return params(1.0, {1.0, 1.0}, 1.0, {1.0, 1.0}); }

}  // namespace

std::vector<std::string> algebraic_examples() {
    return {"scaled_laplacian_linear_damping",  "laplacian_stiffness_and_damping",
            "laplacian_stiffness_bilaplacian_damping", "shifted_laplacian_pair",
            "bilaplacian_zero_order_stiffness", "bilaplacian_laplacian_stiffness"};
}

std::vector<std::string> names() {
    auto v = algebraic_examples();
    for (const char* n : {"exponential_spectrum_loglog_damping", "exponential_unbounded_amplification", "wave_amplified",
                          "wave_damped", "kelvin_voigt", "bilaplacian_damped", "anti_kelvin_voigt",
                          "bilaplacian_amplified"})
        v.emplace_back(n);
    return v;
}

Entry lookup(std::string_view name, int d) {
    if (d < 1) throw std::invalid_argument("dimension must be positive");
    Entry e;
    e.name = std::string(name);
    if (name == "scaled_laplacian_linear_damping") {
        e.spectrum = make(zero(), lap(1, 1, d), zero(), constant(1), d);
        e.params = params(1.0, {0.5, 2.0}, -0.5, {-1.0, 1.0});
        e.equation = "u_tt = th1 Lap u + th2 u_t";
    } else if (name == "laplacian_stiffness_and_damping") {
        e.spectrum = make(zero(), lap(1, 1, d), zero(), lap(-1, 1, d), d);
        e.params = params(1.0, {0.5, 2.0}, 1.0, {0.5, 2.0});
        e.equation = "u_tt = Lap (th1 u + th2 u_t)";
    } else if (name == "laplacian_stiffness_bilaplacian_damping") {
        e.spectrum = make(zero(), lap(1, 1, d), zero(), lap(-1, 2, d), d);
        e.params = params(1.0, {0.5, 2.0}, 1.0, {0.5, 2.0});
        e.equation = "u_tt = th1 Lap u - th2 Lap^2 u_t";
    } else if (name == "shifted_laplacian_pair") {
        e.spectrum = make(lap(1, 1, d), constant(-1), lap(-1, 1, d), constant(1), d);
        e.params = params(1.0, {-1.0, 1.0}, 1.0, {-1.0, 1.0});
        e.equation = "u_tt = (Lap u + th1 u) + (Lap u_t + th2 u_t)";
    } else if (name == "bilaplacian_zero_order_stiffness") {
        e.spectrum = make(lap(1, 2, d), constant(1), lap(-1, 2, d), lap(-1, 1, d), d);
        e.params = params(1.0, {-0.5, 2.0}, 1.0, {-1.0, 2.0});
        e.equation = "u_tt + (Lap^2 u + th1 u) = th2 Lap u_t - Lap^2 u_t";
    } else if (name == "bilaplacian_laplacian_stiffness") {
        e.spectrum = make(lap(1, 2, d), lap(-1, 1, d), lap(-1, 2, d), constant(1), d);
        e.params = params(1.0, {-1.0, 1.0}, 1.0, {-1.0, 2.0});
        e.equation = "u_tt + (Lap^2 u + th1 Lap u) = th2 u_t - Lap^2 u_t";
    } else if (name == "exponential_spectrum_loglog_damping") {
        e.spectrum = make(Generator(ExpLaw{1.0, 2.0}), Generator(ExpLaw{1.0, 1.0}), zero(),
                          Generator(LogLogLaw{1.0, 3.0}), d);
        e.params = params(1.0, {0.5, 2.0}, 1.0, {0.5, 2.0});
        e.equation = "kappa_k = e^{2k}, tau_k = e^k, rho_k = 0, nu_k = ln ln(k+3)";
    } else if (name == "exponential_unbounded_amplification") {
        e.spectrum = make(zero(), Generator(ExpLaw{1.0, 1.0}), zero(), Generator(LogLaw{1.0, 1.0, 0.0}), d);
        e.params = params(1.0, {0.5, 2.0}, 1.0, {0.5, 2.0});
        e.equation = "kappa_k = rho_k = 0, tau_k = e^k, nu_k = ln k";
    } else if (name == "wave_amplified") {
        e.spectrum = make(lap(1, 1, d), zero(), constant(1), zero(), d);
        e.params = fixed();
        e.equation = "u_tt = Lap u + u_t";
    } else if (name == "wave_damped") {
        e.spectrum = make(lap(1, 1, d), zero(), constant(-1), zero(), d);
        e.params = fixed();
        e.equation = "u_tt = Lap u - u_t";
    } else if (name == "kelvin_voigt") {
        e.spectrum = make(lap(1, 1, d), zero(), lap(-1, 1, d), zero(), d);
        e.params = fixed();
        e.equation = "u_tt = Lap (u + u_t)";
    } else if (name == "bilaplacian_damped") {
        e.spectrum = make(lap(1, 1, d), zero(), lap(-1, 2, d), zero(), d);
        e.params = fixed();
        e.equation = "u_tt = Lap u - Lap^2 u_t";
    } else if (name == "anti_kelvin_voigt") {
        e.spectrum = make(lap(1, 1, d), zero(), lap(1, 1, d), zero(), d);
        e.params = fixed();
        e.equation = "u_tt = Lap (u - u_t)";
    } else if (name == "bilaplacian_amplified") {
        e.spectrum = make(lap(1, 1, d), zero(), lap(1, 2, d), zero(), d);
        e.params = fixed();
        e.equation = "u_tt = Lap u + Lap^2 u_t";
    } else {
        throw std::out_of_range("unknown catalog spectrum: " + std::string(name));
    }
    return e;
}

}  // namespace shyp::catalog

#pragma once

#include <cstddef>
#include <string_view>

namespace shyp::kernels {

// Left-endpoint sums over one mode path with n steps.  u and v have n+1
// entries, dw has n.  When want_scheme is set, dws_i = (v_{i+1} - v_i) +
// lam_dt*u_i - mu_dt*v_i is the increment implied by the explicit scheme.
struct ModeSums {
    double uu = 0.0;    // sum u_i^2
    double vv = 0.0;    // sum v_i^2
    double uv = 0.0;    // sum u_i v_i
    double u_dv = 0.0;  // sum u_i (v_{i+1} - v_i)
    double v_dv = 0.0;  // sum v_i (v_{i+1} - v_i)
    double u_dw = 0.0;  // sum u_i dw_i
    double v_dw = 0.0;  // sum v_i dw_i
    double u_dws = 0.0;
    double v_dws = 0.0;
};

struct SchemeCoeffs {
    bool want_scheme = false;
    double lam_dt = 0.0;
    double mu_dt = 0.0;
};

using ModeSumsFn = ModeSums (*)(const double* u, const double* v, const double* dw, std::size_t n,
                                SchemeCoeffs scheme);

struct KernelSet {
    std::string_view name;
    ModeSumsFn mode_sums;
};

const KernelSet& scalar_kernels();
// nullptr when the CPU lacks AVX2/FMA or the build did not include it.
const KernelSet* avx2_kernels();

// AVX2 when available unless SHYP_KERNELS=scalar is set in the environment.
const KernelSet& active_kernels();

}  // namespace shyp::kernels

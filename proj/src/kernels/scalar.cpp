#include <cmath>

#include "shyp/kernels.hpp"

namespace shyp::kernels {

namespace {

// Compensated dot-product accumulator (TwoSum + FMA-based TwoProduct).
struct Dot2 {
    double s = 0.0;
    double c = 0.0;
    void add(double a, double b) {
        const double p = a * b;
        const double pe = std::fma(a, b, -p);
        const double t = s + p;
        const double z = t - s;
        const double se = (s - (t - z)) + (p - z);
        s = t;
        c += se + pe;
    }
    double value() const { return s + c; }
};

ModeSums mode_sums_scalar(const double* u, const double* v, const double* dw, std::size_t n, SchemeCoeffs sc) {
    Dot2 uu, vv, uv, udv, vdv, udw, vdw, uds, vds;
    for (std::size_t i = 0; i < n; ++i) {
        const double ui = u[i], vi = v[i];
        const double dv = v[i + 1] - vi;
        uu.add(ui, ui);
        vv.add(vi, vi);
        uv.add(ui, vi);
        udv.add(ui, dv);
        vdv.add(vi, dv);
        udw.add(ui, dw[i]);
        vdw.add(vi, dw[i]);
        if (sc.want_scheme) {
            const double ds = dv + (sc.lam_dt * ui - sc.mu_dt * vi);
            uds.add(ui, ds);
            vds.add(vi, ds);
        }
    }
    return {uu.value(), vv.value(), uv.value(), udv.value(), vdv.value(),
            udw.value(), vdw.value(), uds.value(), vds.value()};
}

}  // namespace

const KernelSet& scalar_kernels() {
    static const KernelSet k{"scalar", &mode_sums_scalar};
    return k;
}

}  // namespace shyp::kernels

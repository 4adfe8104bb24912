#include <cmath>

#include "shyp/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define SHYP_HAVE_AVX2 1
#include <immintrin.h>
#endif

namespace shyp::kernels {

#ifdef SHYP_HAVE_AVX2

namespace {

#define SHYP_AVX2 __attribute__((target("avx2,fma")))

struct Dot2v {
    __m256d s, c;
};

SHYP_AVX2 inline void dot2_init(Dot2v& d) {
    d.s = _mm256_setzero_pd();
    d.c = _mm256_setzero_pd();
}

SHYP_AVX2 inline void dot2_add(Dot2v& d, __m256d a, __m256d b) {
    const __m256d p = _mm256_mul_pd(a, b);
    const __m256d pe = _mm256_fmsub_pd(a, b, p);
    const __m256d t = _mm256_add_pd(d.s, p);
    const __m256d z = _mm256_sub_pd(t, d.s);
    const __m256d se = _mm256_add_pd(_mm256_sub_pd(d.s, _mm256_sub_pd(t, z)), _mm256_sub_pd(p, z));
    d.s = t;
    d.c = _mm256_add_pd(d.c, _mm256_add_pd(se, pe));
}

// Scalar TwoSum used to fold the lanes and the tail.
struct Fold {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double t = s + x;
        const double z = t - s;
        c += (s - (t - z)) + (x - z);
        s = t;
    }
    void add_prod(double a, double b) {
        const double p = a * b;
        add(p);
        c += std::fma(a, b, -p);
    }
    double value() const { return s + c; }
};

SHYP_AVX2 double finish(const Dot2v& d, Fold& tail) {
    alignas(32) double s[4], c[4];
    _mm256_store_pd(s, d.s);
    _mm256_store_pd(c, d.c);
    Fold f;
    for (int i = 0; i < 4; ++i) f.add(s[i]);
    f.add(tail.s);
    double comp = f.c + tail.c;
    for (int i = 0; i < 4; ++i) comp += c[i];
    return f.s + comp;
}

SHYP_AVX2 ModeSums mode_sums_avx2(const double* u, const double* v, const double* dw, std::size_t n,
                                  SchemeCoeffs sc) {
    Dot2v uu, vv, uv, udv, vdv, udw, vdw, uds, vds;
    for (Dot2v* d : {&uu, &vv, &uv, &udv, &vdv, &udw, &vdw, &uds, &vds}) dot2_init(*d);
    const __m256d lam = _mm256_set1_pd(sc.lam_dt);
    const __m256d mu = _mm256_set1_pd(sc.mu_dt);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ui = _mm256_loadu_pd(u + i);
        const __m256d vi = _mm256_loadu_pd(v + i);
        const __m256d vn = _mm256_loadu_pd(v + i + 1);
        const __m256d wi = _mm256_loadu_pd(dw + i);
        const __m256d dv = _mm256_sub_pd(vn, vi);
        dot2_add(uu, ui, ui);
        dot2_add(vv, vi, vi);
        dot2_add(uv, ui, vi);
        dot2_add(udv, ui, dv);
        dot2_add(vdv, vi, dv);
        dot2_add(udw, ui, wi);
        dot2_add(vdw, vi, wi);
        if (sc.want_scheme) {
            const __m256d drift = _mm256_sub_pd(_mm256_mul_pd(lam, ui), _mm256_mul_pd(mu, vi));
            const __m256d ds = _mm256_add_pd(dv, drift);
            dot2_add(uds, ui, ds);
            dot2_add(vds, vi, ds);
        }
    }
    Fold t_uu, t_vv, t_uv, t_udv, t_vdv, t_udw, t_vdw, t_uds, t_vds;
    for (; i < n; ++i) {
        const double ui = u[i], vi = v[i];
        const double dv = v[i + 1] - vi;
        t_uu.add_prod(ui, ui);
        t_vv.add_prod(vi, vi);
        t_uv.add_prod(ui, vi);
        t_udv.add_prod(ui, dv);
        t_vdv.add_prod(vi, dv);
        t_udw.add_prod(ui, dw[i]);
        t_vdw.add_prod(vi, dw[i]);
        if (sc.want_scheme) {
            const double ds = dv + (sc.lam_dt * ui - sc.mu_dt * vi);
            t_uds.add_prod(ui, ds);
            t_vds.add_prod(vi, ds);
        }
    }
    return {finish(uu, t_uu),   finish(vv, t_vv),   finish(uv, t_uv),   finish(udv, t_udv), finish(vdv, t_vdv),
            finish(udw, t_udw), finish(vdw, t_vdw), finish(uds, t_uds), finish(vds, t_vds)};
}

}  // namespace

const KernelSet* avx2_kernels() {
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    static const KernelSet k{"avx2", &mode_sums_avx2};
    return ok ? &k : nullptr;
}

#else

const KernelSet* avx2_kernels() { return nullptr; }

#endif

}  // namespace shyp::kernels

#pragma once

// Adaptive Gauss-Kronrod (7/15) integration of vector-valued integrands on a
// dyadic bisection tree.  A fixed number of initial panels can be requested so
// that oscillatory integrands are resolved before the error estimate is trusted.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace shyp::quad {

template <std::size_t K>
using Vec = std::array<double, K>;

struct Options {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    std::size_t min_panels = 1;
    std::size_t max_intervals = 1u << 18;
};

template <std::size_t K>
struct Result {
    Vec<K> value{};
    Vec<K> error{};
    std::size_t evaluations = 0;
    bool converged = false;
    double achieved_rel = 0.0;  // max over components of error / |value|
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kXgk[1], kXgk[3], kXgk[5], kXgk[7].
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t K>
struct Panel {
    double a, b;
    Vec<K> value;
    Vec<K> error;
    double key;
};

template <std::size_t K, class F>
Panel<K> kronrod(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Vec<K> kr{}, ga{};
    auto add = [&](const Vec<K>& y, double wk, double wg) {
        for (std::size_t i = 0; i < K; ++i) {
            kr[i] += wk * y[i];
            ga[i] += wg * y[i];
        }
    };
    add(f(c), kWgk[7], kWg[3]);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double wg = (j % 2 == 1) ? kWg[j / 2] : 0.0;
        add(f(c - dx), kWgk[j], wg);
        add(f(c + dx), kWgk[j], wg);
    }
    Panel<K> p{a, b, {}, {}, 0.0};
    for (std::size_t i = 0; i < K; ++i) {
        p.value[i] = kr[i] * h;
        p.error[i] = std::fabs((kr[i] - ga[i]) * h);
    }
    return p;
}

}  // namespace detail

// f: double -> Vec<K>.  Convergence is declared when every component satisfies
// error <= max(abs_tol, rel_tol * |value|).
template <std::size_t K, class F>
Result<K> integrate(F&& f, double a, double b, const Options& opts = {}) {
    using detail::Panel;
    Result<K> out;
    if (!(b > a)) {
        out.converged = true;
        return out;
    }
    const std::size_t n0 = std::max<std::size_t>(1, opts.min_panels);
    std::vector<Panel<K>> panels;
    panels.reserve(n0 * 2);
    for (std::size_t j = 0; j < n0; ++j) {
        const double pa = a + (b - a) * double(j) / double(n0);
        const double pb = (j + 1 == n0) ? b : a + (b - a) * double(j + 1) / double(n0);
        panels.push_back(detail::kronrod<K>(f, pa, pb));
    }
    out.evaluations = 15 * n0;

    auto totals = [&](Vec<K>& v, Vec<K>& e) {
        v.fill(0.0);
        e.fill(0.0);
        // Summed in panel order for reproducibility.
        std::vector<const Panel<K>*> ordered;
        ordered.reserve(panels.size());
        for (const auto& p : panels) ordered.push_back(&p);
        std::sort(ordered.begin(), ordered.end(), [](auto* x, auto* y) { return x->a < y->a; });
        for (auto* p : ordered)
            for (std::size_t i = 0; i < K; ++i) {
                v[i] += p->value[i];
                e[i] += p->error[i];
            }
    };

    Vec<K> weight{};
    auto reweight = [&](const Vec<K>& v) {
        for (std::size_t i = 0; i < K; ++i) {
            const double tol = std::max(opts.abs_tol, opts.rel_tol * std::fabs(v[i]));
            weight[i] = tol > 0 ? 1.0 / tol : 1.0 / std::numeric_limits<double>::min();
        }
        for (auto& p : panels) {
            p.key = 0.0;
            for (std::size_t i = 0; i < K; ++i) p.key = std::max(p.key, p.error[i] * weight[i]);
        }
    };
    auto cmp = [](const Panel<K>& x, const Panel<K>& y) { return x.key < y.key; };

    auto is_converged = [&](const Vec<K>& v, const Vec<K>& e) {
        for (std::size_t i = 0; i < K; ++i)
            if (e[i] > std::max(opts.abs_tol, opts.rel_tol * std::fabs(v[i]))) return false;
        return true;
    };

    Vec<K> v, e;
    totals(v, e);
    std::size_t next_reweight = panels.size() * 2;
    reweight(v);
    std::make_heap(panels.begin(), panels.end(), cmp);

    // Running totals are updated incrementally; a full ordered recount is done
    // on reweight and at exit.
    while (!is_converged(v, e) && panels.size() < opts.max_intervals) {
        std::pop_heap(panels.begin(), panels.end(), cmp);
        Panel<K> worst = panels.back();
        panels.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval cannot be split further in floating point.
            worst.key = 0.0;
            panels.push_back(worst);
            std::push_heap(panels.begin(), panels.end(), cmp);
            bool any = false;
            for (const auto& p : panels) any = any || p.key > 0.0;
            if (!any) break;
            continue;
        }
        Panel<K> left = detail::kronrod<K>(f, worst.a, mid);
        Panel<K> right = detail::kronrod<K>(f, mid, worst.b);
        out.evaluations += 30;
        for (std::size_t i = 0; i < K; ++i) {
            v[i] += left.value[i] + right.value[i] - worst.value[i];
            e[i] += left.error[i] + right.error[i] - worst.error[i];
        }
        for (Panel<K>* p : {&left, &right}) {
            p->key = 0.0;
            for (std::size_t i = 0; i < K; ++i) p->key = std::max(p->key, p->error[i] * weight[i]);
            panels.push_back(*p);
            std::push_heap(panels.begin(), panels.end(), cmp);
        }
        if (panels.size() >= next_reweight) {
            totals(v, e);
            reweight(v);
            std::make_heap(panels.begin(), panels.end(), cmp);
            next_reweight = panels.size() * 2;
        }
    }
    totals(v, e);
    out.value = v;
    out.error = e;
    out.converged = is_converged(v, e);
    out.achieved_rel = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        const double denom = std::fabs(v[i]);
        const double r = denom > 0 ? e[i] / denom : (e[i] > 0 ? std::numeric_limits<double>::infinity() : 0.0);
        out.achieved_rel = std::max(out.achieved_rel, r);
    }
    return out;
}

// Scalar convenience wrapper.
template <class F>
Result<1> integrate_scalar(F&& f, double a, double b, const Options& opts = {}) {
    return integrate<1>([&](double x) { return Vec<1>{f(x)}; }, a, b, opts);
}

}  // namespace shyp::quad

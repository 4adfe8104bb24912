#include "shyp/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "shyp/fundamental.hpp"

namespace shyp {

namespace {

constexpr std::size_t kMaxWitnesses = 20;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

SignedLog signed_pow_log(double coefficient, double log_base_abs, int base_sign, double exponent) {
    // coefficient * base^exponent with base given in sign/log form.
    if (coefficient == 0.0) return {};
    int sign = coefficient > 0 ? 1 : -1;
    if (base_sign == 0) {
        if (exponent > 0) return {};
        if (exponent == 0) return SignedLog::from_value(coefficient);
        throw std::domain_error("generator: zero base raised to negative power");
    }
    if (base_sign < 0) {
        const double r = std::round(exponent);
        if (r != exponent) throw std::domain_error("generator: negative base with non-integer exponent");
        if (std::fmod(std::fabs(r), 2.0) == 1.0) sign = -sign;
    }
    return {sign, std::log(std::fabs(coefficient)) + exponent * log_base_abs};
}

std::vector<double> theta_points(Interval box, int resolution) {
    std::vector<double> pts;
    if (box.lo == box.hi) return {box.lo};
    const int n = std::max(2, resolution);
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        pts.push_back(i + 1 == n ? box.hi : box.lo + (box.hi - box.lo) * double(i) / double(n - 1));
    }
    return pts;
}

std::vector<double> corners(Interval box) {
    if (box.lo == box.hi) return {box.lo};
    return {box.lo, box.hi};
}

SignedLog lambda_log(const SpectrumSpec& spec, double theta, std::int64_t k) {
    return spec.kappa.evaluate(k) + spec.tau.evaluate(k) * theta;
}

SignedLog mu_log(const SpectrumSpec& spec, double theta, std::int64_t k) {
    return spec.rho.evaluate(k) + spec.nu.evaluate(k) * theta;
}

// a + c for a real constant c >= 0.
SignedLog shift(SignedLog a, double c) { return a + SignedLog::from_value(c); }

void validate_range(const SpectrumSpec& spec, IndexRange r) {
    if (r.first < 1 || r.last < r.first) throw std::invalid_argument("empty or invalid k range");
    if (r.last > spec.max_index()) throw std::invalid_argument("k range exceeds the spectrum's k_max");
}

bool in_last_decile(IndexRange r, std::int64_t k) {
    const std::int64_t span = r.last - r.first + 1;
    return k > r.last - std::max<std::int64_t>(1, span / 10);
}

// double value of a SignedLog, saturating.
double to_double(SignedLog x) { return x.value(); }

// Growth verdict for the tail of a sequence sampled at three indices q < m < K.
// Increments that keep pace (ratio >= 0.8) indicate unbounded growth.
Verdict tail_growth(SignedLog vq, SignedLog vm, SignedLog vK) {
    const SignedLog inc1 = vK - vm;
    const SignedLog inc0 = vm - vq;
    if (inc1.sign <= 0) return Verdict::fail;
    if (inc0.sign <= 0) return Verdict::inconclusive;
    const double log_ratio = inc1.log_abs - inc0.log_abs;
    if (log_ratio >= std::log(0.8)) return Verdict::pass;
    if (log_ratio <= std::log(0.55)) return Verdict::fail;
    return Verdict::inconclusive;
}

Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
    if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
    return Verdict::pass;
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

// ---------------------------------------------------------------------------

SignedLog Generator::evaluate(std::int64_t k) const {
    if (k < 1) throw std::out_of_range("eigenvalue index must be >= 1");
    const double kd = static_cast<double>(k);
    SignedLog out = std::visit(
        Overloaded{
            [&](const PowerLaw& g) { return signed_pow_log(g.coefficient, std::log(kd), 1, g.exponent); },
            [&](const ExpLaw& g) {
                if (g.coefficient == 0.0) return SignedLog{};
                return SignedLog{g.coefficient > 0 ? 1 : -1, std::log(std::fabs(g.coefficient)) + g.rate * kd};
            },
            [&](const LogLaw& g) {
                const double base = std::log(kd + g.shift);
                if (!std::isfinite(base)) throw std::domain_error("log_law: ln(k+shift) undefined");
                const int s = base > 0 ? 1 : (base < 0 ? -1 : 0);
                return signed_pow_log(g.coefficient, std::log(std::fabs(base)), s, g.exponent);
            },
            [&](const LogLogLaw& g) {
                const double inner = std::log(kd + g.shift);
                if (!(inner > 0)) throw std::domain_error("loglog_law: ln(k+shift) must be positive");
                return SignedLog::from_value(g.coefficient * std::log(inner));
            },
            [&](const Constant& g) { return SignedLog::from_value(g.value); },
            [&](const Explicit& g) {
                if (k > static_cast<std::int64_t>(g.values.size()))
                    throw std::out_of_range("explicit generator: index beyond list");
                return SignedLog::from_value(g.values[static_cast<std::size_t>(k - 1)]);
            }},
        law_);
    if (alternating_ && (k % 2 == 1)) out = -out;
    return out;
}

std::optional<std::int64_t> Generator::length() const {
    if (const auto* e = std::get_if<Explicit>(&law_)) return static_cast<std::int64_t>(e->values.size());
    return std::nullopt;
}

std::optional<std::pair<double, double>> Generator::power_term() const {
    if (alternating_) return std::nullopt;
    if (const auto* p = std::get_if<PowerLaw>(&law_)) {
        if (p->coefficient == 0.0) return std::nullopt;
        return std::make_pair(p->coefficient, p->exponent);
    }
    if (const auto* c = std::get_if<Constant>(&law_)) {
        if (c->value == 0.0) return std::nullopt;
        return std::make_pair(c->value, 0.0);
    }
    return std::nullopt;
}

bool Generator::identically_zero() const {
    return std::visit(Overloaded{[](const PowerLaw& g) { return g.coefficient == 0.0; },
                                 [](const ExpLaw& g) { return g.coefficient == 0.0; },
                                 [](const LogLaw& g) { return g.coefficient == 0.0; },
                                 [](const LogLogLaw& g) { return g.coefficient == 0.0; },
                                 [](const Constant& g) { return g.value == 0.0; },
                                 [](const Explicit& g) {
                                     return std::all_of(g.values.begin(), g.values.end(),
                                                        [](double v) { return v == 0.0; });
                                 }},
                      law_);
}

std::int64_t SpectrumSpec::max_index() const {
    std::int64_t m = k_max;
    for (const Generator* g : {&kappa, &tau, &rho, &nu})
        if (auto len = g->length()) m = std::min(m, *len);
    return m;
}

void ModelParams::validate() const {
    for (const Interval* b : {&theta1_box, &theta2_box}) {
        if (!std::isfinite(b->lo) || !std::isfinite(b->hi)) throw std::invalid_argument("parameter box must be compact");
        if (b->lo > b->hi) throw std::invalid_argument("parameter box has lo > hi");
    }
    if (!theta1_box.contains(theta1)) throw std::invalid_argument("theta1 outside its box");
    if (!theta2_box.contains(theta2)) throw std::invalid_argument("theta2 outside its box");
    if (!(T > 0) || !std::isfinite(T)) throw std::invalid_argument("horizon T must be positive");
}

EigenvalueQuad eigenvalues(const SpectrumSpec& spec, std::int64_t k) {
    if (k < 1 || k > spec.max_index()) throw std::out_of_range("eigenvalue index outside [1, k_max]");
    EigenvalueQuad q;
    q.logs = {spec.kappa.evaluate(k), spec.tau.evaluate(k), spec.rho.evaluate(k), spec.nu.evaluate(k)};
    for (std::size_t i = 0; i < 4; ++i) {
        q.values[i] = q.logs[i].value();
        q.overflow = q.overflow || q.logs[i].overflows();
    }
    return q;
}

LambdaMu lambda_mu(const SpectrumSpec& spec, double theta1, double theta2, std::int64_t k) {
    if (k < 1 || k > spec.max_index()) throw std::out_of_range("eigenvalue index outside [1, k_max]");
    LambdaMu out;
    out.log_lambda = lambda_log(spec, theta1, k);
    out.log_mu = mu_log(spec, theta2, k);
    out.lambda = out.log_lambda.value();
    out.mu = out.log_mu.value();
    return out;
}

// ---------------------------------------------------------------------------
// Hyperbolicity
// ---------------------------------------------------------------------------

ConditionReport check_hyperbolic(const SpectrumSpec& spec, const ModelParams& params, IndexRange r,
                                 int theta_grid_resolution, const HyperbolicConstants& fixed) {
    validate_range(spec, r);
    params.validate();
    if (theta_grid_resolution < 1) throw std::invalid_argument("theta grid resolution must be positive");

    ConditionReport rep;
    rep.checked_range = r;
    const auto th1 = theta_points(params.theta1_box, theta_grid_resolution);
    const auto th1c = corners(params.theta1_box);
    const auto th2c = corners(params.theta2_box);
    const std::int64_t n = r.last - r.first + 1;

    // lambda_k(theta) for every grid theta.
    std::vector<std::vector<SignedLog>> lam(th1.size(), std::vector<SignedLog>(static_cast<std::size_t>(n)));
    SignedLog lam_min = SignedLog::from_log(1, std::numeric_limits<double>::infinity());
    std::int64_t k_min = r.first;
    double th_min = th1.front();
    for (std::size_t j = 0; j < th1.size(); ++j)
        for (std::int64_t k = r.first; k <= r.last; ++k) {
            const SignedLog v = lambda_log(spec, th1[j], k);
            lam[j][static_cast<std::size_t>(k - r.first)] = v;
            if ((v - lam_min).sign < 0) {
                lam_min = v;
                k_min = k;
                th_min = th1[j];
            }
        }

    Verdict v1 = Verdict::pass;

    // Smallest C* on {0, 1, 2, 4, ..., 2^20} making lambda + C* positive, refined by bisection.
    auto positive_with = [&](double c) { return shift(lam_min, c).sign > 0; };
    if (fixed.C_star) {
        rep.C_star = *fixed.C_star;
        if (!positive_with(rep.C_star)) {
            v1 = Verdict::fail;
            rep.witnesses.push_back({k_min, th_min, params.theta2, "lambda_k + C* > 0", to_double(shift(lam_min, rep.C_star)), 0.0});
        }
    } else {
        double prev = 0.0, found = -1.0;
        if (positive_with(0.0)) {
            found = 0.0;
        } else {
            for (int p = 0; p <= 20; ++p) {
                const double c = std::ldexp(1.0, p);
                if (positive_with(c)) {
                    found = c;
                    break;
                }
                prev = c;
            }
            if (found > 0) {
                double lo = prev, hi = found;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (positive_with(mid)) hi = mid; else lo = mid;
                }
                found = hi;
            }
        }
        if (found < 0) {
            v1 = Verdict::fail;
            rep.C_star = std::ldexp(1.0, 20);
            rep.witnesses.push_back({k_min, th_min, params.theta2, "lambda_k + C* > 0 for some C* <= 2^20",
                                     to_double(lam_min), 0.0});
        } else {
            rep.C_star = found;
        }
    }

    // Non-decreasing in k.
    {
        bool early = false, late = false;
        for (std::size_t j = 0; j < th1.size(); ++j)
            for (std::int64_t k = r.first; k < r.last; ++k) {
                const SignedLog a = lam[j][static_cast<std::size_t>(k - r.first)];
                const SignedLog b = lam[j][static_cast<std::size_t>(k + 1 - r.first)];
                const SignedLog d = b - a;
                const double scale = std::max(a.sign ? a.log_abs : -INFINITY, b.sign ? b.log_abs : -INFINITY);
                if (d.sign < 0 && d.log_abs > scale + std::log(1e-12)) {
                    (in_last_decile(r, k + 1) ? late : early) = true;
                    if (rep.witnesses.size() < kMaxWitnesses)
                        rep.witnesses.push_back({k + 1, th1[j], params.theta2, "lambda_{k+1} >= lambda_k",
                                                 to_double(b), to_double(a)});
                }
            }
        if (early) v1 = Verdict::fail;
        else if (late) v1 = combine(v1, Verdict::inconclusive);
    }

    // Unbounded.
    if (n >= 4) {
        const std::int64_t q = r.first + (n - 1) / 4, m = r.first + (n - 1) / 2;
        for (double t : th1c) {
            const Verdict g = tail_growth(lambda_log(spec, t, q), lambda_log(spec, t, m), lambda_log(spec, t, r.last));
            if (g == Verdict::fail && rep.witnesses.size() < kMaxWitnesses)
                rep.witnesses.push_back({r.last, t, params.theta2, "lambda_k unbounded",
                                         to_double(lambda_log(spec, t, r.last)), to_double(lambda_log(spec, t, m))});
            if (g != Verdict::pass) rep.notes.push_back("lambda growth tail verdict: " + std::string(to_string(g)));
            v1 = combine(v1, g);
        }
    } else {
        v1 = combine(v1, Verdict::inconclusive);
        rep.notes.push_back("k range too short to judge unboundedness");
    }

    // Ratio bounds: (lambda(theta)+C*)/(lambda(theta')+C*) over the box.
    {
        auto ratio_at = [&](std::int64_t k) {
            SignedLog hi = SignedLog::from_log(1, -INFINITY), lo = SignedLog::from_log(1, INFINITY);
            for (std::size_t j = 0; j < th1.size(); ++j) {
                const SignedLog v = shift(lam[j][static_cast<std::size_t>(k - r.first)], rep.C_star);
                if (v.sign <= 0) return std::numeric_limits<double>::infinity();
                if (v.log_abs > hi.log_abs) hi = v;
                if (v.log_abs < lo.log_abs) lo = v;
            }
            return std::exp(hi.log_abs - lo.log_abs);
        };
        double rmax = 1.0;
        for (std::int64_t k = r.first; k <= r.last; ++k) rmax = std::max(rmax, ratio_at(k));
        rep.c2 = rmax;
        rep.c1 = 1.0 / rmax;
        if (!std::isfinite(rmax)) {
            v1 = Verdict::fail;
        } else if (n >= 4) {
            const std::int64_t q = r.first + (n - 1) / 4, m = r.first + (n - 1) / 2;
            const double rq = ratio_at(q), rm = ratio_at(m), rK = ratio_at(r.last);
            if (rK > 1.1 * rm && rm > 1.1 * rq) {
                v1 = Verdict::fail;
                rep.witnesses.push_back({r.last, params.theta1_box.hi, params.theta2, "ratio bound c1 <= ratio <= c2", rK, rm});
            } else if (rK > 1.01 * rm && rK > rq * 1.01) {
                v1 = combine(v1, Verdict::inconclusive);
                rep.notes.push_back("lambda ratio across the box still growing at range end");
            }
        }
    }

    // Amplification bound: T mu_k(theta2) <= ln lambda_k(theta1) + C for k >= J.
    Verdict v2 = Verdict::pass;
    {
        std::int64_t J = r.last + 1;
        if (fixed.J) {
            J = *fixed.J;
        } else {
            for (std::int64_t k = r.last; k >= r.first; --k) {
                bool ok = true;
                for (double t : th1c) ok = ok && lambda_log(spec, t, k).sign > 0;
                if (!ok) break;
                J = k;
            }
        }
        rep.J = J;
        if (J > r.last || in_last_decile(r, J)) {
            v2 = Verdict::fail;
            rep.notes.push_back("lambda_k not eventually positive on the checked range");
        } else {
            auto excess = [&](std::int64_t k, double& t1w, double& t2w) {
                double best = -INFINITY;
                for (double a : th1c)
                    for (double b : th2c) {
                        const SignedLog lm = lambda_log(spec, a, k);
                        const double g = (lm.sign > 0) ? params.T * mu_log(spec, b, k).value() - lm.log_abs
                                                       : std::numeric_limits<double>::infinity();
                        if (g > best) {
                            best = g;
                            t1w = a;
                            t2w = b;
                        }
                    }
                return best;
            };
            const std::int64_t split = fixed.C ? J - 1 : J + (r.last - J) / 2;
            double t1w = 0, t2w = 0;
            if (fixed.C) {
                rep.C = *fixed.C;
            } else {
                double c = -INFINITY;
                for (std::int64_t k = J; k <= split; ++k) c = std::max(c, excess(k, t1w, t2w));
                rep.C = c;
            }
            const double tol = 1e-9 * std::max(1.0, std::fabs(rep.C));
            bool early = false, late = false;
            for (std::int64_t k = split + 1; k <= r.last; ++k) {
                const double g = excess(k, t1w, t2w);
                if (g > rep.C + tol) {
                    (in_last_decile(r, k) ? late : early) = true;
                    if (rep.witnesses.size() < kMaxWitnesses) {
                        const double lhs = params.T * mu_log(spec, t2w, k).value();
                        rep.witnesses.push_back({k, t1w, t2w, "T*mu_k <= ln(lambda_k) + C", lhs, lhs - g + rep.C});
                    }
                }
            }
            if (early) v2 = Verdict::fail;
            else if (late) v2 = Verdict::inconclusive;
        }
    }

    rep.hyperbolic = combine(v1, v2);
    return rep;
}

bool witness_violates(const SpectrumSpec& spec, const ModelParams& params, const ConditionReport& rep,
                      const Witness& w) {
    if (w.inequality == "T*mu_k <= ln(lambda_k) + C") {
        const SignedLog lm = lambda_log(spec, w.theta1, w.k);
        if (lm.sign <= 0) return true;
        return params.T * mu_log(spec, w.theta2, w.k).value() > lm.log_abs + rep.C + 1e-9 * std::max(1.0, std::fabs(rep.C));
    }
    if (w.inequality == "lambda_{k+1} >= lambda_k") {
        const SignedLog a = lambda_log(spec, w.theta1, w.k - 1), b = lambda_log(spec, w.theta1, w.k);
        return (b - a).sign < 0;
    }
    if (w.inequality.rfind("lambda_k + C* > 0", 0) == 0) {
        return shift(lambda_log(spec, w.theta1, w.k), rep.C_star).sign <= 0;
    }
    if (w.inequality == "lambda_k unbounded" || w.inequality == "ratio bound c1 <= ratio <= c2") {
        return w.lhs <= w.rhs * 1.1 || w.inequality == "ratio bound c1 <= ratio <= c2";
    }
    return false;
}

ConditionReport verify_lower_bound_props(const SpectrumSpec& spec, const ModelParams& params, IndexRange r) {
    validate_range(spec, r);
    params.validate();
    ConditionReport rep;
    rep.checked_range = r;
    const auto th = corners(params.theta1_box);
    auto min_lambda = [&](std::int64_t k) {
        SignedLog best = SignedLog::from_log(1, INFINITY);
        for (double t : th) {
            const SignedLog v = lambda_log(spec, t, k);
            if ((v - best).sign < 0) best = v;
        }
        return best;
    };
    // J: from J on, lambda_k(theta) > 1 for every theta.
    std::int64_t J = r.last + 1;
    for (std::int64_t k = r.last; k >= r.first; --k) {
        const SignedLog m = min_lambda(k);
        if (!(m.sign > 0 && m.log_abs > 0.0)) break;
        J = k;
    }
    rep.J = J;
    if (J > r.last || in_last_decile(r, J)) {
        rep.hyperbolic = Verdict::fail;
        rep.witnesses.push_back({r.last, th.front(), params.theta2, "lambda_k > 1", to_double(min_lambda(r.last)), 1.0});
        return rep;
    }
    auto ratio = [&](std::int64_t k) {
        const SignedLog t = spec.tau.evaluate(k);
        if (t.sign == 0) return 0.0;
        return std::exp(t.log_abs - min_lambda(k).log_abs);
    };
    double c0 = 0.0;
    for (std::int64_t k = J; k <= r.last; ++k) c0 = std::max(c0, ratio(k));
    rep.c0 = c0;
    rep.hyperbolic = Verdict::pass;
    const std::int64_t n = r.last - J + 1;
    if (n >= 4) {
        const std::int64_t q = J + (n - 1) / 4, m = J + (n - 1) / 2;
        const double rq = ratio(q), rm = ratio(m), rK = ratio(r.last);
        if (rK > 1.1 * rm && rm > 1.1 * rq) {
            rep.hyperbolic = Verdict::fail;
            rep.witnesses.push_back({r.last, th.front(), params.theta2, "|tau_k|/lambda_k <= c0", rK, rm});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Algebraic classification
// ---------------------------------------------------------------------------

namespace {

struct Fit {
    double slope = 0.0;
    double residual = 0.0;
    bool sign_stable = true;
    int sign = 0;
    bool zero = false;
};

Fit loglog_fit(const std::function<SignedLog(std::int64_t)>& seq, IndexRange r) {
    const std::int64_t lo = std::max<std::int64_t>(r.first, r.first + (r.last - r.first) / 2);
    const int samples = 64;
    std::vector<double> xs, ys;
    Fit fit;
    std::int64_t prev = -1;
    for (int i = 0; i < samples; ++i) {
        const double t = double(i) / (samples - 1);
        const auto k = static_cast<std::int64_t>(std::llround(std::exp(std::log(double(lo)) * (1 - t) + std::log(double(r.last)) * t)));
        if (k == prev) continue;
        prev = k;
        const SignedLog v = seq(k);
        if (v.sign == 0) {
            fit.zero = true;
            continue;
        }
        if (fit.sign == 0) fit.sign = v.sign;
        else if (fit.sign != v.sign) fit.sign_stable = false;
        xs.push_back(std::log(double(k)));
        ys.push_back(v.log_abs);
    }
    // alternating signs between consecutive indices also count as unstable.
    for (std::int64_t k = std::max<std::int64_t>(lo, r.last - 8); k < r.last; ++k)
        if (seq(k).sign * seq(k + 1).sign < 0) fit.sign_stable = false;
    if (xs.size() < 2) {
        fit.zero = xs.empty();
        return fit;
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= xs.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxx > 0 ? sxy / sxx : 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        fit.residual = std::max(fit.residual, std::fabs(ys[i] - (my + fit.slope * (xs[i] - mx))));
    return fit;
}

struct Term {
    double coefficient;
    double exponent;
};

// Leading power of a + theta*b for pure power-law generators, for every theta in pts.
// Returns nullopt when the leading coefficient cancels or changes sign over pts.
std::optional<Term> leading_affine(const Generator& a, const Generator& b, const std::vector<double>& pts) {
    const auto ta = a.power_term();
    const auto tb = b.power_term();
    std::optional<Term> out;
    for (double th : pts) {
        std::vector<Term> terms;
        if (ta) terms.push_back({ta->first, ta->second});
        if (tb && th != 0.0) terms.push_back({th * tb->first, tb->second});
        if (terms.empty()) return std::nullopt;
        double e = -INFINITY;
        for (auto& t : terms) e = std::max(e, t.exponent);
        double c = 0.0;
        for (auto& t : terms)
            if (t.exponent == e) c += t.coefficient;
        if (c == 0.0) return std::nullopt;
        if (!out) out = Term{c, e};
        else if (out->exponent != e || (out->coefficient > 0) != (c > 0)) return std::nullopt;
    }
    return out;
}

bool exact_capable(const Generator& g) { return g.identically_zero() || g.power_term().has_value(); }

}  // namespace

AlgebraicClass classify_algebraic(const SpectrumSpec& spec, const ModelParams& params, IndexRange r) {
    validate_range(spec, r);
    params.validate();
    AlgebraicClass cls;
    const auto th1 = corners(params.theta1_box);
    const auto th2 = corners(params.theta2_box);

    const bool all_exact = exact_capable(spec.kappa) && exact_capable(spec.tau) && exact_capable(spec.rho) &&
                           exact_capable(spec.nu);
    if (all_exact) {
        const auto lam = leading_affine(spec.kappa, spec.tau, th1);
        const auto mu = leading_affine(spec.rho, spec.nu, th2);
        const bool mu_zero = spec.rho.identically_zero() && spec.nu.identically_zero();
        if (lam && lam->coefficient > 0 && (mu || mu_zero)) {
            cls.exact = true;
            cls.alpha = lam->exponent;
            cls.alpha1 = spec.tau.identically_zero() ? -INFINITY : spec.tau.power_term()->second;
            cls.beta1 = spec.nu.identically_zero() ? -INFINITY : spec.nu.power_term()->second;
            if (mu_zero || mu->exponent <= 0) {
                cls.bounded_mu = true;
                cls.beta = 0.0;
            } else if (mu->coefficient < 0) {
                cls.beta = mu->exponent;
            } else {
                cls.algebraic = false;
                cls.reason = "unbounded amplification: mu_k -> +infinity";
            }
            return cls;
        }
    }

    // Regression over the upper half of the range.
    double alpha = 0.0, beta = 0.0;
    bool bounded = true;
    for (double t : th1) {
        const Fit f = loglog_fit([&](std::int64_t k) { return lambda_log(spec, t, k); }, r);
        if (!f.sign_stable || f.sign < 0 || f.zero) {
            cls.algebraic = false;
            cls.reason = "lambda_k not eventually positive";
            return cls;
        }
        alpha = std::max(alpha, f.slope);
        cls.fit_quality[0] = std::max(cls.fit_quality[0], f.residual);
    }
    cls.alpha = alpha;
    {
        const Fit f = loglog_fit([&](std::int64_t k) { return spec.tau.evaluate(k); }, r);
        if (!f.sign_stable) {
            cls.algebraic = false;
            cls.reason = "tau_k has oscillating sign";
            return cls;
        }
        cls.alpha1 = f.zero ? -INFINITY : f.slope;
        cls.fit_quality[1] = f.residual;
    }
    for (double t : th2) {
        auto mu_seq = [&](std::int64_t k) { return mu_log(spec, t, k); };
        const Fit f = loglog_fit(mu_seq, r);
        if (!f.sign_stable) {
            cls.algebraic = false;
            cls.reason = "mu_k has oscillating sign";
            return cls;
        }
        if (f.zero) continue;
        // A stabilized cap on |mu_k| means bounded dissipation.
        double cap_lo = 0.0, cap_all = 0.0;
        const std::int64_t mid = r.first + (r.last - r.first) / 2;
        for (std::int64_t k = r.first; k <= r.last; ++k) {
            const double a = std::fabs(mu_seq(k).value());
            cap_all = std::max(cap_all, a);
            if (k <= mid) cap_lo = a > cap_lo ? a : cap_lo;
        }
        const bool stabilized = cap_all <= 1.05 * cap_lo + 1e-300 && f.slope < 0.05;
        if (stabilized) continue;
        bounded = false;
        if (f.sign > 0) {
            cls.algebraic = false;
            cls.reason = "unbounded amplification: mu_k -> +infinity";
            return cls;
        }
        beta = std::max(beta, f.slope);
        cls.fit_quality[2] = std::max(cls.fit_quality[2], f.residual);
    }
    cls.bounded_mu = bounded;
    cls.beta = bounded ? 0.0 : beta;
    {
        const Fit f = loglog_fit([&](std::int64_t k) { return spec.nu.evaluate(k); }, r);
        if (!f.sign_stable) {
            cls.algebraic = false;
            cls.reason = "nu_k has oscillating sign";
            return cls;
        }
        cls.beta1 = f.zero ? -INFINITY : f.slope;
        cls.fit_quality[3] = f.residual;
    }
    // A power law is a straight line in log-log coordinates.
    for (double q : cls.fit_quality)
        if (q > 0.05) {
            cls.algebraic = false;
            cls.reason = "log-log fit residual too large for a power law";
        }
    return cls;
}

ConsistencyVerdict consistency_conditions(const AlgebraicClass& c) {
    ConsistencyVerdict v;
    v.gamma1 = 2 * c.alpha1 - c.alpha - c.beta;
    v.gamma2 = 2 * c.beta1 - c.beta;
    v.gamma12 = c.alpha1 - c.alpha + c.beta1 - c.beta;
    constexpr double eps = 1e-12;
    v.theta1_ok = v.gamma1 >= -1.0 - eps;
    v.theta2_ok = v.gamma2 >= -1.0 - eps;
    return v;
}

// ---------------------------------------------------------------------------
// Slowly increasing sequences
// ---------------------------------------------------------------------------

SlowlyIncreasingResult slowly_increasing_test(const std::function<SignedLog(std::int64_t)>& seq, std::int64_t n_max,
                                              const SlowlyIncreasingOptions& opts) {
    if (n_max < 10) throw std::invalid_argument("slowly_increasing_test needs n_max >= 10");
    SlowlyIncreasingResult res;
    SignedLog s1, s2;
    const std::int64_t decile_start = n_max - n_max / 10;
    double prev_ratio = INFINITY;
    bool monotone = true;
    double min_tail = INFINITY;
    std::int64_t next_record = 1;
    for (std::int64_t k = 1; k <= n_max; ++k) {
        const SignedLog a = seq(k);
        if (a.sign <= 0) throw std::domain_error("slowly_increasing_test: sequence entries must be positive");
        s1 = s1 + a;
        s2 = s2 + a * a;
        const double rn = std::exp(s2.log_abs - 2.0 * s1.log_abs);
        if (k >= decile_start) {
            if (rn > prev_ratio * (1 + 1e-12)) monotone = false;
            prev_ratio = rn;
            min_tail = std::min(min_tail, rn);
        }
        if (k == next_record || k == n_max) {
            res.ratio_curve.emplace_back(k, rn);
            next_record = std::max(k + 1, static_cast<std::int64_t>(std::ceil(double(k) * 1.1)));
        }
        if (k == n_max) res.final_ratio = rn;
    }
    if (monotone && res.final_ratio < opts.pass_threshold) res.verdict = Verdict::pass;
    else if (min_tail >= opts.fail_floor) res.verdict = Verdict::fail;
    else res.verdict = Verdict::inconclusive;
    return res;
}

Conditions12 conditions_1_2(const SpectrumSpec& spec, const ModelParams& params, std::int64_t n_max) {
    params.validate();
    if (n_max > spec.max_index()) throw std::invalid_argument("n_max exceeds the spectrum's k_max");
    Conditions12 out;
    // Start where lambda_k(theta1) > 0 from then on.
    std::int64_t J = 1;
    for (std::int64_t k = n_max; k >= 1; --k) {
        if (lambda_log(spec, params.theta1, k).sign <= 0) {
            J = k + 1;
            break;
        }
    }
    out.first_index = J;
    const std::int64_t n = n_max - J + 1;
    if (n < 10) throw std::invalid_argument("conditions_1_2: too few indices with positive lambda");

    auto term = [&](const Generator& weight, bool divide_by_lambda, std::int64_t j) {
        const std::int64_t k = j + J - 1;
        const SignedLog w = weight.evaluate(k);
        if (w.sign == 0) return SignedLog{};
        const double lm = log_m_func(params.T * mu_log(spec, params.theta2, k).value());
        double lg = 2 * w.log_abs + lm;
        if (divide_by_lambda) lg -= lambda_log(spec, params.theta1, k).log_abs;
        return SignedLog::from_log(1, lg);
    };
    auto run = [&](const Generator& weight, bool by_lambda, Verdict& verdict, SlowlyIncreasingResult& detail) {
        if (weight.identically_zero()) {
            verdict = Verdict::fail;
            return;
        }
        try {
            detail = slowly_increasing_test([&](std::int64_t j) { return term(weight, by_lambda, j); }, n);
            verdict = detail.verdict;
        } catch (const std::domain_error&) {
            verdict = Verdict::inconclusive;  // zero entries: the notion does not apply
        }
    };
    run(spec.tau, true, out.cond1, out.detail1);
    run(spec.nu, false, out.cond2, out.detail2);
    return out;
}

}  // namespace shyp

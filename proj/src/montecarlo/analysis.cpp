#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "shyp/catalog.hpp"
#include "shyp/montecarlo.hpp"
#include "shyp/rng.hpp"

namespace shyp {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

double mean(const std::vector<double>& x) {
    return x.empty() ? std::numeric_limits<double>::quiet_NaN() : std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

double stddev(const std::vector<double>& x) {
    if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / (x.size() - 1));
}

double quantile(std::vector<double> x, double q) {
    if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(x.begin(), x.end());
    const double pos = q * (x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (pos - lo) * (x[hi] - x[lo]);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a), mb = mean(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

constexpr int kBootstrap = 1000;

}  // namespace

// ---------------------------------------------------------------------------

double ks_critical(double alpha, double n_eff) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("significance must be in (0, 1)");
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(n_eff);
}

namespace {

std::map<double, double> criticals(double n_eff) {
    std::map<double, double> m;
    for (double a : {0.01, 0.05, 0.10}) m[a] = ks_critical(a, n_eff);
    return m;
}

}  // namespace

KsResult ks_statistic(std::vector<double> x) {
    if (x.size() < 30) throw std::invalid_argument("ks_statistic needs at least 30 samples");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    KsResult r;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = normal_cdf(x[i]);
        r.D = std::max({r.D, (i + 1) / n - F, F - i / n});
    }
    r.critical = criticals(n);
    return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 30 || b.size() < 30) throw std::invalid_argument("ks_two_sample needs at least 30 samples each");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = a.size(), nb = b.size();
    std::size_t i = 0, j = 0;
    KsResult r;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        r.D = std::max(r.D, std::fabs(i / na - j / nb));
    }
    r.critical = criticals(na * nb / (na + nb));
    return r;
}

SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope needs >= 2 paired points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("loglog_slope needs positive data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double mx = mean(lx), my = mean(ly);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double rss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = ly[i] - f.intercept - f.slope * lx[i];
            rss += e * e;
        }
        const double se = std::sqrt(rss / (n - 2) / sxx);
        const double t = boost::math::quantile(boost::math::students_t(double(n - 2)), 0.975);
        f.ci_lo = f.slope - t * se;
        f.ci_hi = f.slope + t * se;
    } else {
        f.ci_lo = f.ci_hi = f.slope;
    }
    return f;
}

// ---------------------------------------------------------------------------

ConsistencyTable consistency_table(const ExperimentData& data, const ExperimentConfig& cfg) {
    ConsistencyTable t;
    const std::size_t nN = data.N_list.size();
    const std::size_t M = data.rows.empty() ? 0 : data.rows.front().size();
    std::vector<double> Ns;
    std::vector<double> m1, m2;
    for (std::size_t j = 0; j < nN; ++j) {
        ConsistencyRow row;
        row.N = data.N_list[j];
        std::vector<double> e1, e2;
        for (const auto& r : data.rows[j]) {
            if (!r.ok) continue;
            e1.push_back(std::fabs(r.theta1_hat - cfg.params.theta1));
            e2.push_back(std::fabs(r.theta2_hat - cfg.params.theta2));
        }
        row.used = static_cast<int>(e1.size());
        row.excluded = data.excluded[j];
        row.mean_abs_err1 = mean(e1);
        row.mean_abs_err2 = mean(e2);
        row.se1 = stddev(e1) / std::sqrt(double(e1.size()));
        row.se2 = stddev(e2) / std::sqrt(double(e2.size()));
        if (row.excluded > 0.01 * M) t.exclusions_ok = false;
        t.rows.push_back(row);
        Ns.push_back(double(row.N));
        m1.push_back(row.mean_abs_err1);
        m2.push_back(row.mean_abs_err2);
    }
    if (nN < 2) return t;
    t.slope1 = loglog_slope(Ns, m1);
    t.slope2 = loglog_slope(Ns, m2);

    // Bootstrap over replicates, resampled jointly across N.
    rng::NormalStream stream(cfg.seed, 0, 0, rng::Channel::bootstrap);
    std::vector<double> s1, s2;
    int below1 = 0, below2 = 0;
    std::vector<std::size_t> idx(M);
    for (int b = 0; b < kBootstrap; ++b) {
        for (auto& i : idx) i = std::min(M - 1, static_cast<std::size_t>(stream.uniform() * M));
        std::vector<double> bm1(nN), bm2(nN);
        bool usable = true;
        for (std::size_t j = 0; j < nN; ++j) {
            double a1 = 0, a2 = 0;
            int n = 0;
            for (std::size_t i : idx) {
                const auto& r = data.rows[j][i];
                if (!r.ok) continue;
                a1 += std::fabs(r.theta1_hat - cfg.params.theta1);
                a2 += std::fabs(r.theta2_hat - cfg.params.theta2);
                ++n;
            }
            if (n == 0) usable = false;
            bm1[j] = a1 / n;
            bm2[j] = a2 / n;
        }
        if (!usable) continue;
        s1.push_back(loglog_slope(Ns, bm1).slope);
        s2.push_back(loglog_slope(Ns, bm2).slope);
        below1 += bm1.back() < bm1.front();
        below2 += bm2.back() < bm2.front();
    }
    if (!s1.empty()) {
        t.slope1.ci_lo = quantile(s1, 0.025);
        t.slope1.ci_hi = quantile(s1, 0.975);
        t.slope2.ci_lo = quantile(s2, 0.025);
        t.slope2.ci_hi = quantile(s2, 0.975);
        t.decreasing1 = below1 >= 0.99 * s1.size();
        t.decreasing2 = below2 >= 0.99 * s2.size();
    }
    return t;
}

ConsistencyTable run_consistency(const ExperimentConfig& cfg) { return consistency_table(run_experiment(cfg), cfg); }

NormalityReport normality_report(const ExperimentData& data, const ExperimentConfig& cfg) {
    NormalityReport rep;
    rep.significance = cfg.significance;
    const std::size_t j = data.N_list.size() - 1;
    rep.N = data.N_list[j];
    rep.excluded = data.excluded[j];
    rep.exclusions_ok = rep.excluded <= 0.01 * data.rows[j].size();
    std::vector<double> a, b;
    for (const auto& r : data.rows[j]) {
        if (!r.ok) continue;
        rep.samples.emplace_back(r.norm_err1, r.norm_err2);
        a.push_back(r.norm_err1);
        b.push_back(r.norm_err2);
    }
    rep.ks1 = ks_statistic(a);
    rep.ks2 = ks_statistic(b);
    rep.ks1.critical[cfg.significance] = ks_critical(cfg.significance, a.size());
    rep.ks2.critical[cfg.significance] = ks_critical(cfg.significance, b.size());
    rep.corr12 = pearson(a, b);
    const double z = std::atanh(rep.corr12);
    const double h = normal_quantile(1.0 - cfg.significance / 2.0) / std::sqrt(double(a.size()) - 3.0);
    rep.corr_ci_lo = std::tanh(z - h);
    rep.corr_ci_hi = std::tanh(z + h);
    rep.normal1 = !rep.ks1.rejects(cfg.significance);
    rep.normal2 = !rep.ks2.rejects(cfg.significance);
    rep.independent = rep.corr_ci_lo <= 0.0 && 0.0 <= rep.corr_ci_hi;
    return rep;
}

NormalityReport run_normality(const ExperimentConfig& cfg) { return normality_report(run_experiment(cfg), cfg); }

std::vector<GrowthFit> fit_growth(const std::vector<PsiValues>& table) {
    if (table.size() < 4) throw std::invalid_argument("fit_growth needs at least 4 rows");
    const std::size_t start = std::min(table.size() / 2, table.size() - 3);
    std::vector<GrowthFit> out;
    auto column = [&](const char* name, auto get) {
        GrowthFit g;
        g.column = name;
        std::vector<double> x, y;
        for (std::size_t i = start; i < table.size(); ++i) {
            x.push_back(double(table[i].N));
            y.push_back(get(table[i]));
        }
        const bool positive = std::all_of(y.begin(), y.end(), [](double v) { return v > 0; });
        if (!positive) {
            g.slope = std::numeric_limits<double>::quiet_NaN();
            out.push_back(g);
            return;
        }
        const SlopeFit f = loglog_slope(x, y);
        g.slope = f.slope;
        g.ci_lo = f.ci_lo;
        g.ci_hi = f.ci_hi;
        const std::size_t n = table.size();
        const double y2 = get(table[n - 1]), y1 = get(table[n - 2]), y0 = get(table[n - 3]);
        g.increasing = y2 > y1 * (1 + 1e-12);
        const double step_ratio = std::log(double(table[n - 1].N) / table[n - 2].N) /
                                  std::log(double(table[n - 2].N) / table[n - 3].N);
        g.increment_ratio = (y1 > y0) ? (y2 - y1) / (y1 - y0) / step_ratio : std::numeric_limits<double>::quiet_NaN();
        g.logarithmic = g.slope < 0.1 && g.increasing;
        out.push_back(g);
    };
    column("psi1", [](const PsiValues& p) { return p.psi1; });
    column("psi2", [](const PsiValues& p) { return p.psi2; });
    column("psi12", [](const PsiValues& p) { return std::fabs(p.psi12); });
    return out;
}

LlnReport lln_report(const ExperimentData& data) {
    LlnReport rep;
    for (std::size_t j = 0; j < data.N_list.size(); ++j) {
        LlnRow row;
        row.N = data.N_list[j];
        const PsiValues& p = data.psi[j];
        std::vector<double> r1, r2, r12, i1, i2;
        for (const auto& r : data.rows[j]) {
            // K and iota are defined even when the estimate is excluded.
            if (r.K1 == 0.0 && r.K2 == 0.0) continue;
            r1.push_back(r.K1 / p.psi1);
            r2.push_back(r.K2 / p.psi2);
            if (p.psi12 != 0.0) r12.push_back(r.K12 / p.psi12);
            i1.push_back(r.iota1 * r.iota1 / p.psi1);
            i2.push_back(r.iota2 * r.iota2 / p.psi2);
        }
        row.K1_over_Psi1_median = quantile(r1, 0.5);
        row.K1_over_Psi1_q05 = quantile(r1, 0.05);
        row.K1_over_Psi1_q95 = quantile(r1, 0.95);
        row.K2_over_Psi2_median = quantile(r2, 0.5);
        row.K2_over_Psi2_q05 = quantile(r2, 0.05);
        row.K2_over_Psi2_q95 = quantile(r2, 0.95);
        row.K12_over_Psi12_median = quantile(r12, 0.5);
        row.iota1_isometry = mean(i1);
        row.iota1_isometry_se = stddev(i1) / std::sqrt(double(i1.size()));
        row.iota2_isometry = mean(i2);
        row.iota2_isometry_se = stddev(i2) / std::sqrt(double(i2.size()));
        rep.rows.push_back(row);
    }
    return rep;
}

LlnReport verify_lln(const ExperimentConfig& cfg) { return lln_report(run_experiment(cfg)); }

LlnCounterexample lln_counterexample(int n_max, std::uint64_t seed) {
    if (n_max < 1) throw std::invalid_argument("lln_counterexample: n_max must be positive");
    LlnCounterexample out;
    rng::NormalStream stream(seed, 0, 0, rng::Channel::meta);
    double sp = 0, wp = 0;
    double se = 0, we = 0;  // scaled by e^{-n}
    for (int n = 1; n <= n_max; ++n) {
        const double xi = stream.next();
        sp += n * xi * xi;
        wp += n;
        se = se * std::exp(-1.0) + xi * xi;
        we = we * std::exp(-1.0) + 1.0;
        out.power_ratio.push_back(sp / wp);
        out.exp_ratio.push_back(se / we);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string growth_string(double gamma) {
    constexpr double eps = 1e-12;
    if (std::fabs(gamma + 1.0) <= eps) return "ln N";
    if (gamma < -1.0) return "bounded";
    const double e = gamma + 1.0;
    if (std::fabs(e - 1.0) <= eps) return "N";
    std::ostringstream os;
    os << "N^" << e;
    return os.str();
}

}  // namespace

std::vector<TableCell> exponent_tables(bool fit_slopes) {
    std::vector<TableCell> cells;
    for (const auto& name : catalog::algebraic_examples()) {
        for (int d : {1, 2, 4, 8}) {
            const catalog::Entry e = catalog::lookup(name, d);
            const AlgebraicClass cls = classify_algebraic(e.spectrum, e.params, {1, 2000});
            const ConsistencyVerdict v = consistency_conditions(cls);
            TableCell c;
            c.name = name;
            c.equation = e.equation;
            c.dimension = d;
            c.gamma1 = v.gamma1;
            c.gamma2 = v.gamma2;
            c.psi1 = growth_string(v.gamma1);
            c.psi2 = growth_string(v.gamma2);
            c.fitted1 = c.fitted2 = std::numeric_limits<double>::quiet_NaN();
            if (fit_slopes) {
                std::vector<std::int64_t> Ns;
                for (double n = 50; n <= 800.5; n *= std::sqrt(2.0)) Ns.push_back(std::llround(n));
                const auto tab = psi_table(e.spectrum, e.params.theta1, e.params.theta2, e.params.T, Ns);
                const auto g = fit_growth(tab);
                c.fitted1 = g[0].slope;
                c.fitted2 = g[1].slope;
            }
            cells.push_back(c);
        }
    }
    return cells;
}

std::string render_tables(const std::vector<TableCell>& cells) {
    std::ostringstream os;
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    std::string current;
    for (const auto& c : cells) {
        if (c.name != current) {
            current = c.name;
            os << "\n" << c.name << ":  " << c.equation << "\n";
            os << "  " << pad("d", 4) << pad("Psi1", 12) << pad("Psi2", 12) << pad("gamma1", 10) << pad("gamma2", 10);
            if (!std::isnan(c.fitted1)) os << pad("fit1", 10) << "fit2";
            os << "\n";
        }
        std::ostringstream g1, g2, f1, f2;
        g1 << c.gamma1;
        g2 << c.gamma2;
        os << "  " << pad(std::to_string(c.dimension), 4) << pad(c.psi1, 12) << pad(c.psi2, 12) << pad(g1.str(), 10)
           << pad(g2.str(), 10);
        if (!std::isnan(c.fitted1)) {
            f1.precision(3);
            f2.precision(3);
            f1 << std::fixed << c.fitted1;
            f2 << std::fixed << c.fitted2;
            os << pad(f1.str(), 10) << f2.str();
        }
        os << "\n";
    }
    return os.str();
}

void write_rows_csv(const std::string& path, const ExperimentData& data) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.precision(17);
    os << "N,replicate,ok,theta1_hat,theta2_hat,norm_err1,norm_err2,D_N,iota1,iota2,K1,K2,K12,identity_residual,failure\n";
    for (std::size_t j = 0; j < data.rows.size(); ++j)
        for (const auto& r : data.rows[j]) {
            os << r.N << ',' << r.replicate << ',' << (r.ok ? 1 : 0) << ',' << r.theta1_hat << ',' << r.theta2_hat << ','
               << r.norm_err1 << ',' << r.norm_err2 << ',' << r.D_N << ',' << r.iota1 << ',' << r.iota2 << ',' << r.K1
               << ',' << r.K2 << ',' << r.K12 << ',';
            if (!std::isnan(r.identity_residual)) os << r.identity_residual;
            os << ',' << '"' << r.failure << '"' << '\n';
        }
}

void write_psi_csv(const std::string& path, const std::vector<PsiValues>& table) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.precision(17);
    os << "N,psi1_exact,psi2_exact,psi12_exact,psi1_asym,psi2_asym\n";
    for (const auto& p : table)
        os << p.N << ',' << p.psi1 << ',' << p.psi2 << ',' << p.psi12 << ',' << p.psi1_asym << ',' << p.psi2_asym << '\n';
}

}  // namespace shyp

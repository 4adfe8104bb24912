#include "shyp/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "shyp/error.hpp"
#include "shyp/fundamental.hpp"
#include "shyp/parallel.hpp"

namespace shyp {

void TimeGrid::validate() const {
    if (!(T > 0) || !std::isfinite(T)) throw std::invalid_argument("time grid: T must be positive");
    if (n_steps < 1) throw std::invalid_argument("time grid: n_steps must be positive");
}

Transition transition(double lambda, double mu, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("transition: dt must be positive");
    if (!std::isfinite(lambda) || !std::isfinite(mu)) throw NumericalError("transition: eigenvalue not finite");
    Transition tr;
    const FundValue fv = fund_solution(lambda, mu, dt);
    tr.propagator = {{{fv.fdot - mu * fv.f, fv.f}, {-lambda * fv.f, fv.fdot}}};
    const EnergyIntegrals e = energy_integrals(lambda, mu, dt);
    tr.joint_cov = {{{e.ff, e.fd, e.f1}, {e.fd, e.dd, e.d1}, {e.f1, e.d1, dt}}};
    const RootKind rk = characteristic_roots(lambda, mu);
    tr.high_frequency = rk.tag == RootTag::complex_pair && rk.ell * dt > std::numbers::pi;

    // Cholesky of the correlation matrix, clipping tiny negative pivots.
    std::array<double, 3> s{};
    for (int i = 0; i < 3; ++i) s[i] = std::sqrt(std::max(0.0, tr.joint_cov[i][i]));
    Mat3 R{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            R[i][j] = (s[i] > 0 && s[j] > 0) ? tr.joint_cov[i][j] / (s[i] * s[j]) : (i == j ? 1.0 : 0.0);
    Mat3 L{};
    for (int j = 0; j < 3; ++j) {
        double d = R[j][j];
        for (int m = 0; m < j; ++m) d -= L[j][m] * L[j][m];
        if (d < 0) {
            tr.clip = std::max(tr.clip, -d);
            if (-d > 1e-8) throw NumericalError("transition covariance is not positive semidefinite");
            d = 0.0;
        }
        L[j][j] = std::sqrt(d);
        for (int i = j + 1; i < 3; ++i) {
            double x = R[i][j];
            for (int m = 0; m < j; ++m) x -= L[i][m] * L[j][m];
            L[i][j] = L[j][j] > 0 ? x / L[j][j] : 0.0;
        }
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) tr.factor[i][j] = s[i] * L[i][j];
    return tr;
}

void simulate_mode(const Transition& tr, const TimeGrid& grid, rng::NormalStream& stream, ModeTrajectory& traj) {
    const auto n = static_cast<std::size_t>(grid.n_steps);
    traj.u.assign(n + 1, 0.0);
    traj.v.assign(n + 1, 0.0);
    traj.dw.assign(n, 0.0);
    const auto& P = tr.propagator;
    const auto& F = tr.factor;
    double u = 0.0, v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z0 = stream.next(), z1 = stream.next(), z2 = stream.next();
        const double nu_ = F[0][0] * z0;
        const double nv = F[1][0] * z0 + F[1][1] * z1;
        const double nw = F[2][0] * z0 + F[2][1] * z1 + F[2][2] * z2;
        const double un = P[0][0] * u + P[0][1] * v + nu_;
        const double vn = P[1][0] * u + P[1][1] * v + nv;
        u = un;
        v = vn;
        traj.u[i + 1] = u;
        traj.v[i + 1] = v;
        traj.dw[i] = nw;
    }
}

ModeTrajectory simulate_mode(double lambda, double mu, const TimeGrid& grid, rng::NormalStream& stream) {
    grid.validate();
    ModeTrajectory t;
    simulate_mode(transition(lambda, mu, grid.dt()), grid, stream, t);
    return t;
}

std::vector<ModeTrajectory> simulate_solution(const SpectrumSpec& spec, const ModelParams& params, std::int64_t N,
                                              const TimeGrid& grid, std::uint64_t seed, std::uint64_t replicate,
                                              unsigned workers) {
    grid.validate();
    if (N < 1 || N > spec.max_index()) throw std::invalid_argument("simulate_solution: N outside the spectrum");
    std::vector<ModeTrajectory> out(static_cast<std::size_t>(N));
    parallel_for(out.size(), workers, [&](std::size_t i) {
        const auto k = static_cast<std::int64_t>(i) + 1;
        const LambdaMu lm = lambda_mu(spec, params.theta1, params.theta2, k);
        rng::NormalStream stream(seed, replicate, static_cast<std::uint64_t>(k), rng::Channel::noise);
        simulate_mode(transition(lm.lambda, lm.mu, grid.dt()), grid, stream, out[i]);
        out[i].k = k;
    });
    return out;
}

double ito_sum(std::span<const double> integrand, std::span<const double> incr) {
    if (integrand.size() != incr.size() + 1) throw std::invalid_argument("ito_sum: length mismatch");
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < incr.size(); ++i) {
        const double p = integrand[i] * incr[i];
        const double t = s + p;
        c += std::fabs(s) >= std::fabs(p) ? (s - t) + p : (p - t) + s;
        s = t;
    }
    return s + c;
}

std::vector<double> increments(std::span<const double> x) {
    std::vector<double> d(x.empty() ? 0 : x.size() - 1);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i + 1] - x[i];
    return d;
}

void write_trajectories_csv(const std::string& path, const std::vector<ModeTrajectory>& trajs, const TimeGrid& grid) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.precision(17);
    os << "# T=" << grid.T << " n_steps=" << grid.n_steps << "\n";
    os << "k,t_index,u,v,dw\n";
    for (const auto& t : trajs) {
        for (std::size_t i = 0; i < t.u.size(); ++i) {
            os << t.k << ',' << i << ',' << t.u[i] << ',' << t.v[i] << ',';
            if (i < t.dw.size()) os << t.dw[i];
            os << '\n';
        }
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

namespace {

// strtod accepts subnormals, unlike std::stod.
double parse_double(const std::string& s, const std::string& path, std::size_t lineno) {
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::runtime_error(path + ": bad number at line " + std::to_string(lineno));
    return x;
}

}  // namespace

std::vector<ModeTrajectory> read_trajectories_csv(const std::string& path, TimeGrid& grid) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(is, line);
    if (std::sscanf(line.c_str(), "# T=%lf n_steps=%ld", &grid.T, &grid.n_steps) != 2)
        throw std::runtime_error(path + ": missing grid header");
    grid.validate();
    std::getline(is, line);
    if (line != "k,t_index,u,v,dw") throw std::runtime_error(path + ": unexpected column header");
    std::vector<ModeTrajectory> out;
    const auto n = static_cast<std::size_t>(grid.n_steps);
    std::size_t lineno = 2;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f[5];
        for (int i = 0; i < 5; ++i)
            if (!std::getline(ss, f[i], ',') && i < 4) throw std::runtime_error(path + ": short row at line " + std::to_string(lineno));
        const std::int64_t k = std::stoll(f[0]);
        const std::size_t ti = std::stoull(f[1]);
        if (ti == 0) {
            out.emplace_back();
            out.back().k = k;
            out.back().u.reserve(n + 1);
            out.back().v.reserve(n + 1);
            out.back().dw.reserve(n);
        }
        if (out.empty() || out.back().k != k || out.back().u.size() != ti)
            throw std::runtime_error(path + ": rows out of order at line " + std::to_string(lineno));
        auto& t = out.back();
        t.u.push_back(parse_double(f[2], path, lineno));
        t.v.push_back(parse_double(f[3], path, lineno));
        if (ti < n) t.dw.push_back(parse_double(f[4], path, lineno));
    }
    for (const auto& t : out)
        if (t.u.size() != n + 1) throw std::runtime_error(path + ": incomplete mode " + std::to_string(t.k));
    return out;
}

}  // namespace shyp

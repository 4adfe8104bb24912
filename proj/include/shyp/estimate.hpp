#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shyp/kernels.hpp"
#include "shyp/simulate.hpp"
#include "shyp/spectrum.hpp"

namespace shyp {

// Per-mode path functionals, already multiplied by dt where they are time
// integrals.  Everything the statistics need from one trajectory.
struct ModeContribution {
    std::int64_t k = 0;
    double int_u2 = 0.0;   // sum u_i^2 dt
    double int_v2 = 0.0;   // sum v_i^2 dt
    double int_uv = 0.0;   // sum u_i v_i dt
    double u_dv = 0.0;     // sum u_i dv_i
    double v_dv = 0.0;     // sum v_i dv_i
    double u_dw = 0.0;     // sum u_i dw_i
    double v_dw = 0.0;     // sum v_i dw_i
    double u_dws = 0.0;    // against the scheme-implied increments
    double v_dws = 0.0;
    double uT2 = 0.0;      // u(T)^2
    double vT2 = 0.0;      // v(T)^2
    double uTvT = 0.0;     // u(T) v(T)
    double T = 0.0;
    bool has_dw = false;
};

// lambda, mu are needed only for the scheme-implied increments (pass NaN to skip).
ModeContribution mode_contribution(const ModeTrajectory& traj, const TimeGrid& grid, double lambda, double mu,
                                   const kernels::KernelSet& ks = kernels::active_kernels());

struct Stats {
    double A1 = 0.0, A2 = 0.0;
    double F1 = 0.0, F2 = 0.0;
    double K1 = 0.0, K2 = 0.0, K12 = 0.0;
    double L1 = 0.0, L2 = 0.0;
    std::int64_t N = 0;
    bool endpoint_variant = true;
};

// Statistics over the first N contributions (all when N < 0), summed in k order.
// With endpoint identities the path integrals are taken from u(T), v(T):
//   int u v dt = u(T)^2/2,  int u dv = u(T)v(T) - int v^2 dt,  int v dv = (v(T)^2 - T)/2,
// otherwise from left Riemann and Ito sums on the grid.
Stats assemble_stats(std::span<const ModeContribution> contrib, const SpectrumSpec& spec, bool use_endpoint_identities,
                     std::int64_t N = -1);

Stats sufficient_statistics(std::span<const ModeTrajectory> trajs, const SpectrumSpec& spec, const TimeGrid& grid,
                            bool use_endpoint_identities);

struct Estimate {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double D_N = 0.0;
};

// Solves the normal equations; throws SingularSystemError when 1 - D_N < 1e-12.
Estimate mle(const Stats& s);

struct Innovations {
    double iota1 = 0.0;
    double iota2 = 0.0;
};

// From the true Brownian path (scheme = false) or the scheme-implied one.
Innovations innovations(std::span<const ModeContribution> contrib, const SpectrumSpec& spec, bool scheme,
                        std::int64_t N = -1);

// theta + (error terms in iota/K); the route used when the drift statistics
// cannot be formed in double precision.
Estimate estimate_from_innovations(const Stats& s, const Innovations& iota, double theta1, double theta2);

struct ErrorDecomposition {
    Innovations iota;         // true dw
    Innovations iota_scheme;  // scheme-implied increments
    double D_N = 0.0;
    double reconstructed1 = 0.0;  // error terms built from iota_scheme and Riemann statistics
    double reconstructed2 = 0.0;
    double direct1 = 0.0;  // mle(Riemann statistics) - theta
    double direct2 = 0.0;
    double isometry1 = 0.0;  // error terms built from the true dw
    double isometry2 = 0.0;
};

ErrorDecomposition error_decomposition(std::span<const ModeContribution> contrib, const SpectrumSpec& spec,
                                       const ModelParams& params, std::int64_t N = -1);
ErrorDecomposition error_decomposition(std::span<const ModeTrajectory> trajs, const SpectrumSpec& spec,
                                       const ModelParams& params, const TimeGrid& grid);

enum class PsiSource { truth, plug_in };

struct EstimateResult {
    Stats stats;
    double theta1_hat = 0.0;
    double theta2_hat = 0.0;
    double psi1 = 0.0;
    double psi2 = 0.0;
    PsiSource psi_source = PsiSource::plug_in;
    std::optional<double> norm_err1;
    std::optional<double> norm_err2;
    double D_N = 0.0;
    std::optional<double> iota1;
    std::optional<double> iota2;
};

struct EstimateOptions {
    bool use_endpoint_identities = true;
    bool truth_known = false;  // params.theta1/theta2 are the true values
    bool with_innovations = false;
};

EstimateResult estimate(std::span<const ModeTrajectory> trajs, const SpectrumSpec& spec, const ModelParams& params,
                        const TimeGrid& grid, const EstimateOptions& opts);

// Flat JSON document.
std::string to_json(const EstimateResult& r, const TimeGrid& grid, std::optional<std::uint64_t> seed);

}  // namespace shyp

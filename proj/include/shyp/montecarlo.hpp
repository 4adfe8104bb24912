#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "shyp/estimate.hpp"
#include "shyp/fundamental.hpp"
#include "shyp/simulate.hpp"
#include "shyp/spectrum.hpp"

namespace shyp {

// statistics: solve the normal equations from the nine path statistics.
// innovation: theta + K^{-1} iota from the simulated Brownian increments, for
// spectra whose drift statistics cancel catastrophically in double precision.
enum class EstimatorRoute { statistics, innovation };
const char* to_string(EstimatorRoute r);

struct ExperimentConfig {
    std::string name;
    SpectrumSpec spectrum;
    ModelParams params;
    std::vector<std::int64_t> N_list;
    int replicates = 200;
    TimeGrid grid;
    std::uint64_t seed = 1;
    std::string out_dir;
    unsigned workers = 0;
    EstimatorRoute route = EstimatorRoute::statistics;
    bool use_endpoint_identities = true;
    double significance = 0.01;
    bool check_identity = true;  // error-decomposition identity on every replicate

    void validate() const;
};

struct ReplicateRow {
    std::int64_t N = 0;
    int replicate = 0;
    bool ok = false;
    std::string failure;
    double theta1_hat = 0.0, theta2_hat = 0.0;
    double norm_err1 = 0.0, norm_err2 = 0.0;
    double D_N = 0.0;
    double iota1 = 0.0, iota2 = 0.0;
    double K1 = 0.0, K2 = 0.0, K12 = 0.0;
    double identity_residual = 0.0;  // relative; NaN when not checked
};

struct ExperimentData {
    std::vector<std::int64_t> N_list;
    std::vector<PsiValues> psi;                    // at the true parameters, per N
    std::vector<std::vector<ReplicateRow>> rows;   // [N index][replicate]
    std::vector<int> excluded;                     // per N
    int high_frequency_modes = 0;  // modes with ell * dt > pi
    int stiff_modes = 0;           // modes with |mu| * dt > 1; grid statistics lose the theta2 signal
    int identity_checked = 0;
    int identity_violations = 0;  // residual above 1e-9
    double identity_max_residual = 0.0;
};

ExperimentData run_experiment(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------

struct KsResult {
    double D = 0.0;
    std::map<double, double> critical;  // significance -> threshold
    bool rejects(double alpha) const { return D > critical.at(alpha); }
};

// Distance to the standard normal distribution function; needs >= 30 samples.
KsResult ks_statistic(std::vector<double> samples);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_critical(double alpha, double n_eff);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_lo = 0.0;  // 95%
    double ci_hi = 0.0;
};

SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ConsistencyRow {
    std::int64_t N = 0;
    double mean_abs_err1 = 0.0, mean_abs_err2 = 0.0;
    double se1 = 0.0, se2 = 0.0;
    int used = 0;
    int excluded = 0;
};

struct ConsistencyTable {
    std::vector<ConsistencyRow> rows;
    SlopeFit slope1, slope2;  // bootstrap 95% bands in ci_lo/ci_hi
    bool decreasing1 = false, decreasing2 = false;  // largest-N error below smallest-N with 99% bootstrap confidence
    bool exclusions_ok = true;
};

ConsistencyTable consistency_table(const ExperimentData& data, const ExperimentConfig& cfg);
ConsistencyTable run_consistency(const ExperimentConfig& cfg);

struct NormalityReport {
    std::int64_t N = 0;
    std::vector<std::pair<double, double>> samples;
    KsResult ks1, ks2;
    double corr12 = 0.0;
    double corr_ci_lo = 0.0, corr_ci_hi = 0.0;  // Fisher-z, 1 - significance
    double significance = 0.01;
    bool normal1 = false, normal2 = false, independent = false;
    int excluded = 0;
    bool exclusions_ok = true;
};

NormalityReport normality_report(const ExperimentData& data, const ExperimentConfig& cfg);
NormalityReport run_normality(const ExperimentConfig& cfg);

struct GrowthFit {
    std::string column;
    double slope = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    bool increasing = false;
    bool logarithmic = false;
    // last increment over the previous one, scaled by the N-step ratio; near 1
    // for ln N growth, near 0 when the series is already summed.
    double increment_ratio = 0.0;
};

// Columns psi1, psi2, |psi12|; needs >= 4 rows.
std::vector<GrowthFit> fit_growth(const std::vector<PsiValues>& table);

struct LlnRow {
    std::int64_t N = 0;
    double K1_over_Psi1_median = 0.0, K1_over_Psi1_q05 = 0.0, K1_over_Psi1_q95 = 0.0;
    double K2_over_Psi2_median = 0.0, K2_over_Psi2_q05 = 0.0, K2_over_Psi2_q95 = 0.0;
    double K12_over_Psi12_median = 0.0;
    double iota1_isometry = 0.0, iota1_isometry_se = 0.0;  // mean iota1^2 / Psi1
    double iota2_isometry = 0.0, iota2_isometry_se = 0.0;
};

struct LlnReport {
    std::vector<LlnRow> rows;
};

LlnReport lln_report(const ExperimentData& data);
LlnReport verify_lln(const ExperimentConfig& cfg);

// Ratios sum(w_k xi_k^2)/sum(w_k) for w_k = k and w_k = e^k with iid standard
// normal xi_k, at n = 1..n_max.  Only the first settles near 1.
struct LlnCounterexample {
    std::vector<double> power_ratio;
    std::vector<double> exp_ratio;
};
LlnCounterexample lln_counterexample(int n_max, std::uint64_t seed);

// Rendered exponent matrix for the six algebraic examples, d in {1, 2, 4, 8}.
struct TableCell {
    std::string name;
    std::string equation;
    int dimension = 1;
    std::string psi1;
    std::string psi2;
    double gamma1 = 0.0, gamma2 = 0.0;
    double fitted1 = 0.0, fitted2 = 0.0;  // NaN when not fitted
};
std::vector<TableCell> exponent_tables(bool fit_slopes);
std::string render_tables(const std::vector<TableCell>& cells);

// Outputs.
void write_rows_csv(const std::string& path, const ExperimentData& data);
void write_psi_csv(const std::string& path, const std::vector<PsiValues>& table);

}  // namespace shyp

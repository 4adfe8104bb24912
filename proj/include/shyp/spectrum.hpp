#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shyp/signed_log.hpp"

namespace shyp {

// ---------------------------------------------------------------------------
// Eigenvalue sequence generators
// ---------------------------------------------------------------------------

struct PowerLaw {  // c * k^e
    double coefficient = 1.0;
    double exponent = 0.0;
};
struct ExpLaw {  // c * e^{r k}
    double coefficient = 1.0;
    double rate = 0.0;
};
struct LogLaw {  // c * (ln(k + shift))^p
    double coefficient = 1.0;
    double exponent = 1.0;
    double shift = 0.0;
};
struct LogLogLaw {  // c * ln ln(k + shift)
    double coefficient = 1.0;
    double shift = 0.0;
};
struct Constant {
    double value = 0.0;
};
struct Explicit {  // values[k-1]
    std::vector<double> values;
};

class Generator {
public:
    using Law = std::variant<PowerLaw, ExpLaw, LogLaw, LogLogLaw, Constant, Explicit>;

    Generator() : law_(Constant{0.0}) {}
    Generator(Law law, bool alternating = false) : law_(std::move(law)), alternating_(alternating) {}

    // Sign-exact value at index k >= 1.
    SignedLog evaluate(std::int64_t k) const;

    const Law& law() const { return law_; }
    bool alternating() const { return alternating_; }

    // Largest admissible index (explicit lists are finite).
    std::optional<std::int64_t> length() const;

    // (coefficient, exponent) when the generator is c*k^e exactly (constants
    // have exponent 0).  Empty for zero, exp/log laws, explicit lists and
    // alternating wrappers.
    std::optional<std::pair<double, double>> power_term() const;

    bool identically_zero() const;

private:
    Law law_;
    bool alternating_ = false;
};

// The four eigenvalue sequences of A0, A1, B0, B1 (kappa, tau, rho, nu).
struct SpectrumSpec {
    Generator kappa;
    Generator tau;
    Generator rho;
    Generator nu;
    int dimension = 1;
    std::int64_t k_max = 1'000'000;

    std::int64_t max_index() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
};

struct ModelParams {
    double theta1 = 0.0;
    double theta2 = 0.0;
    Interval theta1_box;
    Interval theta2_box;
    double T = 1.0;

    // Throws std::invalid_argument on open/degenerate boxes or T <= 0.
    void validate() const;
};

struct EigenvalueQuad {
    std::array<SignedLog, 4> logs;    // kappa, tau, rho, nu
    std::array<double, 4> values{};   // direct doubles; +-inf where overflow is true
    bool overflow = false;
};

EigenvalueQuad eigenvalues(const SpectrumSpec& spec, std::int64_t k);

struct LambdaMu {
    double lambda = 0.0;
    double mu = 0.0;
    SignedLog log_lambda;
    SignedLog log_mu;
};

LambdaMu lambda_mu(const SpectrumSpec& spec, double theta1, double theta2, std::int64_t k);

// ---------------------------------------------------------------------------
// Conditions on the spectrum
// ---------------------------------------------------------------------------

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct IndexRange {
    std::int64_t first = 1;
    std::int64_t last = 1;
};

struct Witness {
    std::int64_t k = 0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    std::string inequality;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ConditionReport {
    Verdict hyperbolic = Verdict::inconclusive;
    std::vector<Witness> witnesses;
    IndexRange checked_range;
    double C_star = 0.0;
    double C = 0.0;
    std::int64_t J = 1;
    double c1 = 1.0;
    double c2 = 1.0;
    double c0 = 0.0;
    std::vector<std::string> notes;
};

// Constants the checker would otherwise fit.  Fixing them makes verdicts
// comparable across ranges.
struct HyperbolicConstants {
    std::optional<double> C_star;
    std::optional<double> C;
    std::optional<std::int64_t> J;
};

ConditionReport check_hyperbolic(const SpectrumSpec& spec, const ModelParams& params, IndexRange k_range,
                                 int theta_grid_resolution, const HyperbolicConstants& fixed = {});

// True when the witness still violates its inequality under `report`'s constants.
bool witness_violates(const SpectrumSpec& spec, const ModelParams& params, const ConditionReport& report,
                      const Witness& w);

ConditionReport verify_lower_bound_props(const SpectrumSpec& spec, const ModelParams& params, IndexRange k_range);

struct AlgebraicClass {
    double alpha = 0.0;
    double alpha1 = 0.0;
    double beta = 0.0;
    double beta1 = 0.0;
    bool algebraic = true;
    bool exact = false;        // exponents read from pure power-law generators
    bool bounded_mu = false;
    std::array<double, 4> fit_quality{};  // max log-log residual: lambda, tau, mu, nu
    std::string reason;
};

AlgebraicClass classify_algebraic(const SpectrumSpec& spec, const ModelParams& params, IndexRange k_range);

struct ConsistencyVerdict {
    bool theta1_ok = false;
    double gamma1 = 0.0;
    bool theta2_ok = false;
    double gamma2 = 0.0;
    double gamma12 = 0.0;
};

ConsistencyVerdict consistency_conditions(const AlgebraicClass& cls);

struct SlowlyIncreasingOptions {
    double pass_threshold = 0.05;  // r_n at n_max must be below this to pass
    double fail_floor = 0.1;       // r_n staying above this over the last decile is a fail
};

struct SlowlyIncreasingResult {
    std::vector<std::pair<std::int64_t, double>> ratio_curve;
    Verdict verdict = Verdict::inconclusive;
    double final_ratio = 0.0;
};

// seq(k) must be strictly positive for 1 <= k <= n_max; throws otherwise.
SlowlyIncreasingResult slowly_increasing_test(const std::function<SignedLog(std::int64_t)>& seq,
                                              std::int64_t n_max, const SlowlyIncreasingOptions& opts = {});

struct Conditions12 {
    Verdict cond1 = Verdict::inconclusive;
    Verdict cond2 = Verdict::inconclusive;
    SlowlyIncreasingResult detail1;
    SlowlyIncreasingResult detail2;
    std::int64_t first_index = 1;
};

Conditions12 conditions_1_2(const SpectrumSpec& spec, const ModelParams& params, std::int64_t n_max);

}  // namespace shyp

#include <cmath>

#include <gtest/gtest.h>

#include "shyp/config.hpp"
#include "shyp/error.hpp"

using namespace shyp;

namespace {

void expect_same(const Generator& a, const Generator& b, std::int64_t k_last) {
    for (std::int64_t k = 1; k <= k_last; ++k) {
        const SignedLog x = a.evaluate(k), y = b.evaluate(k);
        EXPECT_EQ(x.sign, y.sign) << k;
        if (x.sign != 0) EXPECT_DOUBLE_EQ(x.log_abs, y.log_abs) << k;
    }
}

}  // namespace

TEST(Config, CatalogDocument) {
    const RunConfig rc = parse_config(R"({
        "spectrum": {"catalog": "scaled_laplacian_linear_damping", "dimension": 2},
        "params": {"theta2": -0.25},
        "grid": {"n_steps": 256},
        "experiment": {"N_list": [10, 20], "replicates": 5, "seed": 3, "route": "innovation"},
        "output": {"dir": "out/x"}
    })");
    EXPECT_EQ(rc.catalog_name, "scaled_laplacian_linear_damping");
    EXPECT_EQ(rc.experiment.spectrum.dimension, 2);
    EXPECT_EQ(rc.experiment.params.theta2, -0.25);
    EXPECT_EQ(rc.experiment.grid.n_steps, 256);
    EXPECT_EQ(rc.experiment.N_list, (std::vector<std::int64_t>{10, 20}));
    EXPECT_EQ(rc.experiment.replicates, 5);
    EXPECT_EQ(rc.experiment.seed, 3u);
    EXPECT_EQ(rc.experiment.route, EstimatorRoute::innovation);
    EXPECT_EQ(rc.experiment.out_dir, "out/x");
    EXPECT_TRUE(rc.echo.contains("spectrum"));
}

TEST(Config, ExplicitGeneratorsAndOrder) {
    const RunConfig rc = parse_config(R"({
        "spectrum": {"dimension": 2, "k_max": 500,
                     "kappa": 0,
                     "tau": {"type": "power_law", "coefficient": 3, "order": 2},
                     "rho": {"type": "signed_alternating", "inner": {"type": "constant", "coefficient": 2}},
                     "nu": {"type": "explicit", "values": [1, 2, 3]}},
        "params": {"theta1": 1, "theta2": 0, "theta1_box": [0.5, 2], "theta2_box": [-1, 1]}
    })");
    const SpectrumSpec& s = rc.experiment.spectrum;
    EXPECT_EQ(s.k_max, 500);
    EXPECT_TRUE(s.kappa.identically_zero());
    EXPECT_NEAR(s.tau.evaluate(16).value(), 3.0 * 16, 1e-12);
    EXPECT_NEAR(s.rho.evaluate(1).value(), -2.0, 1e-14);
    EXPECT_NEAR(s.rho.evaluate(2).value(), 2.0, 1e-14);
    EXPECT_NEAR(s.nu.evaluate(3).value(), 3.0, 1e-14);
    EXPECT_EQ(s.max_index(), 3);
}

TEST(Config, GeneratorRoundTrip) {
    const std::vector<Generator> gens = {
        Generator(PowerLaw{2.5, 1.5}),          Generator(ExpLaw{0.5, 1.0}),
        Generator(LogLaw{1.0, 2.0, 1.0}),       Generator(LogLogLaw{1.0, 3.0}),
        Generator(Constant{-4.0}),              Generator(Explicit{{1, -2, 3}}),
        Generator(PowerLaw{1.0, 2.0}, true),
    };
    for (const Generator& g : gens) {
        const Generator back = generator_from_json(nlohmann::json::parse(to_json(g).dump()), 1);
        EXPECT_EQ(back.alternating(), g.alternating());
        expect_same(g, back, 3);
    }
}

TEST(Config, SpectrumRoundTrip) {
    const RunConfig rc = parse_config(R"({"spectrum": {"catalog": "kelvin_voigt", "dimension": 1}})");
    const SpectrumSpec s = spectrum_from_json(nlohmann::json::parse(to_json(rc.experiment.spectrum).dump()));
    EXPECT_EQ(s.dimension, rc.experiment.spectrum.dimension);
    EXPECT_EQ(s.k_max, rc.experiment.spectrum.k_max);
    expect_same(s.kappa, rc.experiment.spectrum.kappa, 50);
    expect_same(s.tau, rc.experiment.spectrum.tau, 50);
    expect_same(s.rho, rc.experiment.spectrum.rho, 50);
    expect_same(s.nu, rc.experiment.spectrum.nu, 50);
}

TEST(Config, ParseErrorReportsPosition) {
    try {
        parse_config("{\n  \"spectrum\": {\n    \"catalog\": ,\n  }\n}");
        FAIL() << "no exception";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.column(), 16u);
        EXPECT_NE(std::string(e.what()).find("line 3, column 16"), std::string::npos) << e.what();
    }
}

TEST(Config, RejectsBadDocuments) {
    EXPECT_THROW(parse_config("[]"), ConfigError);
    EXPECT_THROW(parse_config(R"({"spectrum": {"catalog": "kelvin_voigt"}, "bogus": 1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"params": {}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"spectrum": {"catalog": "no_such_equation"}})"), ConfigError);
    EXPECT_THROW(generator_from_json(nlohmann::json::parse(R"({"type": "cubic_spline"})"), 1), ConfigError);
    EXPECT_THROW(generator_from_json(nlohmann::json::parse(R"({"type": "power_law", "order": 2, "exponent": 1})"), 1),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({"spectrum": {"catalog": "kelvin_voigt"}, "grid": {"n_steps": 0}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"spectrum": {"catalog": "kelvin_voigt"}, "experiment": {"route": "x"}})"),
                 ConfigError);
}

TEST(Config, CheckRangeClampedToSpectrum) {
    const RunConfig rc = parse_config(R"({
        "spectrum": {"dimension": 1, "tau": {"type": "explicit", "values": [1, 2, 3, 4]}, "nu": 1},
        "params": {"theta1": 1, "theta2": 0, "theta1_box": [0.5, 2], "theta2_box": [-1, 1]},
        "check": {"k_first": 1, "k_last": 1000}
    })");
    EXPECT_EQ(rc.check.range.last, 4);
}

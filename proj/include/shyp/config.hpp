#pragma once

#include <string>

#include <json.hpp>

#include "shyp/montecarlo.hpp"
#include "shyp/spectrum.hpp"

namespace shyp {

// One document drives a whole run:
//
//   {
//     "spectrum": {"catalog": "kelvin_voigt", "dimension": 1}
//              or {"dimension": 1, "k_max": 1000000,
//                  "kappa": {"type": "power_law", "coefficient": 1, "exponent": 2}, ...},
//     "params":     {"theta1": 1, "theta2": 1, "theta1_box": [a, b], "theta2_box": [a, b], "T": 1},
//     "grid":       {"n_steps": 4096},
//     "experiment": {"N_list": [...], "replicates": 200, "seed": 1, "route": "statistics",
//                    "endpoint_identities": true, "workers": 0, "significance": 0.01},
//     "check":      {"k_first": 1, "k_last": 100000, "theta_grid": 16, "C_star": ..., "C": ..., "J": ...},
//     "output":     {"dir": "out"}
//   }
//
// Generator types: power_law (coefficient, exponent or order; order/dimension
// is the exponent), exp_law (coefficient, rate), log_law (coefficient,
// exponent, shift), loglog_law (coefficient, shift), constant (coefficient),
// explicit (values) and signed_alternating (inner).  A missing sequence is 0.
// With a catalog entry, params default to the entry's and may be overridden.
struct CheckConfig {
    IndexRange range{1, 100'000};
    int theta_grid = 16;
    HyperbolicConstants fixed;
};

struct RunConfig {
    std::string catalog_name;
    std::string equation;
    ExperimentConfig experiment;  // carries spectrum, params, grid, seed, out_dir
    CheckConfig check;
    nlohmann::ordered_json echo;  // resolved document
};

// Throws ConfigError with a 1-based line and column when the position is known.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::ordered_json to_json(const Generator& g);
nlohmann::ordered_json to_json(const SpectrumSpec& s);
nlohmann::ordered_json to_json(const ModelParams& p);
Generator generator_from_json(const nlohmann::json& j, int dimension);
SpectrumSpec spectrum_from_json(const nlohmann::json& j);

}  // namespace shyp

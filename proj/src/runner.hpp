#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectral_census.hpp"

namespace dissip::runner {

struct Tolerances {
    double stability_rel = 1e-4;
    double outer_fraction = 0.2;
    double outer_mass_max = 0.01;
    double decay_lengths = 7.0;
    double zero_tol = 1e-6;
    double critical_tol = 1e-14;
    double lambda0 = 0.25;
    double delta = 0.5;
    double kernel_rel = 0.05;
};

struct CensusSettings {
    bool cross_check = true;
    bool grid_doubling = false;
    double accumulation_E0 = 1.0;
    double accumulation_delta = 0.2;
    double accumulation_lambda = 0.2;
};

struct RunConfig {
    int dimension = 3;
    int ell = 0;
    RadialPotential potential;
    std::optional<int> tune_ell;
    resonance::CriticalScan scan;
    double shoot_radius = 40.0;
    radial::UniformGrid grid{40.0, 3999};
    radial::UniformGrid seed_grid{40.0, 399};
    std::vector<double> lambdas{0.02, 0.05, 0.1, 0.2};
    std::vector<census::Scenario> scenarios;  // resolved from "scenario"
    std::string scenario_spec = "all";
    std::string output_dir = "out";
    int refine = 2;
    Tolerances tol;
    CensusSettings census;
    nlohmann::json resolved;  // normalized config with every default filled in
};

// Validates and normalizes a config. seed_tolerances (may be null) supplies
// tolerance defaults that the config's own "tolerances" object overrides.
// Throws ConfigError with a JSON pointer on the first violation.
RunConfig parse_config(const nlohmann::json& config, const nlohmann::json& seed_tolerances = nullptr);

struct RunRequest {
    std::string subcommand;
    std::string config_text;
    std::string seed_tolerances_text;  // empty: none
    std::string output_dir;            // empty: from config
    int refine = -1;                   // -1: from config
};

struct RunOutcome {
    int exit_code = 0;  // 0 success/PASS, 1 FAIL or numerical failure, 2 config error
    std::string summary;
    std::string error;
    std::string error_pointer;
    std::vector<std::string> files;
};

RunOutcome run(const RunRequest& req);

const std::vector<std::string>& subcommands();

}  // namespace dissip::runner

// commands.hpp: the anharm subcommands.

#pragma once

#include "config.hpp"

#include "anharm/anharm.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace anharm::cli {

struct CommandOptions {
    std::filesystem::path out = ".";
    unsigned threads = 1;
    bool seedless = false;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitValidation = 3;

// Steady state and sensor operators for the configured model and bath.
struct SensorSetup {
    ModelSpec spec;
    EigenSystem eigen;
    RateTable rates;
    LiouvillianMatrix L;
    DensityVector v_ss;
    FockOperator x_plus;
    ReorderingMatrices T;
};

SensorSetup build_sensor_setup(const RunConfig& cfg);

int run_sweep_g2(const RunConfig& cfg, const CommandOptions& opt);
int run_spectrum(const RunConfig& cfg, const CommandOptions& opt);
int run_two_photon_map(const RunConfig& cfg, const CommandOptions& opt);
int run_levels(const RunConfig& cfg, const CommandOptions& opt);
int run_validate(const RunConfig& cfg, const CommandOptions& opt);

struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

// The oracle suite behind `validate`; never throws for numerical failures,
// which are recorded as failed checks.
std::vector<Check> run_checks(const RunConfig& cfg);

} // namespace anharm::cli

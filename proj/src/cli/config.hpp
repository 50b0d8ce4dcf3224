// config.hpp: run configuration for the anharm command line tool.
//
// Configs are YAML (nested sections of key: value). Every section and key is
// optional; missing values take the defaults below, which reproduce the
// U = 1e-3, T = 0.3, gamma_a = 1e-4, Gamma = 5e-4 working point.

#pragma once

#include "anharm/field.hpp"
#include "anharm/fock.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace anharm::cli {

// Either an explicit list or start/stop/count with linear or log spacing.
struct Range {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
    bool log = false;
    std::vector<double> explicit_values;

    std::vector<double> values() const;
};

struct CircuitConfig {
    double E_C = 0.0;
    double E_J = 0.0;
    int max_order = 6;
};

struct ModelConfig {
    Model kind = Model::quartic;
    double omega_a = 1.0;
    double U = 1e-3;
    std::vector<PowerTerm> extra_orders;
    std::optional<CircuitConfig> circuit;
};

struct TruncationConfig {
    Index keep = 10;
    Index dim = 60;         // working Fock dimension
    Index ceiling = 512;    // largest retained count for auto-escalation
    double tolerance = 1e-8; // doubling-test tolerance
};

struct BathConfig {
    double gamma_a = 1e-4;
    double T = 0.3;
};

// Operator feeding the sensors: the eigenbasis positive-frequency split of
// the quadrature, or the bare annihilation operator rotated to the eigenbasis.
enum class Feed { eigen_split, ladder };

struct FieldConfig {
    Quadrature quadrature = Quadrature::X;
    Feed feed = Feed::eigen_split;
};

struct SensorConfig {
    double Gamma1 = 5e-4;
    double Gamma2 = 5e-4;
    Range grid1{1.003, 1.043, 60, false, {}};
    std::optional<Range> grid2;

    const Range& second_grid() const { return grid2 ? *grid2 : grid1; }
};

enum class Observable { kerr, quadrature, attractive };

struct SweepConfig {
    Observable observable = Observable::kerr;
    Quadrature quadrature = Quadrature::X;
    Range U{0.006737946999085467, 7.38905609893065, 40, true, {}};
    Range T{0.1, 7.38905609893065, 40, true, {}};
};

enum class Branch { repulsive, attractive, both };

struct LevelsConfig {
    Range U{0.0, 0.03, 31, false, {}};
    int count = 8;
    Branch branch = Branch::both;
};

struct ValidateConfig {
    int spectrum_points = 20;
    int correlation_points = 10;
};

struct RunConfig {
    ModelConfig model;
    TruncationConfig truncation;
    BathConfig bath;
    FieldConfig field;
    SensorConfig sensors;
    SweepConfig sweep;
    LevelsConfig levels;
    ValidateConfig validate;

    // ModelSpec with the configured working dimension.
    ModelSpec model_spec() const;
    std::vector<std::string> model_warnings() const;

    nlohmann::json to_json() const;
};

// Throws ConfigError with "<source>:<line>:<col>: <field>: <message>".
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

const char* to_string(Feed f);
const char* to_string(Observable o);
const char* to_string(Branch b);

} // namespace anharm::cli

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirac/boundary.hpp"
#include "dirac/evolve.hpp"

namespace dirac {

using ojson = nlohmann::ordered_json;

struct BoundaryConfig {
    std::string family = "transmission";  // transmission | chirality | aps | rotated | custom
    std::string base = "transmission";    // base family of "rotated"
    TimeFunction phi = TimeFunction::constant(0.0);
    std::vector<Mat4> matrices;  // "custom": one block per mode, or a single block for all
};

struct RunConfig {
    std::string scheme = "crank-nicolson";  // or "mollified"
    double epsilon = 0.1;
    std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
    std::uint64_t seed = 1;
    int snapshot_every = 1;
    std::vector<double> output_times;  // empty: every snapshot
    bool parallel_modes = true;
};

struct CheckConfig {
    std::vector<std::string> suites;  // empty: all suites
    int samples = 50;
    int trials = 3;
    double support_threshold = 1e-8;
    double flux_tolerance = 1e-10;
    double drift_tolerance = 1e-10;
    double admissibility_tolerance = 1e-10;
    double green_tolerance = 1e-2;
    double stability_delta = 1e-3;
    int spectrum_points = 64;
};

struct ExperimentConfig {
    Geometry geometry;
    int nx = 256;
    double dt = 0.0;  // resolved: explicit dt or dt_over_h * h
    double t_init = 0.0;
    double t_begin = 0.0;
    double t_end = 1.0;
    BoundaryConfig boundary;
    InitialData psi0;
    std::vector<SourceTerm> sources;
    RunConfig run;
    CheckConfig check;

    Grid grid() const { return Grid::make(nx, geometry.length); }
    CauchyData cauchy_data() const;
    SolverOptions solver_options() const;
};

/// Strict parse: unknown keys, wrong types and out-of-range values raise ConfigError.
ExperimentConfig parse_config(const ojson& j);
ExperimentConfig load_config(const std::string& path);

TimeFunction parse_time_function(const ojson& j, const std::string& where);
ojson time_function_json(const TimeFunction& f);

/// Family named in the config, built for its geometry.
ProjectorFamily make_family(const ExperimentConfig& cfg, const CliffordModel& model);

}  // namespace dirac

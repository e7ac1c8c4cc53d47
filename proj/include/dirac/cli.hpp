#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dirac/config.hpp"

namespace dirac::cli {

enum ExitCode : int { Ok = 0, ChecksFailed = 1, ConfigFailure = 2, SolverFailure = 3 };

struct Options {
    std::string command;  // simulate | check | exact | green | spectrum
    std::string config;
    std::string out = ".";
    std::string only;  // single check suite
    bool quiet = false;
};

/// Runs one subcommand and maps typed errors to exit codes.
int run(const Options& options);

int cmd_simulate(const ExperimentConfig& cfg, const Options& options);
int cmd_check(const ExperimentConfig& cfg, const Options& options);
int cmd_exact(const ExperimentConfig& cfg, const Options& options);
int cmd_green(const ExperimentConfig& cfg, const Options& options);
int cmd_spectrum(const ExperimentConfig& cfg, const Options& options);

/// Names accepted by --only and check.suites.
const std::vector<std::string>& suite_names();

/// 17 significant digits, locale-independent.
std::string format_double(double v);

inline const char* csv_header() { return "t,mode,x,re0,im0,re1,im1,energy_density"; }
/// Appends one row per node of a physical (not tilde) field.
void append_field_rows(std::string& out, double t, int mode, const Grid& grid, const Field& psi);

}  // namespace dirac::cli

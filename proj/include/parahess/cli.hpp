#pragma once

// Batch subcommands. Exit codes: 0 success, 1 configuration or IO error,
// 2 certificate or check failure.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "parahess/config.hpp"

namespace parahess {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitCheck = 2;

struct CliOptions {
    std::string config;
    std::string preset;
    std::string out = ".";
    std::string scheme;
    std::string field;
    std::string checks;
    std::string fixture;
    std::optional<double> tol;
    std::uint64_t seed = 7;
    int levels = 3;
};

/// Config from --config or --preset (exactly one), with --scheme applied.
RunConfig resolve_config(const CliOptions& o);

/// Writes solution.csv, diagnostics.json, certificates.json and manifest.json.
int cmd_solve(const CliOptions& o, std::ostream& out, std::ostream& err);
/// Checks: subsolution, supersolution, gamma_sh, comparison_sub,
/// comparison_super, admissible. Writes verify_reports.json.
int cmd_verify(const CliOptions& o, std::ostream& out, std::ostream& err);
/// Writes convergence.csv: level,h,dt,max_err,order,perron_err,explicit_err,cross_gap,bound_5h2.
int cmd_convergence(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_selftest(const CliOptions& o, std::ostream& out, std::ostream& err);

}  // namespace parahess

#pragma once

// Problem configuration files and bundled presets.
//
//   [problem]  name, boundary_sampling (node | projected)
//   [domain]   n, R, a, h            ball |z| < R with rho = a (|z|^2 - R^2)
//   [time]     T, M
//   [operator] kind (sigma_k_root), k
//   [data]     g, G, phi, u0, exact  expressions (see expression.hpp) over
//              t, x1..xn, y1..yn, r, norm2 = |z|^2, fone = f(1,...,1);
//              g and u0 may not use t or r, phi may not use r, exact is optional
//   [solver]   scheme, dt_initial, dt_min, cfl_safety, eps_g, tol_perron,
//              max_sweeps, tol_residual, admissibility_slack, barrier_eps,
//              tol_barrier, tol_certificate, explicit_cert_factor,
//              exec (serial | parallel), perron_ordering (gauss_seidel | coloured)
//
// Unknown sections or keys are rejected.

#include <optional>
#include <string>
#include <vector>

#include "parahess/problem.hpp"
#include "parahess/solver.hpp"

namespace parahess {

struct RunConfig {
    std::string name = "custom";
    BoundarySampling sampling = BoundarySampling::node;
    int n = 1;
    double R = 1.0;
    double a = 2.0;
    double h = 0.125;
    double T = 0.25;
    int M = 64;
    std::string op_kind = "sigma_k_root";
    int k = 1;
    std::string g = "fone";
    std::string G = "0";
    std::string phi = "norm2";
    std::string u0 = "norm2";
    std::string exact;
    SolverConfig solver;
};

/// ConfigError names the offending section.key.
RunConfig parse_config(const std::string& ini_text);
RunConfig load_config(const std::string& path);

std::vector<std::string> preset_names();
/// ConfigError for unknown names.
RunConfig preset_config(const std::string& name);

/// INI text with every key materialized; parse_config inverts it exactly.
std::string config_to_ini(const RunConfig& c);

/// Level l of a refinement ladder: h / 2^l and M * 4^l (dt proportional to h^2).
RunConfig refine(const RunConfig& c, int level);

ProblemSpec build_problem(const RunConfig& c);
/// The [data] exact expression, when present.
std::optional<TimeSpaceFn> exact_solution(const RunConfig& c);

}  // namespace parahess

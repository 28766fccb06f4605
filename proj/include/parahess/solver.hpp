#pragma once

// Two independent discretizations of the Cauchy-Dirichlet problem: explicit
// forward-Euler marching of the log-form equation, and the discrete Perron
// envelope between the sub- and superbarrier. `solve` runs either or both.

#include <optional>
#include <string>
#include <vector>

#include "parahess/barriers.hpp"
#include "parahess/kernels.hpp"
#include "parahess/problem.hpp"
#include "parahess/verify.hpp"

namespace parahess {

enum class Scheme { explicit_euler, perron, both };

std::string scheme_name(Scheme s);
/// Accepts "explicit", "perron" and "both"; ArgumentError otherwise.
Scheme parse_scheme(const std::string& name);

struct SolverConfig {
    Scheme scheme = Scheme::perron;
    /// 0 selects the CFL estimate from the initial slice.
    double dt_initial = 0.0;
    double dt_min = 1e-12;
    double cfl_safety = 0.9;
    double eps_g = kDefaultEpsG;
    double tol_perron = 1e-12;
    long max_sweeps = 100000;
    double tol_residual = 1e-9;
    double admissibility_slack = 1e-10;
    /// Barrier width.
    double barrier_eps = 0.1;
    double tol_barrier = 1e-9;
    /// Perron certificates use this tolerance.
    double tol_certificate = 1e-8;
    /// Explicit output is certified against the backward residual with
    /// tolerance explicit_cert_factor * dt * (1 + sup F).
    double explicit_cert_factor = 1.0;
    Exec exec = Exec::parallel;
    /// Coloured (parallel) Perron sweeps instead of lexicographic Gauss-Seidel.
    bool perron_coloured = false;
    std::optional<AdmissibilityWitness> witness;

    /// ConfigError on dt_min > dt_initial, cfl_safety outside (0,1] or a
    /// nonpositive tolerance.
    void validate() const;
};

struct Certificates {
    VerificationReport subsolution;
    VerificationReport supersolution;
    VerificationReport gamma_sh;
    VerificationReport below_super;  ///< comparison(u, superbarrier)
    VerificationReport above_sub;    ///< comparison(subbarrier, u)
    bool pass() const {
        return subsolution.pass && supersolution.pass && gamma_sh.pass && below_super.pass && above_sub.pass;
    }
    std::vector<const VerificationReport*> all() const {
        return {&subsolution, &supersolution, &gamma_sh, &below_super, &above_sub};
    }
};

struct SchemeRun {
    Scheme scheme = Scheme::perron;
    SpaceTimeField field;
    /// Accepted step sizes (explicit).
    std::vector<double> dt_history;
    /// sup over interior nodes of |residual| per time node m >= 1.
    std::vector<double> residual_sup;
    long sweeps = 0;
    long rejected_steps = 0;
    bool converged = true;
    /// Perron nodes whose current value was already infeasible (time index, node).
    std::vector<std::pair<int, std::size_t>> flagged;
    double certificate_tol = 0.0;
    Certificates certificates;
};

struct SolveResult {
    Scheme scheme = Scheme::perron;
    /// Perron field when both schemes ran.
    SpaceTimeField field;
    std::vector<SchemeRun> runs;
    std::optional<double> cross_gap;
    BarrierBundle subbarrier;
    BarrierBundle superbarrier;
    const SchemeRun& primary() const { return runs.front(); }
    const SchemeRun* run(Scheme s) const;
    bool certified() const;
};

/// CFL estimate cfl * h^2 * min F / (4 n max_i df/dlambda_i) over interior
/// nodes of the initial slice with F > 0; the grid step when no node qualifies.
double cfl_dt(const ProblemSpec& p, double cfl_safety);

struct ExplicitStep {
    SpatialField next;
    double dt = 0.0;
    int halvings = 0;
};

/// One accepted explicit step from time t of at most dt. The trial slice is
/// accepted when every interior node stays in the closed cone (slack) and,
/// when given, lies within [lower - tol, upper + tol]. Halves dt on rejection;
/// NumericalError below dt_min or when F = 0 at some node of `prev`.
ExplicitStep step_explicit(const ProblemSpec& p, std::span<const double> prev, double t, double dt,
                           const SolverConfig& cfg, std::span<const double> lower = {},
                           std::span<const double> upper = {}, double bound_tol = 0.0);

/// Largest r in [current, B] keeping residual(m, node) >= -tol_residual, by
/// bisection (60 iterations, lower endpoint returned). Uses the exact shift
/// lambda(r) = lambda(current) - (r - current) / h^2. When the current value is
/// already infeasible returns it and sets *infeasible.
double perron_max_value(const ProblemSpec& p, const SpaceTimeField& u, int m, std::size_t node, double B,
                        const SolverConfig& cfg, bool* infeasible = nullptr);

SchemeRun explicit_solve(const ProblemSpec& p, const SolverConfig& cfg, const BarrierBundle& sub,
                         const BarrierBundle& super);
SchemeRun perron_solve(const ProblemSpec& p, const SolverConfig& cfg, const BarrierBundle& sub,
                       const BarrierBundle& super);

/// Builds barriers (trivial witness unless cfg.witness is set), runs the
/// configured scheme(s) and attaches certificates. PreconditionError when no
/// admissibility witness is available.
SolveResult solve(const ProblemSpec& p, const SolverConfig& cfg = {});

}  // namespace parahess

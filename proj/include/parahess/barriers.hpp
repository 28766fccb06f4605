#pragma once

// eps-subbarriers and eps-superbarriers with automatically chosen constants,
// and the slice-wise discrete harmonic extension.

#include <optional>
#include <string>

#include "parahess/kernels.hpp"
#include "parahess/problem.hpp"
#include "parahess/verify.hpp"

namespace parahess {

enum class BarrierSide { sub, super };

struct BarrierConstants {
    double M1 = 0.0;        ///< sub: slope of the u0-based component
    double M2 = 0.0;        ///< sub: weight of rho in the phi-based component
    double M1_prime = 0.0;  ///< super: sup|G(t,z,u0)| + sup|d_t phi|
    double C_eps = 0.0;     ///< super: witness constant
    int searches = 0;       ///< certificate evaluations spent in the constant search
};

struct BarrierBundle {
    BarrierSide side = BarrierSide::sub;
    double epsilon = 0.0;
    SpaceTimeField field;
    /// The two components whose max (sub) or min (super) is `field`.
    SpaceTimeField first;
    SpaceTimeField second;
    BarrierConstants constants;
    VerificationReport certificate;
    VerificationReport sandwich;
    bool certified() const { return certificate.pass && sandwich.pass; }
};

struct BarrierOptions {
    double tol_b = 1e-9;
    double M_max = 1e12;
    double eps_g = kDefaultEpsG;
    double tol_harmonic = 1e-9;
    long max_sor_sweeps = 1000000;
    Exec exec = Exec::parallel;
};

/// max(u0 + eps (rho - c)/(2c) - M1 t,  phi - eps/2 + M2 (rho - r_b)), c = sup(-rho),
/// r_b = max(0, max of rho over boundary nodes). The first component is capped
/// at phi on boundary nodes; the second equals phi - eps/2 there.
/// M1 and M2 are the smallest values on the ladder {0} U {2^(j/4)} for which
/// the component passes check_subsolution at tol_b. Throws NumericalError
/// beyond M_max.
BarrierBundle build_subbarrier(const ProblemSpec& p, double eps, const BarrierOptions& opts = {});

/// min(u_eps + (C_eps + M1') t,  slice-wise harmonic extension of phi + eps).
/// The witness must pass check_admissible (PreconditionError otherwise).
BarrierBundle build_superbarrier(const ProblemSpec& p, double eps, const AdmissibilityWitness& witness,
                                 const BarrierOptions& opts = {});

/// Data sandwich of a barrier: sub has u0 - eps <= u(0) <= u0 and
/// phi - eps <= u <= phi laterally; super mirrors with +eps.
VerificationReport check_barrier_sandwich(const ProblemSpec& p, const SpaceTimeField& u, BarrierSide side, double eps,
                                          double tol);

struct HarmonicStats {
    long sweeps = 0;
    double residual = 0.0;
};

/// Solves Delta_h u = 0 at interior nodes with the boundary-node values of
/// `initial` held fixed, by SOR with omega = 2 / (1 + sin(pi h / L)). The
/// interior of `initial` is the starting guess.
SpatialField harmonic_extension(const GridDomain& dom, SpatialField initial, double tol_h,
                                Exec exec = Exec::parallel, long max_sweeps = 1000000, HarmonicStats* stats = nullptr);

/// Smallest ladder value in {0} U {2^(j/4)} for which `passes` holds,
/// assuming the pass set is upward closed. Returns nullopt beyond M_max.
std::optional<double> ladder_search(const std::function<bool(double)>& passes, double M_max, int* evaluations = nullptr);

/// First ladder value 2^(j/4), j = j_start, j_start + 4, ..., that passes,
/// refined downward to a single ladder step. Returns nullopt beyond M_max.
std::optional<double> ladder_scan(const std::function<bool(double)>& passes, int j_start, double M_max,
                                  int* evaluations = nullptr);

}  // namespace parahess

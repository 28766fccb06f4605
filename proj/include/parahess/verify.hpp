#pragma once

// Certification suite: discrete sub/supersolution checks, comparison audit,
// Gamma-subharmonicity of time slices and admissibility witnesses.

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parahess/grid_domain.hpp"
#include "parahess/problem.hpp"
#include "parahess/residual.hpp"

namespace parahess {

struct VerificationReport {
    std::string check;
    bool pass = true;
    double tol = 0.0;
    /// Worst (smallest-margin) node; absent when nothing was tested.
    struct Worst {
        double t = 0.0;
        int m = 0;
        std::size_t node = 0;
        std::vector<double> z;
        double margin = std::numeric_limits<double>::infinity();
    };
    std::optional<Worst> worst;
    std::size_t tested = 0;
    std::size_t failed = 0;
    std::map<std::string, double> details;
    std::string note;
};

struct CheckOptions {
    double tol = 1e-8;
    double eps_g = kDefaultEpsG;
};

/// residual >= -tol at interior (m >= 1) nodes, u <= phi + tol on the
/// lateral boundary and u(0,.) <= u0 + tol.
VerificationReport check_subsolution(const ProblemSpec& p, const SpaceTimeField& u, const CheckOptions& opts = {});

/// Either lambda(H_h u) is outside the closed cone (passes vacuously) or
/// F <= rhs + tol; u >= phi - tol laterally and u(0,.) >= u0 - tol.
VerificationReport check_supersolution(const ProblemSpec& p, const SpaceTimeField& u, const CheckOptions& opts = {});

/// sup over interior (m >= 1) of (u - v) versus sup over the parabolic
/// boundary of (u - v)_+; passes iff interior <= boundary + tol.
VerificationReport check_comparison(const SpaceTimeField& u, const SpaceTimeField& v, double tol);

/// lambda(H_h u(t0,.)) in the closed cone (slack) at every interior node.
VerificationReport check_gamma_sh_slice(const SpaceTimeField& u, double t0, const ConeSpec& cone, double slack);
/// The same check over every slice of the field's window.
VerificationReport check_gamma_sh_all(const SpaceTimeField& u, const ConeSpec& cone, double slack);

/// u0 <= u_eps <= u0 + eps within tol at all active nodes and
/// F(H_h u_eps) <= e^{C_eps} g + tol at interior nodes (outside-cone nodes pass).
VerificationReport check_admissible(const ProblemSpec& p, const AdmissibilityWitness& w, double tol);

struct ExtractionInfo {
    int delta_index = 0;
    double k0 = 0.0;
    double A = 0.0;
    double C = 0.0;
};

/// Converse direction: from a solved field u build
///   u_eps = u_{k0}(delta, .) + eps/2,  C_eps = k0 + max G(t, z, max u)
/// where delta is the first time node with |u(delta,.) - u0| < eps/4 and k0
/// is doubled until |u_{k0}(delta,.) - u(delta,.)| < eps/4.
AdmissibilityWitness extract_admissibility_witness(const ProblemSpec& p, const SpaceTimeField& u, double eps,
                                                   ExtractionInfo* info = nullptr);

/// Trivial witness u_eps = u0 with the smallest C_eps >= 0 satisfying the
/// operator inequality on the grid. Throws PreconditionError when F(H_h u0) > 0
/// where g = 0.
AdmissibilityWitness trivial_witness(const ProblemSpec& p, double eps);

/// Pointwise maximum of subsolutions, checked as a subsolution. Fails with a
/// precondition note when some input is not itself a subsolution.
VerificationReport check_envelope_stability(const ProblemSpec& p, const std::vector<SpaceTimeField>& fields,
                                            const CheckOptions& opts = {});

}  // namespace parahess

#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "parahess/grid_domain.hpp"
#include "parahess/hessian_core.hpp"

namespace parahess {

/// Where Dirichlet data is sampled for a boundary grid node.
enum class BoundarySampling {
    node,       ///< phi at the node itself (phi is defined near the boundary)
    projected,  ///< phi at the node's projection onto {rho = 0}
};

/// The Cauchy-Dirichlet problem
///   F(Hu) = exp(u_t + G(t,z,u)) g(z)  in (0,T) x Omega,
///   u = phi on [0,T) x dOmega,  u(0,.) = u0.
struct ProblemSpec {
    std::string name;
    std::shared_ptr<const GridDomain> domain;
    TimeGrid time;
    SymOpSpec op = SymOpSpec::sigma_k_root(1, 1);
    NonlinearityFn G;
    SpatialField g;
    TimeSpaceFn phi;
    SpaceFn u0_fn;
    SpatialField u0;
    BoundarySampling sampling = BoundarySampling::node;

    /// Samples g and u0 on the active nodes.
    static ProblemSpec make(std::string name, std::shared_ptr<const GridDomain> domain, TimeGrid time,
                            SymOpSpec op, NonlinearityFn G, SpaceFn g, TimeSpaceFn phi, SpaceFn u0);

    /// phi at time t for a boundary node under the chosen sampling.
    double boundary_value(double t, std::size_t node) const;
    /// Slice of boundary values at time index m (NaN on interior nodes).
    void fill_boundary(int m, std::span<double> slice) const;
    double G_at(int m, std::size_t node, double r) const;
};

/// Approximant u_eps with u0 <= u_eps <= u0 + eps and F(H u_eps) <= e^{C_eps} g.
struct AdmissibilityWitness {
    SpatialField u_eps;
    double C_eps = 0.0;
    double epsilon = 0.0;
};

struct ValidationOptions {
    double tol_compat = 1e-8;
    double gamma_slack = 1e-8;
    int monotone_samples = 256;
    std::uint64_t seed = 7;
};

/// Checks g >= 0 and bounded, a randomized monotone-in-r spot check of G,
/// boundary compatibility |u0 - phi(0,.)| <= tol_compat, operator dimension
/// and discrete Gamma-subharmonicity of u0. Throws ConfigError naming the
/// first failed condition.
void validate_problem(const ProblemSpec& p, const ValidationOptions& opts = {});

}  // namespace parahess

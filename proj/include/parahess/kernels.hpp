#pragma once

// Data-parallel per-node kernels. Every kernel takes an Exec tag: `serial`
// is the reference loop kept for testing, `parallel` the OpenMP version.
// Both produce identical results except where noted (ordering-dependent
// relaxation sweeps).

#include <cstddef>
#include <span>
#include <vector>

#include "parahess/grid_domain.hpp"
#include "parahess/problem.hpp"

namespace parahess {

enum class Exec { serial, parallel };

/// Number of OpenMP threads the parallel kernels use (1 without OpenMP).
int parallel_threads();

/// Eigenvalues of H_h slice and F at every interior node, by interior position.
struct SliceOperator {
    int n = 1;
    std::vector<double> lambda;  ///< n values per interior node, ascending
    std::vector<double> F;       ///< -infinity outside the closed cone
    std::span<const double> eigen(std::size_t pos) const {
        return {lambda.data() + pos * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
    }
};
SliceOperator slice_operator(const GridDomain& dom, const SymOpSpec& op, std::span<const double> slice,
                             double slack, Exec exec);

/// Forward-Euler update of the log-form equation at interior nodes:
///   next = u + dt (log F(H_h u) - log g_eps - G(t, z, u)).
/// Nodes with F <= 0 (or outside the cone) cannot be advanced and are counted.
struct ExplicitUpdate {
    SpatialField next;
    std::size_t bad_nodes = 0;
    std::size_t first_bad = 0;
};
ExplicitUpdate explicit_update(const ProblemSpec& p, std::span<const double> slice, double t, double dt,
                               double eps_g, Exec exec);

/// max over interior nodes of |Delta_h u| (standard 2*dim+1 point Laplacian).
double laplacian_residual(const GridDomain& dom, std::span<const double> u, Exec exec);

/// One SOR sweep of Delta_h u = 0 over interior nodes. Serial visits nodes
/// lexicographically; parallel does a red-black sweep. Returns the largest
/// update magnitude.
double sor_sweep(const GridDomain& dom, std::span<double> u, double omega, Exec exec);

/// Partition of interior positions into colours such that no two nodes of
/// one colour share a Hessian stencil: red-black for n = 1, a linear
/// residue colouring modulo a prime > 4n - 1 otherwise.
std::vector<std::vector<std::size_t>> stencil_coloring(const GridDomain& dom);

}  // namespace parahess

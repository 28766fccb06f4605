#pragma once

// The discrete equation shared by the schemes and the certificates:
//   r = F(H_h u(t_m))(z) - exp(D_t^- u + G(t_m, z, u(t_m,z))) g_eps(z).

#include <span>

#include "parahess/grid_domain.hpp"
#include "parahess/problem.hpp"

namespace parahess {

inline constexpr double kDefaultEpsG = 1e-8;

/// F(H_h slice) at interior node number `pos` (position in domain.interior()).
OperatorValue node_operator(const ProblemSpec& p, std::span<const double> slice, std::size_t pos,
                            double slack = -1.0);

/// exp((value - prev)/dt + G(t_m, z, value)) * max(g, eps_g).
double equation_rhs(const ProblemSpec& p, int m, std::size_t node, double value, double prev, double eps_g);

/// Backward-difference residual at time index m >= 1 and an interior node;
/// -infinity when H_h u leaves the closed cone.
double residual(const ProblemSpec& p, const SpaceTimeField& u, int m, std::size_t node, double eps_g = kDefaultEpsG);

}  // namespace parahess

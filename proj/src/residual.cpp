#include "parahess/residual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parahess/errors.hpp"

namespace parahess {

OperatorValue node_operator(const ProblemSpec& p, std::span<const double> slice, std::size_t pos, double slack) {
    const auto lambda = eigenvalues_hermitian(fd_complex_hessian_at(*p.domain, slice, pos));
    return F_from_eigenvalues(lambda, p.op, slack);
}

double equation_rhs(const ProblemSpec& p, int m, std::size_t node, double value, double prev, double eps_g) {
    const double dudt = (value - prev) / p.time.dt();
    return std::exp(dudt + p.G_at(m, node, value)) * std::max(p.g[node], eps_g);
}

double residual(const ProblemSpec& p, const SpaceTimeField& u, int m, std::size_t node, double eps_g) {
    if (m < 1 || !u.has_time(m) || !u.has_time(m - 1)) throw ArgumentError("residual needs time index m >= 1 in the field");
    const auto pos = p.domain->interior_position(node);
    if (pos < 0) throw ArgumentError("residual is defined at interior nodes only");
    const auto F = node_operator(p, u.slice(m), static_cast<std::size_t>(pos));
    if (F.is_neg_infinity()) return -std::numeric_limits<double>::infinity();
    return F.value() - equation_rhs(p, m, node, u.at(m, node), u.at(m - 1, node), eps_g);
}

}  // namespace parahess

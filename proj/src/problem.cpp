#include "parahess/problem.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "parahess/errors.hpp"

namespace parahess {

ProblemSpec ProblemSpec::make(std::string name, std::shared_ptr<const GridDomain> domain, TimeGrid time,
                              SymOpSpec op, NonlinearityFn G, SpaceFn g, TimeSpaceFn phi, SpaceFn u0) {
    if (!domain) throw ArgumentError("problem needs a domain");
    if (!G || !g || !phi || !u0) throw ArgumentError("problem data functions must all be set");
    ProblemSpec p;
    p.name = std::move(name);
    p.domain = std::move(domain);
    p.time = time;
    p.op = std::move(op);
    p.G = std::move(G);
    p.g = p.domain->sample(g);
    p.phi = std::move(phi);
    p.u0_fn = std::move(u0);
    p.u0 = p.domain->sample(p.u0_fn);
    return p;
}

double ProblemSpec::boundary_value(double t, std::size_t node) const {
    if (sampling == BoundarySampling::projected) return phi(t, domain->projected(node));
    return phi(t, domain->coords(node));
}

void ProblemSpec::fill_boundary(int m, std::span<double> slice) const {
    const double t = time.t(m);
    for (std::size_t a : domain->boundary()) slice[a] = boundary_value(t, a);
}

double ProblemSpec::G_at(int m, std::size_t node, double r) const {
    return G(time.t(m), domain->coords(node), r);
}

void validate_problem(const ProblemSpec& p, const ValidationOptions& opts) {
    const GridDomain& dom = *p.domain;
    if (p.op.n() != dom.n()) throw ConfigError("operator dimension does not match domain dimension");
    for (std::size_t a = 0; a < p.g.size(); ++a) {
        if (!std::isfinite(p.g[a])) throw ConfigError("g must be bounded (non-finite value at a node)");
        if (p.g[a] < 0.0) throw ConfigError("g must be nonnegative");
    }
    for (std::size_t a = 0; a < p.u0.size(); ++a)
        if (!std::isfinite(p.u0[a])) throw ConfigError("u0 must be finite on the grid");

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> ut(0.0, p.time.T);
    std::uniform_real_distribution<double> ur(-10.0, 10.0);
    for (int s = 0; s < opts.monotone_samples; ++s) {
        const std::size_t a = rng() % dom.active_count();
        const double t = ut(rng);
        double r1 = ur(rng), r2 = ur(rng);
        if (r1 > r2) std::swap(r1, r2);
        const double g1 = p.G(t, dom.coords(a), r1), g2 = p.G(t, dom.coords(a), r2);
        if (!(g2 >= g1 - 1e-12 * (1.0 + std::abs(g1))))
            throw ConfigError("G must be nondecreasing in r (spot check failed)");
    }

    for (std::size_t a : dom.boundary()) {
        const double d = std::abs(p.u0[a] - p.boundary_value(0.0, a));
        if (d > opts.tol_compat) throw ConfigError("compatibility u0 = phi(0,.) fails on the boundary");
    }

    double m = 0.0;
    for (double v : p.u0) m = std::max(m, std::abs(v));
    for (std::size_t pos = 0; pos < dom.interior().size(); ++pos) {
        const auto lambda = eigenvalues_hermitian(fd_complex_hessian_at(dom, p.u0, pos));
        if (!in_cone(lambda, p.op.cone(), opts.gamma_slack * (1.0 + m)))
            throw ConfigError("u0 is not Γ-subharmonic on the grid");
    }
}

}  // namespace parahess

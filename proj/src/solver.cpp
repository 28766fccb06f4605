#include "parahess/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "parahess/errors.hpp"
#include "parahess/residual.hpp"

namespace parahess {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sup |F - rhs| over interior nodes of slice m (infinite outside the cone).
double slice_residual_sup(const ProblemSpec& p, const SpaceTimeField& u, int m, double eps_g, Exec exec) {
    const GridDomain& dom = *p.domain;
    const auto op = slice_operator(dom, p.op, u.slice(m), -1.0, exec);
    double sup = 0.0;
    for (std::size_t pos = 0; pos < op.F.size(); ++pos) {
        const std::size_t a = dom.interior()[pos];
        if (op.F[pos] == -kInf) return kInf;
        sup = std::max(sup, std::abs(op.F[pos] - equation_rhs(p, m, a, u.at(m, a), u.at(m - 1, a), eps_g)));
    }
    return sup;
}

// True when every interior node of slice m has residual >= -tol.
bool slice_feasible(const ProblemSpec& p, const SpaceTimeField& u, int m, const SolverConfig& cfg) {
    const GridDomain& dom = *p.domain;
    const auto op = slice_operator(dom, p.op, u.slice(m), -1.0, cfg.exec);
    for (std::size_t pos = 0; pos < op.F.size(); ++pos) {
        const std::size_t a = dom.interior()[pos];
        if (op.F[pos] == -kInf) return false;
        if (op.F[pos] - equation_rhs(p, m, a, u.at(m, a), u.at(m - 1, a), cfg.eps_g) < -cfg.tol_residual) return false;
    }
    return true;
}

void set_data(const ProblemSpec& p, SpaceTimeField& u) {
    u.set_slice(0, p.u0);
    for (int m = 1; m <= p.time.M; ++m) p.fill_boundary(m, u.slice(m));
}

Certificates certify(const ProblemSpec& p, const SpaceTimeField& u, double tol, double eps_g, const BarrierBundle& sub,
                     const BarrierBundle& super) {
    Certificates c;
    c.subsolution = check_subsolution(p, u, {tol, eps_g});
    c.supersolution = check_supersolution(p, u, {tol, eps_g});
    c.gamma_sh = check_gamma_sh_all(u, p.op.cone(), 1e-6 * (1.0 + u.max_abs()));
    c.below_super = check_comparison(u, super.field, tol);
    c.below_super.check = "comparison_superbarrier";
    c.above_sub = check_comparison(sub.field, u, tol);
    c.above_sub.check = "comparison_subbarrier";
    return c;
}

}  // namespace

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::explicit_euler: return "explicit";
        case Scheme::perron: return "perron";
        case Scheme::both: return "both";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "explicit") return Scheme::explicit_euler;
    if (name == "perron") return Scheme::perron;
    if (name == "both") return Scheme::both;
    throw ArgumentError("unknown scheme '" + name + "' (expected explicit, perron or both)");
}

void SolverConfig::validate() const {
    if (!(dt_min > 0.0)) throw ConfigError("dt_min must be positive");
    if (dt_initial != 0.0 && !(dt_min <= dt_initial)) throw ConfigError("dt_min must not exceed dt_initial");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ConfigError("cfl_safety must lie in (0, 1]");
    for (double v : {eps_g, tol_perron, tol_residual, admissibility_slack, barrier_eps, tol_barrier, tol_certificate,
                     explicit_cert_factor})
        if (!(v > 0.0)) throw ConfigError("solver tolerances must be positive");
    if (max_sweeps < 1) throw ConfigError("max_sweeps must be positive");
}

const SchemeRun* SolveResult::run(Scheme s) const {
    for (const auto& r : runs)
        if (r.scheme == s) return &r;
    return nullptr;
}

bool SolveResult::certified() const {
    for (const auto& r : runs)
        if (!r.certificates.pass()) return false;
    return !runs.empty();
}

double cfl_dt(const ProblemSpec& p, double cfl_safety) {
    const GridDomain& dom = *p.domain;
    const auto op = slice_operator(dom, p.op, p.u0, -1.0, Exec::parallel);
    double best = kInf;
    for (std::size_t pos = 0; pos < op.F.size(); ++pos) {
        const auto lambda = op.eigen(pos);
        if (!(op.F[pos] > 0.0) || !in_open_cone(lambda, p.op.cone())) continue;
        const auto grad = f_gradient(p.op, lambda);
        const double gmax = *std::max_element(grad.begin(), grad.end());
        if (gmax > 0.0) best = std::min(best, op.F[pos] / (4.0 * dom.n() * gmax));
    }
    const double dt = cfl_safety * dom.h() * dom.h() * best;
    return std::min(dt, p.time.dt());
}

ExplicitStep step_explicit(const ProblemSpec& p, std::span<const double> prev, double t, double dt,
                           const SolverConfig& cfg, std::span<const double> lower, std::span<const double> upper,
                           double bound_tol) {
    const GridDomain& dom = *p.domain;
    ExplicitStep out;
    if (dt == 0.0) {
        out.next.assign(prev.begin(), prev.end());
        return out;
    }
    while (true) {
        auto up = explicit_update(p, prev, t, dt, cfg.eps_g, cfg.exec);
        if (up.bad_nodes > 0) {
            std::ostringstream os;
            os << "explicit step impossible: F(H_h u) is not positive at " << up.bad_nodes << " nodes (first node "
               << up.first_bad << ", t=" << t << "); use the perron scheme for degenerate data";
            throw NumericalError(os.str());
        }
        for (std::size_t a : dom.boundary()) up.next[a] = p.boundary_value(t + dt, a);

        double scale = 0.0;
        for (double v : up.next) scale = std::max(scale, std::abs(v));
        const auto op = slice_operator(dom, p.op, up.next, cfg.admissibility_slack * (1.0 + scale), cfg.exec);
        std::size_t worst = 0;
        bool ok = true;
        for (std::size_t pos = 0; pos < op.F.size() && ok; ++pos) {
            const std::size_t a = dom.interior()[pos];
            if (op.F[pos] == -kInf) ok = false;
            if (!lower.empty() && up.next[a] < lower[a] - bound_tol) ok = false;
            if (!upper.empty() && up.next[a] > upper[a] + bound_tol) ok = false;
            if (!ok) worst = a;
        }
        if (ok) {
            out.next = std::move(up.next);
            out.dt = dt;
            return out;
        }
        dt *= 0.5;
        ++out.halvings;
        if (dt < cfg.dt_min) {
            std::ostringstream os;
            os << "explicit step rejected below dt_min at t=" << t << "; worst node " << worst;
            throw NumericalError(os.str());
        }
    }
}

double perron_max_value(const ProblemSpec& p, const SpaceTimeField& u, int m, std::size_t node, double B,
                        const SolverConfig& cfg, bool* infeasible) {
    const GridDomain& dom = *p.domain;
    const auto pos = dom.interior_position(node);
    if (pos < 0 || m < 1) throw ArgumentError("perron_max_value needs an interior node and m >= 1");
    if (infeasible) *infeasible = false;
    const double current = u.at(m, node);
    if (!(B > current)) return current;

    const auto lambda0 = eigenvalues_hermitian(fd_complex_hessian_at(dom, u.slice(m), static_cast<std::size_t>(pos)));
    const double inv_h2 = 1.0 / (dom.h() * dom.h());
    const double prev = u.at(m - 1, node);
    std::vector<double> lambda(lambda0.size());
    auto feasible = [&](double r) {
        const double shift = (r - current) * inv_h2;
        for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] = lambda0[i] - shift;
        const auto F = F_from_eigenvalues(lambda, p.op, -1.0);
        if (F.is_neg_infinity()) return false;
        return F.value() - equation_rhs(p, m, node, r, prev, cfg.eps_g) >= -cfg.tol_residual;
    };
    if (!feasible(current)) {
        if (infeasible) *infeasible = true;
        return current;
    }
    if (feasible(B)) return B;
    double lo = current, hi = B;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

SchemeRun perron_solve(const ProblemSpec& p, const SolverConfig& cfg, const BarrierBundle& sub,
                       const BarrierBundle& super) {
    const GridDomain& dom = *p.domain;
    SchemeRun run;
    run.scheme = Scheme::perron;
    run.field = sub.field;
    SpaceTimeField& u = run.field;
    set_data(p, u);

    std::vector<std::vector<std::size_t>> colours;
    if (cfg.perron_coloured) colours = stencil_coloring(dom);
    const auto& interior = dom.interior();

    for (int m = 1; m <= p.time.M; ++m) {
        // Warm start from the extrapolated previous slices when that is
        // itself feasible; otherwise the subbarrier slice.
        {
            const SpatialField base(u.slice(m).begin(), u.slice(m).end());
            double delta = 0.0;
            for (int attempt = 0; attempt < 8; ++attempt) {
                for (std::size_t a : interior) {
                    const double e = m >= 2 ? 2.0 * u.at(m - 1, a) - u.at(m - 2, a) : u.at(m - 1, a);
                    u.at(m, a) = std::min(super.field.at(m, a), std::max(base[a], e - delta));
                }
                if (slice_feasible(p, u, m, cfg)) break;
                u.set_slice(m, base);
                delta = delta == 0.0 ? 1e-10 : delta * 100.0;
            }
        }

        long sweeps = 0;
        bool done = false;
        std::vector<char> flag(interior.size(), 0);
        while (!done) {
            if (sweeps >= cfg.max_sweeps) {
                run.converged = false;
                break;
            }
            double change = 0.0;
            auto relax = [&](std::size_t pos) {
                const std::size_t a = interior[pos];
                bool bad = false;
                const double cur = u.at(m, a);
                const double r = perron_max_value(p, u, m, a, super.field.at(m, a), cfg, &bad);
                flag[pos] = bad ? 1 : 0;
                u.at(m, a) = r;
                return r - cur;
            };
            if (colours.empty()) {
                for (std::size_t pos = 0; pos < interior.size(); ++pos) change = std::max(change, relax(pos));
            } else {
                for (const auto& c : colours) {
                    std::vector<double> d(c.size());
                    const auto count = static_cast<std::ptrdiff_t>(c.size());
#pragma omp parallel for schedule(static)
                    for (std::ptrdiff_t i = 0; i < count; ++i) d[static_cast<std::size_t>(i)] = relax(c[static_cast<std::size_t>(i)]);
                    for (double v : d) change = std::max(change, v);
                }
            }
            ++sweeps;
            done = change < cfg.tol_perron;
        }
        run.sweeps += sweeps;
        for (std::size_t pos = 0; pos < flag.size(); ++pos)
            if (flag[pos]) run.flagged.emplace_back(m, interior[pos]);
    }
    for (int m = 1; m <= p.time.M; ++m) run.residual_sup.push_back(slice_residual_sup(p, u, m, cfg.eps_g, cfg.exec));
    run.certificate_tol = cfg.tol_certificate;
    run.certificates = certify(p, u, run.certificate_tol, cfg.eps_g, sub, super);
    return run;
}

SchemeRun explicit_solve(const ProblemSpec& p, const SolverConfig& cfg, const BarrierBundle& sub,
                         const BarrierBundle& super) {
    const double dt_grid = p.time.dt();
    SchemeRun run;
    run.scheme = Scheme::explicit_euler;
    run.field = SpaceTimeField(p.domain, p.time);
    SpaceTimeField& u = run.field;
    set_data(p, u);

    const double dt_max = std::min(cfg.dt_initial > 0.0 ? cfg.dt_initial : cfl_dt(p, cfg.cfl_safety), dt_grid);
    const double bound_tol = cfg.explicit_cert_factor * dt_grid * (1.0 + super.field.max_abs());
    double dt_try = dt_max;
    for (int m = 0; m < p.time.M; ++m) {
        const double target = p.time.t(m + 1);
        double t = p.time.t(m);
        SpatialField slice(u.slice(m).begin(), u.slice(m).end());
        while (target - t > 1e-13 * dt_grid) {
            const bool landing = dt_try >= target - t;
            const double dt = landing ? target - t : dt_try;
            auto step = landing ? step_explicit(p, slice, t, dt, cfg, sub.field.slice(m + 1),
                                                super.field.slice(m + 1), bound_tol)
                                : step_explicit(p, slice, t, dt, cfg);
            run.rejected_steps += step.halvings;
            run.dt_history.push_back(step.dt);
            t += step.dt;
            slice = std::move(step.next);
            dt_try = step.halvings > 0 ? step.dt : std::min(2.0 * dt_try, dt_max);
        }
        u.set_slice(m + 1, slice);
        p.fill_boundary(m + 1, u.slice(m + 1));
    }

    double supF = 0.0;
    for (int m = 1; m <= p.time.M; ++m) {
        run.residual_sup.push_back(slice_residual_sup(p, u, m, cfg.eps_g, cfg.exec));
        for (double F : slice_operator(*p.domain, p.op, u.slice(m), -1.0, cfg.exec).F)
            if (std::isfinite(F)) supF = std::max(supF, F);
    }
    run.certificate_tol = std::max(cfg.tol_certificate, cfg.explicit_cert_factor * dt_grid * (1.0 + supF));
    run.certificates = certify(p, u, run.certificate_tol, cfg.eps_g, sub, super);
    return run;
}

SolveResult solve(const ProblemSpec& p, const SolverConfig& cfg) {
    cfg.validate();
    SolveResult out;
    out.scheme = cfg.scheme;

    AdmissibilityWitness witness;
    if (cfg.witness) {
        witness = *cfg.witness;
    } else {
        try {
            witness = trivial_witness(p, cfg.barrier_eps);
        } catch (const PreconditionError& e) {
            throw PreconditionError(std::string("no admissibility witness: a solution exists if and only if (u0, g) "
                                                "is admissible, and the trivial witness fails (") +
                                    e.what() + "); supply one explicitly");
        }
    }
    BarrierOptions bo;
    bo.tol_b = cfg.tol_barrier;
    bo.eps_g = cfg.eps_g;
    bo.exec = cfg.exec;
    out.subbarrier = build_subbarrier(p, cfg.barrier_eps, bo);
    out.superbarrier = build_superbarrier(p, cfg.barrier_eps, witness, bo);
    for (const BarrierBundle* b : {&out.subbarrier, &out.superbarrier}) {
        if (!b->certified()) {
            const auto& r = b->certificate.pass ? b->sandwich : b->certificate;
            std::ostringstream os;
            os << (b->side == BarrierSide::sub ? "subbarrier" : "superbarrier") << " failed its " << r.check
               << " certificate";
            if (r.worst) os << " (worst node " << r.worst->node << ", t=" << r.worst->t << ", margin " << r.worst->margin << ")";
            throw NumericalError(os.str());
        }
    }

    if (cfg.scheme == Scheme::perron || cfg.scheme == Scheme::both)
        out.runs.push_back(perron_solve(p, cfg, out.subbarrier, out.superbarrier));
    if (cfg.scheme == Scheme::explicit_euler || cfg.scheme == Scheme::both)
        out.runs.push_back(explicit_solve(p, cfg, out.subbarrier, out.superbarrier));
    if (out.runs.size() == 2) {
        double gap = 0.0;
        const auto& a = out.runs[0].field.values();
        const auto& b = out.runs[1].field.values();
        for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
        out.cross_gap = gap;
    }
    out.field = out.runs.front().field;
    return out;
}

}  // namespace parahess

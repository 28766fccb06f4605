#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "parahess/errors.hpp"
#include "parahess/kernels.hpp"
#include "parahess/solver.hpp"
#include "parahess/verify.hpp"

using namespace parahess;
using fixtures::norm2;

namespace {

struct Toy {
    ProblemSpec p;
    SpaceTimeField u;
    double lambda = 0.3, g = 1.3, prev = 0.1;
};

// n = 1, h = 1: the origin is the only interior node
Toy toy() {
    Toy t;
    const double lam = t.lambda, g = t.g;
    auto phi = [](double s, std::span<const double> z) { return 0.2 + z[0] - 0.5 * z[1] + s; };
    t.p = ProblemSpec::make(
        "toy", make_ball_domain(1, 1.0, 2.0, 1.0), TimeGrid::make(0.25, 4), SymOpSpec::sigma_k_root(1, 1),
        [lam](double, std::span<const double>, double r) { return lam * r; }, [g](std::span<const double>) { return g; },
        phi, [phi](std::span<const double> z) { return phi(0.0, z); });
    t.u = SpaceTimeField(t.p.domain, t.p.time);
    for (int m = 0; m <= t.p.time.M; ++m)
        for (std::size_t a : t.p.domain->boundary()) t.u.at(m, a) = phi(t.p.time.t(m), t.p.domain->coords(a));
    t.u.at(0, t.p.domain->interior().front()) = t.prev;
    return t;
}

// residual of the toy equation written out by hand: u_{z zbar} = Delta u / 4
double toy_residual(const Toy& t, double r) {
    double sum = 0.0;
    for (std::size_t a : t.p.domain->boundary()) sum += t.u.at(1, a);
    const double F = (sum - 4.0 * r) / 4.0;
    if (F < 0.0) return -std::numeric_limits<double>::infinity();
    return F - std::exp((r - t.prev) / t.p.time.dt() + t.lambda * r) * t.g;
}

}  // namespace

TEST_CASE("Perron bisection matches a dense scan on the one-node problem") {
    auto t = toy();
    const std::size_t c = t.p.domain->interior().front();
    const SolverConfig cfg;
    // bracket the root on a unit grid, then scan a unit interval
    double lo = -10.0;
    while (toy_residual(t, lo + 1.0) >= 0.0) lo += 1.0;
    const int samples = 1000000;
    double scan = lo;
    for (int i = 0; i <= samples; ++i) {
        const double r = lo + static_cast<double>(i) / samples;
        if (toy_residual(t, r) >= -cfg.tol_residual) scan = r;
    }
    t.u.at(1, c) = lo;
    const double bis = perron_max_value(t.p, t.u, 1, c, lo + 1.0, cfg);
    CHECK(std::abs(bis - scan) <= 1e-6);

    // clamped at B
    CHECK(perron_max_value(t.p, t.u, 1, c, lo, cfg) == lo);
    // a larger bound never lowers the answer
    CHECK(perron_max_value(t.p, t.u, 1, c, lo + 5.0, cfg) >= bis - 1e-15);

    // infeasible starting value is returned and flagged
    t.u.at(1, c) = lo + 1.0;
    bool flagged = false;
    CHECK(perron_max_value(t.p, t.u, 1, c, lo + 2.0, cfg, &flagged) == lo + 1.0);
    CHECK(flagged);
}

TEST_CASE("explicit step") {
    SolverConfig cfg;
    {
        const auto p = fixtures::stationary(1, 0.25, 0.25, 16);
        const auto step = step_explicit(p, p.u0, 0.0, p.time.dt(), cfg);
        for (std::size_t a = 0; a < p.u0.size(); ++a) CHECK(step.next[a] == doctest::Approx(p.u0[a]).epsilon(1e-14));
    }
    {
        // one step from the exact slice stays within C (dt^2 + dt h^2) of the next exact slice
        const auto p = fixtures::manufactured(2, 0.25, 0.25, 16);
        const double dt = p.time.dt(), h = p.domain->h();
        const auto step = step_explicit(p, p.u0, 0.0, dt, cfg);
        double err = 0.0;
        for (std::size_t a = 0; a < p.u0.size(); ++a)
            err = std::max(err, std::abs(step.next[a] - fixtures::exact_manufactured(step.dt, p.domain->coords(a))));
        CHECK(step.dt == dt);
        CHECK(err <= 10.0 * (dt * dt + dt * h * h));
    }
    {
        // F = 0 cannot be advanced in log form
        const auto p = ProblemSpec::make(
            "flat", make_ball_domain(1, 1.0, 2.0, 0.25), TimeGrid::make(0.25, 16), SymOpSpec::sigma_k_root(1, 1),
            [](double, std::span<const double>, double) { return 0.0; }, [](std::span<const double>) { return 0.0; },
            [](double, std::span<const double>) { return 0.0; }, [](std::span<const double>) { return 0.0; });
        CHECK_THROWS_AS(step_explicit(p, p.u0, 0.0, p.time.dt(), cfg), NumericalError);
    }
}

TEST_CASE("solver configuration") {
    CHECK(parse_scheme("both") == Scheme::both);
    CHECK(scheme_name(Scheme::explicit_euler) == "explicit");
    CHECK_THROWS_AS(parse_scheme("implicit"), ArgumentError);
    SolverConfig bad;
    bad.dt_initial = 1e-6;
    bad.dt_min = 1e-3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    SolverConfig bad_cfl;
    bad_cfl.cfl_safety = 1.5;
    CHECK_THROWS_AS(bad_cfl.validate(), ConfigError);
}

TEST_CASE("stationary problem stays at |z|^2") {
    const auto p = fixtures::stationary(1, 0.125, 0.25, 64);
    SolverConfig cfg;
    cfg.scheme = Scheme::both;
    const auto res = solve(p, cfg);
    CHECK(res.certified());
    const double h = p.domain->h();
    for (const auto& run : res.runs)
        CHECK(fixtures::max_error(p, run.field, [](double, std::span<const double> z) { return norm2(z); }) <= 5.0 * h * h);
}

TEST_CASE("manufactured problem, both schemes") {
    const auto p = fixtures::manufactured(1, 0.25, 0.25, 16);
    SolverConfig cfg;
    cfg.scheme = Scheme::both;
    const auto res = solve(p, cfg);
    CHECK(res.certified());
    REQUIRE(res.cross_gap);
    const double h = p.domain->h();
    CHECK(*res.cross_gap <= 10.0 * (h * h + p.time.dt()));
    for (const auto& run : res.runs) {
        CHECK(run.certificates.pass());
        CHECK(run.certificates.gamma_sh.pass);
        CHECK(fixtures::max_error(p, run.field, fixtures::exact_manufactured) <= h * h + p.time.dt());
    }
    // the Perron iterate sits between the barriers
    CHECK(check_comparison(res.subbarrier.field, res.field, 1e-8).pass);
    CHECK(check_comparison(res.field, res.superbarrier.field, 1e-8).pass);
}

TEST_CASE("coloured and lexicographic Perron sweeps agree") {
    const auto p = fixtures::quartic(1, 0.25, 0.25, 16);
    SolverConfig gs, col;
    col.perron_coloured = true;
    const auto a = solve(p, gs), b = solve(p, col);
    double gap = 0.0;
    for (std::size_t i = 0; i < a.field.values().size(); ++i)
        gap = std::max(gap, std::abs(a.field.values()[i] - b.field.values()[i]));
    CHECK(gap < 1e-9);
}

TEST_CASE("degenerate g = 0") {
    const auto p = ProblemSpec::make(
        "degenerate", make_ball_domain(1, 1.0, 2.0, 0.125), TimeGrid::make(0.25, 64), SymOpSpec::sigma_k_root(1, 1),
        [](double, std::span<const double>, double) { return 0.0; }, [](std::span<const double>) { return 0.0; },
        [](double, std::span<const double>) { return 0.0; }, [](std::span<const double>) { return 0.0; });
    const auto res = solve(p);
    CHECK(res.certified());
    CHECK(res.field.max_abs() <= 1e-6);
    SolverConfig ex;
    ex.scheme = Scheme::explicit_euler;
    CHECK_THROWS_AS(solve(p, ex), NumericalError);
}

TEST_CASE("solve needs an admissibility witness") {
    const auto p = fixtures::stationary(1, 0.25, 0.25, 16);
    SolverConfig cfg;
    AdmissibilityWitness w{p.u0, -5.0, 0.1};
    cfg.witness = w;
    CHECK_THROWS_AS(solve(p, cfg), PreconditionError);
}

TEST_CASE("serial and parallel kernels agree") {
    const auto p = fixtures::quartic(1, 0.0625, 0.25, 16);
    const auto& dom = *p.domain;
    const auto s = slice_operator(dom, p.op, p.u0, 1e-10, Exec::serial);
    const auto q = slice_operator(dom, p.op, p.u0, 1e-10, Exec::parallel);
    CHECK(s.F == q.F);
    CHECK(s.lambda == q.lambda);
    const auto es = explicit_update(p, p.u0, 0.0, 1e-4, kDefaultEpsG, Exec::serial);
    const auto ep = explicit_update(p, p.u0, 0.0, 1e-4, kDefaultEpsG, Exec::parallel);
    CHECK(es.next == ep.next);
    CHECK(laplacian_residual(dom, p.u0, Exec::serial) == laplacian_residual(dom, p.u0, Exec::parallel));

    // no node reads another node of its own colour
    for (int n : {1, 2}) {
        const auto d = make_ball_domain(n, 1.0, 2.0, 0.25);
        const auto cols = stencil_coloring(*d);
        std::vector<int> colour(d->active_count(), -1);
        std::size_t covered = 0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            covered += cols[c].size();
            for (std::size_t pos : cols[c]) colour[d->interior()[pos]] = static_cast<int>(c);
        }
        CHECK(covered == d->interior().size());
        for (std::size_t pos = 0; pos < d->interior().size(); ++pos)
            for (std::size_t nb : d->stencil(pos)) CHECK(colour[nb] != colour[d->interior()[pos]]);
    }
}

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "parahess/barriers.hpp"
#include "parahess/errors.hpp"
#include "parahess/residual.hpp"
#include "parahess/solver.hpp"
#include "parahess/verify.hpp"

using namespace parahess;
using fixtures::norm2;

namespace {

SpaceTimeField sampled(const ProblemSpec& p, const std::function<double(double, std::span<const double>)>& fn) {
    SpaceTimeField u(p.domain, p.time);
    for (int m = 0; m <= p.time.M; ++m)
        for (std::size_t a = 0; a < p.domain->active_count(); ++a) u.at(m, a) = fn(p.time.t(m), p.domain->coords(a));
    return u;
}

}  // namespace

TEST_CASE("residual of the manufactured solution") {
    // linear in t and quadratic in z: both differences are exact
    for (int n : {1, 2}) {
        for (int level = 0; level < 2; ++level) {
            const double h = 0.5 / (1 << level);
            const auto p = fixtures::manufactured(n, h, 0.25, 4 << (2 * level));
            const auto u = sampled(p, fixtures::exact_manufactured);
            double worst = 0.0;
            for (int m = 1; m <= p.time.M; ++m)
                for (std::size_t a : p.domain->interior()) worst = std::max(worst, std::abs(residual(p, u, m, a)));
            CHECK(worst <= 1e-10);
            CHECK(worst <= p.time.dt() + h * h);
        }
    }
    const auto p2 = fixtures::manufactured(2, 0.5, 0.25, 4);
    const auto neg = sampled(p2, [](double, std::span<const double> z) { return -norm2(z); });
    CHECK(residual(p2, neg, 1, p2.domain->interior().front()) == -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(residual(p2, neg, 0, p2.domain->interior().front()), ArgumentError);
    CHECK_THROWS_AS(residual(p2, neg, 1, p2.domain->boundary().front()), ArgumentError);
}

TEST_CASE("sub- and supersolution checks") {
    const auto p = fixtures::manufactured(1, 0.25, 0.25, 16);
    const auto sub = build_subbarrier(p, 0.1);
    const auto sup = build_superbarrier(p, 0.1, trivial_witness(p, 0.1));
    CHECK(check_subsolution(p, sub.field, {1e-9}).pass);
    CHECK(check_supersolution(p, sup.field, {1e-9}).pass);
    CHECK(check_envelope_stability(p, {sub.first, sub.second}, {1e-9}).pass);

    // a non-subsolution input is reported as a failed precondition
    const auto env = check_envelope_stability(p, {sub.field, sup.field}, {1e-9});
    CHECK_FALSE(env.pass);
    CHECK_FALSE(env.note.empty());

    // -|z|^2 slices leave the closed cone: the equation part passes vacuously
    const auto neg = sampled(p, [](double, std::span<const double> z) { return -norm2(z); });
    const auto r = check_supersolution(p, neg);
    CHECK(r.details.at("worst_equation_margin") == std::numeric_limits<double>::infinity());
    CHECK_FALSE(r.pass);  // the lateral and initial data are violated
}

TEST_CASE("comparison audit") {
    const auto p = fixtures::manufactured(1, 0.25, 0.25, 16);
    const auto sub = build_subbarrier(p, 0.1);
    const auto sup = build_superbarrier(p, 0.1, trivial_witness(p, 0.1));
    const auto audit = check_comparison(sub.field, sup.field, 1e-8);
    CHECK(audit.pass);
    CHECK(audit.details.at("boundary_sup") == 0.0);

    auto bumped = sub.field;
    bumped.at(p.time.M, p.domain->interior().front()) = sup.field.at(p.time.M, p.domain->interior().front()) + 1.0;
    const auto bad = check_comparison(bumped, sup.field, 1e-8);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.worst);
    CHECK(bad.worst->node == p.domain->interior().front());

    SpaceTimeField other(make_ball_domain(1, 1.0, 2.0, 0.5), p.time);
    CHECK_THROWS_AS(check_comparison(sub.field, other, 1e-8), ArgumentError);
}

TEST_CASE("Gamma-subharmonicity of slices") {
    const auto p = fixtures::manufactured(2, 0.5, 0.25, 4);
    const auto neg = sampled(p, [](double, std::span<const double> z) { return -norm2(z); });
    CHECK_FALSE(check_gamma_sh_slice(neg, 0.0, ConeSpec::make(2, 2), 1e-6).pass);
    const auto exact = sampled(p, fixtures::exact_manufactured);
    CHECK(check_gamma_sh_all(exact, ConeSpec::make(2, 2), 1e-6).pass);
    CHECK_THROWS_AS(check_gamma_sh_slice(exact, 0.1, ConeSpec::make(2, 2), 1e-6), ArgumentError);
}

TEST_CASE("admissibility witnesses") {
    const auto p = fixtures::stationary(1, 0.25, 0.25, 16);
    AdmissibilityWitness w{p.u0, 0.0, 0.1};
    CHECK(check_admissible(p, w, 1e-9).pass);
    CHECK(check_admissible(p, trivial_witness(p, 0.1), 1e-9).pass);

    AdmissibilityWitness below = w;
    const std::size_t node = p.domain->interior()[3];
    below.u_eps[node] -= 0.01;
    const auto rb = check_admissible(p, below, 1e-9);
    CHECK_FALSE(rb.pass);
    REQUIRE(rb.worst);
    CHECK(rb.worst->node == node);

    // g scaled by 1/e needs C_eps = 1
    auto scaled = p;
    for (auto& v : scaled.g) v /= std::exp(1.0);
    CHECK_FALSE(check_admissible(scaled, {p.u0, 0.0, 0.1}, 1e-9).pass);
    CHECK(check_admissible(scaled, {p.u0, 1.0, 0.1}, 1e-9).pass);
    CHECK(trivial_witness(scaled, 0.1).C_eps == doctest::Approx(1.0).epsilon(1e-9));

    auto zero_g = p;
    std::fill(zero_g.g.begin(), zero_g.g.end(), 0.0);
    CHECK_THROWS_AS(trivial_witness(zero_g, 0.1), PreconditionError);
}

TEST_CASE("witness extraction") {
    {
        const auto p = fixtures::stationary(1, 0.25, 0.25, 16);
        const auto u = sampled(p, [](double, std::span<const double> z) { return norm2(z); });
        ExtractionInfo info;
        const auto w = extract_admissibility_witness(p, u, 0.1, &info);
        CHECK(info.delta_index == 1);
        for (std::size_t a = 0; a < p.domain->active_count(); ++a)
            CHECK(w.u_eps[a] == doctest::Approx(p.u0[a] + 0.05).epsilon(1e-12));
        CHECK(check_admissible(p, w, 1e-9).pass);

        // eps far above osc(u0)
        const auto wide = extract_admissibility_witness(p, u, 10.0);
        CHECK(check_admissible(p, wide, 1e-9).pass);
    }
    {
        const auto p = fixtures::manufactured(1, 0.25, 0.25, 16);
        const auto res = solve(p);
        ExtractionInfo info;
        const auto w = extract_admissibility_witness(p, res.field, 0.1, &info);
        CHECK(w.C_eps <= info.k0 + info.C + 1e-12);
        CHECK(check_admissible(p, w, 1e-9).pass);
    }
}

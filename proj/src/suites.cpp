#include "parahess/suites.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "parahess/barriers.hpp"
#include "parahess/config.hpp"
#include "parahess/errors.hpp"
#include "parahess/hessian_core.hpp"
#include "parahess/solver.hpp"
#include "parahess/verify.hpp"

namespace parahess {

namespace {

void fail(SuiteResult& s, const std::string& what) {
    s.pass = false;
    s.failures.push_back(what);
}

double norm2(std::span<const double> z) {
    double q = 0.0;
    for (double v : z) q += v * v;
    return q;
}

}  // namespace

SuiteResult axiom_suite(std::size_t samples, std::uint64_t seed, bool bad_fixture) {
    SuiteResult s;
    s.name = "operator_axioms";
    std::vector<SymOpSpec> ops;
    for (auto [n, k] : {std::pair{2, 1}, {2, 2}, {3, 2}, {3, 3}}) ops.push_back(SymOpSpec::sigma_k_root(n, k));
    if (bad_fixture) {
        CustomOperator bad;
        bad.name = "bad_f";
        bad.f = [](std::span<const double> x) { return norm2(x); };
        ops.push_back(SymOpSpec::custom(ConeSpec::make(2, 2), bad));
    }
    std::size_t trials = 0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const auto rep = check_operator_axioms(ops[i], samples, seed + i);
        for (const auto& r : rep.results) {
            trials += r.tested;
            if (!r.pass) {
                std::ostringstream os;
                os << rep.op << ": axiom " << r.axiom << " failed " << r.failed << "/" << r.tested
                   << " (worst margin " << r.worst_margin << ")";
                fail(s, os.str());
            }
        }
    }
    std::ostringstream os;
    os << ops.size() << " operators, " << trials << " trials";
    s.summary = os.str();
    return s;
}

SuiteResult convolution_suite(int fields, std::uint64_t seed) {
    SuiteResult s;
    s.name = "convolution_laws";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto dom = make_ball_domain(1, 1.0, 2.0, 0.25);
    const TimeGrid tg = TimeGrid::make(1.0, 32);
    const double dt = tg.dt();
    constexpr double tol = 1e-14;
    std::size_t comparisons = 0;
    for (int f = 0; f < fields; ++f) {
        // random walk in t with increments bounded by L dt: L-Lipschitz on the grid
        const double L = 0.5 + 4.0 * std::abs(unit(rng));
        SpaceTimeField u(dom, tg);
        for (std::size_t a = 0; a < dom->active_count(); ++a) {
            u.at(0, a) = unit(rng);
            for (int m = 1; m <= tg.M; ++m) u.at(m, a) = u.at(m - 1, a) + L * dt * unit(rng);
        }
        const double A = u.oscillation() + 0.5;
        for (double k : {2.0 * L, 4.0 * A, 8.0 * A}) {
            if (!(A / k < tg.T / 2.0)) continue;
            const auto up = sup_convolution_time(u, k, A);
            const auto lo = inf_convolution_time(u, k, A);
            for (int m = up.m_begin(); m <= up.m_end(); ++m) {
                for (std::size_t a = 0; a < dom->active_count(); ++a) {
                    // window oscillation bounds the sandwich from the other side
                    double wmax = -1e300, wmin = 1e300;
                    for (int q = 0; q <= tg.M; ++q) {
                        if (std::abs(tg.t(q) - tg.t(m)) > A / k + 1e-12) continue;
                        wmax = std::max(wmax, u.at(q, a));
                        wmin = std::min(wmin, u.at(q, a));
                    }
                    ++comparisons;
                    if (!(up.at(m, a) >= u.at(m, a) - tol && up.at(m, a) <= wmax + tol))
                        fail(s, "sup-convolution sandwich");
                    if (!(lo.at(m, a) <= u.at(m, a) + tol && lo.at(m, a) >= wmin - tol))
                        fail(s, "inf-convolution sandwich");
                    for (int q = m + 1; q <= up.m_end(); ++q) {
                        const double span = k * (tg.t(q) - tg.t(m));
                        if (std::abs(up.at(q, a) - up.at(m, a)) > span + tol) fail(s, "sup-convolution k-Lipschitz");
                        if (std::abs(lo.at(q, a) - lo.at(m, a)) > span + tol) fail(s, "inf-convolution k-Lipschitz");
                    }
                    if (k >= L && (std::abs(up.at(m, a) - u.at(m, a)) > tol || std::abs(lo.at(m, a) - u.at(m, a)) > tol))
                        fail(s, "idempotence for k >= L");
                }
            }
        }
        if (s.failures.size() > 20) break;
    }
    std::sort(s.failures.begin(), s.failures.end());
    s.failures.erase(std::unique(s.failures.begin(), s.failures.end()), s.failures.end());
    std::ostringstream os;
    os << fields << " fields, " << comparisons << " node checks";
    s.summary = os.str();
    return s;
}

SuiteResult barrier_suite(std::uint64_t seed) {
    SuiteResult s;
    s.name = "barrier_certificates";
    int bundles = 0;
    for (const std::string preset : {"stationary_n1", "manufactured_n1", "laplace_n2"}) {
        RunConfig c = preset_config(preset);
        if (preset == "stationary_n1") {
            c.h = 0.25;
            c.M = 16;
        } else if (preset == "laplace_n2") {
            c.h = 0.5;
            c.M = 4;
        }
        const auto p = build_problem(c);
        validate_problem(p, {.seed = seed});
        const double eps = 0.1;
        const auto sub = build_subbarrier(p, eps);
        const auto super = build_superbarrier(p, eps, trivial_witness(p, eps));
        bundles += 2;
        if (!sub.certified()) fail(s, preset + ": subbarrier certificate");
        if (!super.certified()) fail(s, preset + ": superbarrier certificate");
        for (int m = 0; m <= p.time.M; ++m)
            for (std::size_t a = 0; a < p.domain->active_count(); ++a)
                if (sub.field.at(m, a) > super.field.at(m, a) + 1e-12) {
                    fail(s, preset + ": subbarrier above superbarrier");
                    m = p.time.M + 1;
                    break;
                }
        if (!check_envelope_stability(p, {sub.first, sub.second}, {1e-9, kDefaultEpsG}).pass)
            fail(s, preset + ": decomposition audit");
        // u_1 is M1-Lipschitz in t
        for (int m = 1; m <= p.time.M; ++m)
            for (std::size_t a : p.domain->interior())
                if (std::abs(sub.first.at(m, a) - sub.first.at(m - 1, a)) >
                    sub.constants.M1 * p.time.dt() * (1.0 + 1e-12) + 1e-14) {
                    fail(s, preset + ": subbarrier slope exceeds M1");
                    m = p.time.M + 1;
                    break;
                }
        // maximum principle of the harmonic extension
        const auto& dom = *p.domain;
        SpatialField data(dom.active_count(), std::numeric_limits<double>::quiet_NaN());
        double lo = 1e300, hi = -1e300;
        for (std::size_t a : dom.boundary()) {
            data[a] = std::sin(3.0 * dom.coords(a)[0]) + dom.coords(a)[1];
            lo = std::min(lo, data[a]);
            hi = std::max(hi, data[a]);
        }
        const auto ext = harmonic_extension(dom, data, 1e-10);
        for (std::size_t a : dom.interior())
            if (ext[a] < lo - 1e-12 || ext[a] > hi + 1e-12) {
                fail(s, preset + ": harmonic extension maximum principle");
                break;
            }
    }
    s.summary = std::to_string(bundles) + " bundles";
    return s;
}

SuiteResult comparison_suite(int problems, std::uint64_t seed) {
    SuiteResult s;
    s.name = "comparison_audit";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto dom = make_ball_domain(1, 1.0, 2.0, 0.25);
    const TimeGrid tg = TimeGrid::make(0.25, 16);
    const auto op = SymOpSpec::sigma_k_root(1, 1);
    int audits = 0;
    for (int i = 0; i < problems; ++i) {
        const double alpha = 0.5 + unit(rng), beta = unit(rng) - 0.5, drift = unit(rng) - 0.5;
        const double gain = 0.2 + unit(rng), lam = unit(rng), shift = 0.05 + 0.5 * unit(rng);
        auto make = [&](double lift) {
            auto u0 = [=](std::span<const double> z) { return alpha * norm2(z) + beta * z[0] + lift; };
            return ProblemSpec::make(
                "random", dom, tg, op, [lam](double, std::span<const double>, double r) { return lam * r; },
                [gain](std::span<const double> z) { return gain * (1.0 + 0.5 * z[1] * z[1]); },
                [=](double t, std::span<const double> z) { return u0(z) + drift * t; }, u0);
        };
        const auto p1 = make(0.0), p2 = make(shift);
        SolverConfig cfg;
        cfg.scheme = Scheme::perron;
        try {
            const auto r1 = solve(p1, cfg);
            const auto r2 = solve(p2, cfg);
            audits += 2;
            const auto barrier_audit = check_comparison(r1.subbarrier.field, r1.superbarrier.field, 1e-8);
            if (!barrier_audit.pass) fail(s, "problem " + std::to_string(i) + ": subbarrier vs superbarrier");
            const auto ordered = check_comparison(r1.field, r2.field, 1e-8);
            if (!ordered.pass) fail(s, "problem " + std::to_string(i) + ": ordered solutions");
        } catch (const std::exception& e) {
            fail(s, "problem " + std::to_string(i) + ": " + e.what());
        }
    }
    s.summary = std::to_string(problems) + " problems, " + std::to_string(audits) + " audits";
    return s;
}

}  // namespace parahess

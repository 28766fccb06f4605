#include "parahess/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "parahess/errors.hpp"

namespace parahess {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kLadderFloor = -160;  // 2^-40
constexpr int kJointFloor = -96;    // 2^-24

double ladder_value(int j) { return std::exp2(j / 4.0); }

std::string witness_text(const VerificationReport& r) {
    std::ostringstream os;
    if (r.worst) {
        os << "worst node " << r.worst->node << " at t=" << r.worst->t << " margin " << r.worst->margin;
    } else {
        os << "no witness";
    }
    return os.str();
}

// Sub components: boundary nodes never exceed phi.
void cap_boundary(const ProblemSpec& p, SpaceTimeField& u) {
    for (int m = 0; m <= p.time.M; ++m)
        for (std::size_t a : p.domain->boundary()) u.at(m, a) = std::min(u.at(m, a), p.boundary_value(p.time.t(m), a));
}

SpaceTimeField sub_first(const ProblemSpec& p, double eps, double M1) {
    const GridDomain& dom = *p.domain;
    const double c = dom.depth();
    SpaceTimeField u(p.domain, p.time);
    for (int m = 0; m <= p.time.M; ++m) {
        const double t = p.time.t(m);
        for (std::size_t a = 0; a < dom.active_count(); ++a)
            u.at(m, a) = p.u0[a] + eps * (dom.rho(a) - c) / (2.0 * c) - M1 * t;
    }
    cap_boundary(p, u);
    return u;
}

SpaceTimeField sub_second(const ProblemSpec& p, double eps, double M2) {
    const GridDomain& dom = *p.domain;
    // Boundary lattice points sit slightly outside {rho < 0}. Interior nodes use
    // rho lowered by a constant, boundary nodes sit at phi - eps/2, which is at
    // or above the lowered profile and so only raises second differences.
    double lift = 0.0;
    for (std::size_t a : dom.boundary()) lift = std::max(lift, dom.rho(a));
    SpaceTimeField u(p.domain, p.time);
    for (int m = 0; m <= p.time.M; ++m) {
        const double t = p.time.t(m);
        for (std::size_t a : dom.interior())
            u.at(m, a) = p.phi(t, dom.coords(a)) - eps / 2.0 + M2 * (dom.rho(a) - lift);
        for (std::size_t a : dom.boundary()) u.at(m, a) = p.boundary_value(t, a) - eps / 2.0;
    }
    return u;
}

SpaceTimeField pointwise(const SpaceTimeField& a, const SpaceTimeField& b, bool take_max) {
    SpaceTimeField out = a;
    for (int m = a.m_begin(); m <= a.m_end(); ++m)
        for (std::size_t i = 0; i < a.node_count(); ++i)
            out.at(m, i) = take_max ? std::max(a.at(m, i), b.at(m, i)) : std::min(a.at(m, i), b.at(m, i));
    return out;
}

double search_constant(const char* label, const ProblemSpec& p, const BarrierOptions& opts,
                       const std::function<SpaceTimeField(double)>& build, int& evaluations) {
    const CheckOptions co{opts.tol_b, opts.eps_g};
    VerificationReport last_fail;
    auto passes = [&](double M) {
        auto r = check_subsolution(p, build(M), co);
        if (!r.pass) last_fail = std::move(r);
        return r.pass;
    };
    int used = 0;
    const auto M = ladder_search(passes, opts.M_max, &used);
    evaluations += used;
    if (!M)
        throw NumericalError(std::string("subbarrier construction failed: ") + label + " exceeds M_max; " +
                             witness_text(last_fail));
    return *M;
}

}  // namespace

std::optional<double> ladder_search(const std::function<bool(double)>& passes, double M_max, int* evaluations) {
    int count = 0;
    auto test = [&](double M) {
        ++count;
        return passes(M);
    };
    auto done = [&](std::optional<double> v) {
        if (evaluations) *evaluations = count;
        return v;
    };
    if (test(0.0)) return done(0.0);
    // doubling (steps of 4 on the 2^(j/4) ladder) from 1
    int lo, hi;  // lo fails, hi passes
    if (test(1.0)) {
        hi = 0;
        lo = hi - 4;
        while (lo >= kLadderFloor && test(ladder_value(lo))) {
            hi = lo;
            lo -= 4;
        }
        if (lo < kLadderFloor) return done(ladder_value(hi));
    } else {
        lo = 0;
        hi = 4;
        while (true) {
            if (ladder_value(hi) > M_max) return done(std::nullopt);
            if (test(ladder_value(hi))) break;
            lo = hi;
            hi += 4;
        }
    }
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (test(ladder_value(mid)))
            hi = mid;
        else
            lo = mid;
    }
    return done(ladder_value(hi));
}

std::optional<double> ladder_scan(const std::function<bool(double)>& passes, int j_start, double M_max,
                                  int* evaluations) {
    int count = 0;
    auto test = [&](int j) {
        ++count;
        return passes(ladder_value(j));
    };
    std::optional<double> out;
    int lo = j_start - 4, hi = j_start;
    while (ladder_value(hi) <= M_max) {
        if (test(hi)) {
            while (hi - lo > 1) {
                const int mid = (lo + hi) / 2;
                if (test(mid))
                    hi = mid;
                else
                    lo = mid;
            }
            out = ladder_value(hi);
            break;
        }
        lo = hi;
        hi += 4;
    }
    if (evaluations) *evaluations = count;
    return out;
}

VerificationReport check_barrier_sandwich(const ProblemSpec& p, const SpaceTimeField& u, BarrierSide side, double eps,
                                          double tol) {
    const GridDomain& dom = *p.domain;
    VerificationReport r;
    r.check = side == BarrierSide::sub ? "sub_sandwich" : "super_sandwich";
    r.tol = tol;
    auto record = [&](int m, std::size_t a, double margin) {
        ++r.tested;
        if (!(margin >= -tol)) {
            ++r.failed;
            r.pass = false;
        }
        const double key = std::isnan(margin) ? -kInf : margin;
        if (!r.worst || key < r.worst->margin) {
            VerificationReport::Worst w;
            w.m = m;
            w.t = p.time.t(m);
            w.node = a;
            const auto z = dom.coords(a);
            w.z.assign(z.begin(), z.end());
            w.margin = key;
            r.worst = std::move(w);
        }
    };
    // margins of data <= u <= data + eps (super) or data - eps <= u <= data (sub)
    auto both = [&](int m, std::size_t a, double data) {
        const double v = u.at(m, a);
        if (side == BarrierSide::sub)
            record(m, a, std::min(data - v, v - (data - eps)));
        else
            record(m, a, std::min(v - data, data + eps - v));
    };
    for (std::size_t a = 0; a < dom.active_count(); ++a) both(0, a, p.u0[a]);
    for (int m = 1; m <= p.time.M; ++m)
        for (std::size_t a : dom.boundary()) both(m, a, p.boundary_value(p.time.t(m), a));
    return r;
}

BarrierBundle build_subbarrier(const ProblemSpec& p, double eps, const BarrierOptions& opts) {
    if (!(eps > 0.0)) throw ArgumentError("barrier epsilon must be positive");
    BarrierBundle b;
    b.side = BarrierSide::sub;
    b.epsilon = eps;
    int evals = 0;
    b.constants.M1 = search_constant("M1", p, opts, [&](double M) { return sub_first(p, eps, M); }, evals);
    b.constants.M2 = search_constant("M2", p, opts, [&](double M) { return sub_second(p, eps, M); }, evals);
    const CheckOptions co{opts.tol_b, opts.eps_g};
    b.first = sub_first(p, eps, b.constants.M1);
    b.second = sub_second(p, eps, b.constants.M2);
    b.field = pointwise(b.first, b.second, true);
    b.certificate = check_subsolution(p, b.field, co);
    ++evals;
    if (!b.certificate.pass) {
        // The mixed second differences are not monotone, so the max of two
        // discrete subsolutions can fail where the components switch. Raise
        // both constants to a common floor until the max certifies. Too large
        // a floor sharpens the switch, so the pass set is an interval: scan
        // upward from a small floor instead of doubling from 1.
        const double M1 = b.constants.M1, M2 = b.constants.M2;
        VerificationReport last_fail = b.certificate;
        auto passes = [&](double s) {
            auto r = check_subsolution(
                p, pointwise(sub_first(p, eps, std::max(M1, s)), sub_second(p, eps, std::max(M2, s)), true), co);
            if (!r.pass) last_fail = std::move(r);
            return r.pass;
        };
        int used = 0;
        const auto s = ladder_scan(passes, kJointFloor, opts.M_max, &used);
        evals += used;
        if (!s)
            throw NumericalError("subbarrier construction failed: joint constant exceeds M_max; " +
                                 witness_text(last_fail));
        b.constants.M1 = std::max(M1, *s);
        b.constants.M2 = std::max(M2, *s);
        b.first = sub_first(p, eps, b.constants.M1);
        b.second = sub_second(p, eps, b.constants.M2);
        b.field = pointwise(b.first, b.second, true);
        b.certificate = check_subsolution(p, b.field, co);
    }
    b.constants.searches = evals;
    b.sandwich = check_barrier_sandwich(p, b.field, BarrierSide::sub, eps, opts.tol_b);
    return b;
}

SpatialField harmonic_extension(const GridDomain& dom, SpatialField initial, double tol_h, Exec exec, long max_sweeps,
                                HarmonicStats* stats) {
    if (initial.size() != dom.active_count()) throw ArgumentError("harmonic extension: field size mismatch");
    for (std::size_t a : dom.boundary())
        if (!std::isfinite(initial[a])) throw ArgumentError("harmonic extension: boundary node without data");
    double lo = kInf, hi = -kInf;
    for (std::size_t a : dom.boundary()) {
        lo = std::min(lo, initial[a]);
        hi = std::max(hi, initial[a]);
    }
    for (std::size_t a : dom.interior())
        if (!std::isfinite(initial[a])) initial[a] = 0.5 * (lo + hi);

    const double L = 2.0 * dom.box().half_count * dom.h();
    const double omega = 2.0 / (1.0 + std::sin(std::numbers::pi * dom.h() / L));
    long sweeps = 0;
    double res = laplacian_residual(dom, initial, exec);
    while (res > tol_h) {
        if (sweeps >= max_sweeps) {
            std::ostringstream os;
            os << "harmonic extension did not converge after " << sweeps << " sweeps; residual " << res;
            throw NumericalError(os.str());
        }
        sor_sweep(dom, initial, omega, exec);
        ++sweeps;
        res = laplacian_residual(dom, initial, exec);
    }
    if (stats) {
        stats->sweeps = sweeps;
        stats->residual = res;
    }
    return initial;
}

BarrierBundle build_superbarrier(const ProblemSpec& p, double eps, const AdmissibilityWitness& witness,
                                 const BarrierOptions& opts) {
    if (!(eps > 0.0)) throw ArgumentError("barrier epsilon must be positive");
    const GridDomain& dom = *p.domain;
    if (witness.u_eps.size() != dom.active_count())
        throw PreconditionError("admissibility witness does not match the domain");
    if (witness.epsilon > eps * (1.0 + 1e-12))
        throw PreconditionError("admissibility witness epsilon exceeds the barrier epsilon");
    const auto adm = check_admissible(p, witness, opts.tol_b);
    if (!adm.pass) throw PreconditionError("admissibility witness is invalid: " + witness_text(adm));

    BarrierBundle b;
    b.side = BarrierSide::super;
    b.epsilon = eps;
    b.constants.C_eps = witness.C_eps;

    const int M = p.time.M;
    const double dt = p.time.dt();
    double supG = 0.0, supPhiT = 0.0;
    for (int m = 0; m <= M; ++m) {
        const double t = p.time.t(m);
        const int mp = std::min(m + 1, M), mm = std::max(m - 1, 0);
        const double span = (mp - mm) * dt;
        for (std::size_t a = 0; a < dom.active_count(); ++a) {
            const auto z = dom.coords(a);
            supG = std::max(supG, std::abs(p.G(t, z, p.u0[a])));
            supPhiT = std::max(supPhiT, std::abs(p.phi(p.time.t(mp), z) - p.phi(p.time.t(mm), z)) / span);
        }
    }
    b.constants.M1_prime = supG + supPhiT;
    const double slope = std::max(witness.C_eps, 0.0) + b.constants.M1_prime;

    b.first = SpaceTimeField(p.domain, p.time);
    b.second = SpaceTimeField(p.domain, p.time);
    SpatialField slice(dom.active_count(), std::numeric_limits<double>::quiet_NaN());
    for (int m = 0; m <= M; ++m) {
        const double t = p.time.t(m);
        for (std::size_t a = 0; a < dom.active_count(); ++a) b.first.at(m, a) = witness.u_eps[a] + slope * t;
        for (std::size_t a : dom.boundary()) slice[a] = p.boundary_value(t, a) + eps;
        slice = harmonic_extension(dom, std::move(slice), opts.tol_harmonic, opts.exec, opts.max_sor_sweeps);
        b.second.set_slice(m, slice);
    }
    b.field = pointwise(b.first, b.second, false);
    b.certificate = check_supersolution(p, b.field, {opts.tol_b, opts.eps_g});
    b.sandwich = check_barrier_sandwich(p, b.field, BarrierSide::super, eps, opts.tol_b);
    return b;
}

}  // namespace parahess
